#pragma once
/**
 * @file svg.hpp
 * @brief Write-only SVG plots of a run: overhead view and speed/gap time series.
 */

#include <argus/sim/harness.hpp>

#include <sstream>

namespace argus::sim {

/// Ground-truth boxes of one frame, captured through the run observer.
struct PlotFrame
{
  int frame{0};
  Owner owner{Owner::Ads};
  OrientedBox ego;
  std::vector<Participant> others;
  std::vector<StopSignal> signals;
};

/// Re-runs the scenario and keeps every frame's boxes.
inline std::vector<PlotFrame> capture_frames(const Scenario& s, const RunConfig& cfg)
{
  std::vector<PlotFrame> frames;
  run_scenario(s, cfg, [&](const WorldState& w, const FrameRecord& r) {
    PlotFrame f;
    f.frame = r.frame;
    f.owner = r.owner;
    f.ego = w.ego.participant.box;
    for (const auto& a : w.actors) {
      f.others.push_back(a.participant);
    }
    f.signals = w.signals;
    frames.push_back(std::move(f));
  });
  return frames;
}

namespace detail {

struct Viewport
{
  double min_x{0}, min_y{0}, max_x{1}, max_y{1};
  double scale{1};
  double pad{20};

  void include(Vec2 p)
  {
    min_x = std::min(min_x, p.x);
    min_y = std::min(min_y, p.y);
    max_x = std::max(max_x, p.x);
    max_y = std::max(max_y, p.y);
  }
  [[nodiscard]] double px(double x) const { return pad + (x - min_x) * scale; }
  [[nodiscard]] double py(double y) const { return pad + (max_y - y) * scale; }
  [[nodiscard]] double width() const { return 2 * pad + (max_x - min_x) * scale; }
  [[nodiscard]] double height() const { return 2 * pad + (max_y - min_y) * scale; }
};

inline std::string points_attr(const std::vector<Vec2>& pts, const Viewport& v)
{
  std::ostringstream os;
  os.precision(2);
  os << std::fixed;
  for (const auto& p : pts) {
    os << v.px(p.x) << ',' << v.py(p.y) << ' ';
  }
  return os.str();
}

inline void polyline(std::ostream& os, const std::vector<Vec2>& pts, const Viewport& v,
                     const std::string& style)
{
  os << "<polyline fill=\"none\" " << style << " points=\"" << points_attr(pts, v) << "\"/>\n";
}

inline void box(std::ostream& os, const OrientedBox& b, const Viewport& v, const std::string& style)
{
  const auto c = b.corners();
  os << "<polygon " << style << " points=\""
     << points_attr(std::vector<Vec2>(c.begin(), c.end()), v) << "\"/>\n";
}

}  // namespace detail

inline std::string overhead_svg(const Scenario& s, const std::vector<PlotFrame>& frames,
                                double target_width = 1200.0)
{
  detail::Viewport v;
  const Vec2 first = s.route.points().front();
  v.min_x = v.max_x = first.x;
  v.min_y = v.max_y = first.y;
  for (const auto& p : s.route.points()) {
    v.include(p);
  }
  for (const auto& lane : s.map->lanes) {
    for (const auto& p : lane.centerline.points()) {
      v.include(p);
    }
  }
  for (const auto& f : frames) {
    v.include(f.ego.center.position());
  }
  v.min_x -= 5;
  v.min_y -= 5;
  v.max_x += 5;
  v.max_y += 5;
  v.scale = target_width / std::max(1.0, v.max_x - v.min_x);

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << v.width() << "\" height=\""
     << v.height() << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (const auto& lane : s.map->lanes) {
    detail::polyline(os, lane.centerline.points(), v,
                     "stroke=\"#e6e6e6\" stroke-width=\"" + std::to_string(lane.width * v.scale) +
                       "\"");
  }
  for (const auto& b : s.map->boundaries) {
    detail::polyline(os, b.points(), v, "stroke=\"black\" stroke-width=\"2\"");
  }
  detail::polyline(os, s.route.points(), v,
                   "stroke=\"#3366cc\" stroke-dasharray=\"6,4\" stroke-width=\"1\"");

  if (!frames.empty()) {
    for (const auto& sig : frames.front().signals) {
      detail::box(os, signal_region_box(sig), v,
                  sig.kind == SignalKind::StopSign ? "fill=\"#ffcccc\" stroke=\"red\""
                                                   : "fill=\"#ffe0b3\" stroke=\"#cc6600\"");
    }
    std::map<std::string, std::vector<Vec2>> trails;
    for (const auto& f : frames) {
      for (const auto& p : f.others) {
        trails[p.id].push_back(p.box.center.position());
      }
    }
    for (const auto& [id, pts] : trails) {
      if (pts.size() > 1) {
        detail::polyline(os, pts, v, "stroke=\"#999999\" stroke-width=\"1\"");
      }
    }
    // Ego trail, one polyline per ownership run.
    std::vector<Vec2> run{frames.front().ego.center.position()};
    Owner owner = frames.front().owner;
    const auto flush = [&] {
      if (run.size() > 1) {
        detail::polyline(os, run, v,
                         owner == Owner::Ads ? "stroke=\"#1f77b4\" stroke-width=\"2\""
                                             : "stroke=\"#ff7f0e\" stroke-width=\"3\"");
      }
    };
    for (const auto& f : frames) {
      run.push_back(f.ego.center.position());
      if (f.owner != owner) {
        flush();
        run = {f.ego.center.position()};
        owner = f.owner;
      }
    }
    flush();

    std::vector<std::size_t> keys{0, frames.size() - 1};
    for (std::size_t i = 1; i < frames.size(); ++i) {
      if (frames[i].owner != frames[i - 1].owner) {
        keys.push_back(i);
      }
    }
    for (const std::size_t k : keys) {
      const auto& f = frames[k];
      for (const auto& p : f.others) {
        detail::box(os, p.box, v, "fill=\"none\" stroke=\"#555555\"");
      }
      detail::box(os, f.ego, v,
                  f.owner == Owner::Ads ? "fill=\"none\" stroke=\"#1f77b4\""
                                        : "fill=\"none\" stroke=\"#ff7f0e\"");
    }
  }
  os << "<text x=\"10\" y=\"14\" font-size=\"12\">" << s.name
     << " (blue: ADS, orange: mitigator)</text>\n</svg>\n";
  return os.str();
}

/// Ego speed and nearest leading-actor gap against time, with takeover intervals shaded.
inline std::string timeseries_svg(const RunTrace& trace, double width = 900.0)
{
  const double dt = trace.dt();
  const auto& recs = trace.records;
  const double t_end = std::max(dt, recs.size() * dt);
  double v_max = 1.0;
  double g_max = 1.0;
  for (const auto& r : recs) {
    v_max = std::max(v_max, r.ego.v);
    for (const auto& l : r.leads) {
      if (std::isfinite(l.net_gap)) {
        g_max = std::max(g_max, std::min(l.net_gap, 60.0));
      }
    }
  }
  const double pad = 40;
  const double panel = 180;
  const double plot_w = width - 2 * pad;
  const auto tx = [&](double t) { return pad + plot_w * t / t_end; };

  std::ostringstream os;
  os.precision(2);
  os << std::fixed;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
     << 2 * panel + 3 * pad << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t i = 0; i < recs.size(); ++i) {
    if (recs[i].owner == Owner::Mitigator) {
      os << "<rect x=\"" << tx(i * dt) << "\" y=\"" << pad << "\" width=\""
         << plot_w * dt / t_end + 0.01 << "\" height=\"" << 2 * panel + pad
         << "\" fill=\"#ffe5cc\"/>\n";
    }
  }
  const auto panel_frame = [&](double top, const std::string& label, double vmax) {
    os << "<rect x=\"" << pad << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\""
       << panel << "\" fill=\"none\" stroke=\"black\"/>\n";
    os << "<text x=\"" << pad << "\" y=\"" << top - 4 << "\" font-size=\"12\">" << label
       << " (max " << vmax << ")</text>\n";
  };
  panel_frame(pad, "ego speed m/s", v_max);
  panel_frame(2 * pad + panel, "nearest lead gap m", g_max);

  os << "<polyline fill=\"none\" stroke=\"#1f77b4\" points=\"";
  for (std::size_t i = 0; i < recs.size(); ++i) {
    os << tx(i * dt) << ',' << pad + panel * (1.0 - recs[i].ego.v / v_max) << ' ';
  }
  os << "\"/>\n";
  const double top2 = 2 * pad + panel;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    double g = std::numeric_limits<double>::infinity();
    for (const auto& l : recs[i].leads) {
      g = std::min(g, l.net_gap);
    }
    if (std::isfinite(g)) {
      os << "<circle r=\"1.2\" fill=\"#d62728\" cx=\"" << tx(i * dt) << "\" cy=\""
         << top2 + panel * (1.0 - std::min(g, g_max) / g_max) << "\"/>\n";
    }
  }
  os << "<text x=\"" << pad << "\" y=\"" << 2 * panel + 3 * pad - 8
     << "\" font-size=\"12\">time 0 to " << t_end << " s; shaded: mitigator in control</text>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace argus::sim

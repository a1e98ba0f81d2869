#pragma once
/**
 * @file serialize.hpp
 * @brief JSON encodings of run configuration, trace records and reports, and FNV-1a digests.
 *
 * Every from_json here is the exact inverse of the matching to_json so traces can be re-verified.
 */

#include <argus/scenario.hpp>
#include <argus/sim/report.hpp>

#include <cstdio>

namespace argus::sim {

using nlohmann::json;

inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL)
{
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v)
{
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline std::uint64_t parse_hex64(const std::string& s)
{
  if (s.size() != 16 || s.find_first_not_of("0123456789abcdef") != std::string::npos) {
    throw std::invalid_argument("malformed digest '" + s + "'");
  }
  return std::stoull(s, nullptr, 16);
}

inline std::uint64_t digest_of(const json& j) { return fnv1a64(j.dump()); }

inline json box_json(const OrientedBox& b)
{
  return json::array({b.center.x, b.center.y, b.center.theta, b.length, b.width, b.speed});
}

inline json to_json(const BevSnapshot& s)
{
  json others = json::array();
  for (const auto& p : s.others) {
    others.push_back({p.id, std::string(argus::to_string(p.kind)), box_json(p.box)});
  }
  json sigs = json::array();
  for (const auto& g : s.signals) {
    sigs.push_back({g.id, g.active});
  }
  return {{"frame", s.frame}, {"ego", box_json(s.ego.box)}, {"others", others}, {"signals", sigs}};
}

inline json to_json(const WorldState& w)
{
  json actors = json::array();
  for (const auto& a : w.actors) {
    actors.push_back({a.participant.id, box_json(a.participant.box), a.progress, a.speed,
                      a.paused_for, a.paused_done});
  }
  json sigs = json::array();
  for (const auto& g : w.signals) {
    sigs.push_back({g.id, g.active});
  }
  return {{"frame", w.frame},
          {"ego", box_json(w.ego.participant.box)},
          {"actors", actors},
          {"signals", sigs}};
}

// --- configuration -----------------------------------------------------------------------------

inline json to_json(const NoiseParams& n)
{
  return {{"position_sigma", n.position_sigma},
          {"heading_sigma", n.heading_sigma},
          {"speed_sigma", n.speed_sigma},
          {"drop_probability", n.drop_probability}};
}

inline NoiseParams noise_from_json(const json& j)
{
  return {j.at("position_sigma").get<double>(), j.at("heading_sigma").get<double>(),
          j.at("speed_sigma").get<double>(), j.at("drop_probability").get<double>()};
}

inline json to_json(const RunConfig& c)
{
  const auto& m = c.monitor;
  const auto& g = c.mitigator;
  json j;
  j["argus"] = c.argus;
  j["noise"] = c.noise;
  j["noise_override"] = c.noise_override ? to_json(*c.noise_override) : json(nullptr);
  j["monitor"] = {{"M", m.M},
                  {"N", m.N},
                  {"R", m.R},
                  {"l", m.l},
                  {"H", m.H},
                  {"epsilon", m.epsilon},
                  {"ego_cap", m.ego_cap},
                  {"vehicle_cap", m.vehicle_cap},
                  {"pedestrian_cap", m.pedestrian_cap}};
  j["mitigator"] = {{"perception", g.occupancy.perception},
                    {"cell_size", g.occupancy.cell_size},
                    {"boundary_half_width", g.occupancy.boundary_half_width},
                    {"w_dev", g.reroute.weights.w_dev},
                    {"w_turn", g.reroute.weights.w_turn},
                    {"smooth_passes", g.reroute.smooth_passes},
                    {"nav_fraction", g.nav_fraction},
                    {"corridor_margin", g.corridor_margin},
                    {"v0_factor", g.v0_factor}};
  j["idm"] = {{"v0", c.idm.v0},         {"s0", c.idm.s0},         {"T", c.idm.T},
              {"a_max", c.idm.a_max},   {"b_comf", c.idm.b_comf}, {"sigma", c.idm.sigma}};
  j["controller"] = {{"a_max", c.controller.a_max}, {"b_comf", c.controller.b_comf}};
  j["penalties"] = {{"collision_pedestrian", c.penalties.collision_pedestrian},
                    {"collision_vehicle", c.penalties.collision_vehicle},
                    {"collision_static", c.penalties.collision_static},
                    {"red_light", c.penalties.red_light},
                    {"stop_sign", c.penalties.stop_sign},
                    {"stall_timeout", c.penalties.stall_timeout}};
  j["stall_timeout"] = c.stall_timeout;
  j["async_monitor"] = c.async_monitor;
  return j;
}

inline RunConfig run_config_from_json(const json& j)
{
  RunConfig c;
  c.argus = j.at("argus").get<bool>();
  c.noise = j.at("noise").get<bool>();
  if (!j.at("noise_override").is_null()) {
    c.noise_override = noise_from_json(j.at("noise_override"));
  }
  const json& m = j.at("monitor");
  c.monitor.M = m.at("M").get<int>();
  c.monitor.N = m.at("N").get<int>();
  c.monitor.R = m.at("R").get<int>();
  c.monitor.l = m.at("l").get<int>();
  c.monitor.H = m.at("H").get<int>();
  c.monitor.epsilon = m.at("epsilon").get<double>();
  c.monitor.ego_cap = m.at("ego_cap").get<double>();
  c.monitor.vehicle_cap = m.at("vehicle_cap").get<double>();
  c.monitor.pedestrian_cap = m.at("pedestrian_cap").get<double>();
  const json& g = j.at("mitigator");
  c.mitigator.occupancy.perception = g.at("perception").get<double>();
  c.mitigator.occupancy.cell_size = g.at("cell_size").get<double>();
  c.mitigator.occupancy.boundary_half_width = g.at("boundary_half_width").get<double>();
  c.mitigator.reroute.weights.w_dev = g.at("w_dev").get<double>();
  c.mitigator.reroute.weights.w_turn = g.at("w_turn").get<double>();
  c.mitigator.reroute.smooth_passes = g.at("smooth_passes").get<int>();
  c.mitigator.nav_fraction = g.at("nav_fraction").get<double>();
  c.mitigator.corridor_margin = g.at("corridor_margin").get<double>();
  c.mitigator.v0_factor = g.at("v0_factor").get<double>();
  const json& i = j.at("idm");
  c.idm = {i.at("v0").get<double>(),    i.at("s0").get<double>(),
           i.at("T").get<double>(),     i.at("a_max").get<double>(),
           i.at("b_comf").get<double>(), i.at("sigma").get<double>()};
  c.controller.a_max = j.at("controller").at("a_max").get<double>();
  c.controller.b_comf = j.at("controller").at("b_comf").get<double>();
  const json& p = j.at("penalties");
  c.penalties.collision_pedestrian = p.at("collision_pedestrian").get<double>();
  c.penalties.collision_vehicle = p.at("collision_vehicle").get<double>();
  c.penalties.collision_static = p.at("collision_static").get<double>();
  c.penalties.red_light = p.at("red_light").get<double>();
  c.penalties.stop_sign = p.at("stop_sign").get<double>();
  c.penalties.stall_timeout = p.at("stall_timeout").get<double>();
  c.stall_timeout = j.at("stall_timeout").get<double>();
  c.async_monitor = j.at("async_monitor").get<bool>();
  return c;
}

// --- records ------------------------------------------------------------------------------------

template <typename T>
json optional_json(const std::optional<T>& v)
{
  return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> optional_from(const json& j)
{
  return j.is_null() ? std::nullopt : std::optional<T>(j.get<T>());
}

inline json to_json(const ViolationEvent& v)
{
  return {{"frame", v.frame},
          {"kind", std::string(to_string(v.kind))},
          {"penalty", v.penalty},
          {"subject", v.subject},
          {"onset_frame", optional_json(v.onset_frame)}};
}

inline ViolationEvent violation_from_json(const json& j)
{
  ViolationEvent v;
  v.frame = j.at("frame").get<int>();
  const auto k = violation_kind_from_string(j.at("kind").get<std::string>());
  if (!k) {
    throw std::invalid_argument("unknown violation kind " + j.at("kind").dump());
  }
  v.kind = *k;
  v.penalty = j.at("penalty").get<double>();
  v.subject = j.at("subject").get<std::string>();
  v.onset_frame = optional_from<int>(j.at("onset_frame"));
  return v;
}

inline std::optional<TakeoverCause> cause_from_string(const std::string& s)
{
  for (auto c : {TakeoverCause::Collision, TakeoverCause::Signal, TakeoverCause::Stall}) {
    if (to_string(c) == s) {
      return c;
    }
  }
  return std::nullopt;
}

inline json cause_json(const std::optional<TakeoverCause>& c)
{
  return c ? json(std::string(to_string(*c))) : json(nullptr);
}

inline std::optional<TakeoverCause> cause_from_json(const json& j)
{
  if (j.is_null()) {
    return std::nullopt;
  }
  const auto c = cause_from_string(j.get<std::string>());
  if (!c) {
    throw std::invalid_argument("unknown takeover cause " + j.dump());
  }
  return c;
}

inline json to_json(const HazardReport& h)
{
  return {{"frame", h.frame},
          {"C", optional_json(h.min_collision_frame)},
          {"collision", h.collision_flag},
          {"signal", h.sigvio_flag},
          {"stall", h.stalling_flag},
          {"colliding", h.colliding_actors},
          {"regions", h.violated_regions}};
}

inline HazardReport hazard_from_json(const json& j)
{
  HazardReport h;
  h.frame = j.at("frame").get<int>();
  h.min_collision_frame = optional_from<int>(j.at("C"));
  h.collision_flag = j.at("collision").get<bool>();
  h.sigvio_flag = j.at("signal").get<bool>();
  h.stalling_flag = j.at("stall").get<bool>();
  h.colliding_actors = j.at("colliding").get<std::vector<std::string>>();
  h.violated_regions = j.at("regions").get<std::vector<std::string>>();
  return h;
}

inline json to_json(const FrameRecord& r)
{
  json j;
  j["frame"] = r.frame;
  j["snapshot_digest"] = hex64(r.snapshot_digest);
  j["ego"] = json::array({r.ego.x, r.ego.y, r.ego.theta, r.ego.v});
  j["hazard"] = r.hazard ? to_json(*r.hazard) : json(nullptr);
  if (r.queues) {
    j["queues"] = {{"collision", r.queues->collision},
                   {"signal", r.queues->signal},
                   {"stall", r.queues->stall},
                   {"recovery", r.queues->recovery}};
  } else {
    j["queues"] = nullptr;
  }
  j["decision"] = {{"dispatch", r.decision.dispatch_ads_trajectory},
                   {"activate", r.decision.activate_mitigator},
                   {"returned", r.decision.control_returned},
                   {"takeover", r.decision.takeover_fired}};
  j["owner"] = std::string(to_string(r.owner));
  j["cause"] = cause_json(r.cause);
  json wps = json::array();
  for (const auto& w : r.dispatched.waypoints) {
    wps.push_back(json::array({w.x, w.y}));
  }
  j["trajectory"] = {{"source", std::string(to_string(r.dispatched.source))},
                     {"desired_speed", r.dispatched.desired_speed},
                     {"plan_step", r.dispatched.plan_step},
                     {"waypoints", wps}};
  j["command"] = json::array({r.command.accel, r.command.steer});
  json leads = json::array();
  for (const auto& l : r.leads) {
    leads.push_back({{"id", l.id},
                     {"gap", l.net_gap},
                     {"rel_speed", l.rel_speed},
                     {"virtual", l.is_virtual}});
  }
  j["leads"] = leads;
  j["blocked_cells"] = r.blocked_cells;
  j["unreachable"] = r.unreachable;
  json vio = json::array();
  for (const auto& v : r.violations) {
    vio.push_back(to_json(v));
  }
  j["violations"] = vio;
  j["speed_after"] = r.speed_after;
  j["progress"] = r.progress;
  j["world_digest"] = hex64(r.world_digest);
  return j;
}

/// Digest of a record's content (every field except the digest itself).
inline std::uint64_t record_digest(const FrameRecord& r) { return digest_of(to_json(r)); }

inline json record_line(const FrameRecord& r)
{
  json j = to_json(r);
  j["digest"] = hex64(r.digest);
  return j;
}

inline FrameRecord record_from_json(const json& j)
{
  FrameRecord r;
  r.frame = j.at("frame").get<int>();
  r.snapshot_digest = parse_hex64(j.at("snapshot_digest").get<std::string>());
  const json& e = j.at("ego");
  r.ego = {e.at(0).get<double>(), e.at(1).get<double>(), e.at(2).get<double>(),
           e.at(3).get<double>()};
  if (!j.at("hazard").is_null()) {
    r.hazard = hazard_from_json(j.at("hazard"));
  }
  if (!j.at("queues").is_null()) {
    const json& q = j.at("queues");
    r.queues = QueueSnapshot{q.at("collision").get<std::vector<std::int8_t>>(),
                             q.at("signal").get<std::vector<std::int8_t>>(),
                             q.at("stall").get<std::vector<std::int8_t>>(),
                             q.at("recovery").get<std::vector<std::int8_t>>()};
  }
  const json& d = j.at("decision");
  r.decision = {d.at("dispatch").get<bool>(), d.at("activate").get<bool>(),
                d.at("returned").get<bool>(), d.at("takeover").get<bool>()};
  const std::string owner = j.at("owner").get<std::string>();
  if (owner != "ADS" && owner != "MITIGATOR") {
    throw std::invalid_argument("unknown owner '" + owner + "'");
  }
  r.owner = owner == "ADS" ? Owner::Ads : Owner::Mitigator;
  r.cause = cause_from_json(j.at("cause"));
  const json& t = j.at("trajectory");
  r.dispatched.source = t.at("source").get<std::string>() == "ADS" ? TrajectorySource::Ads
                                                                   : TrajectorySource::Mitigator;
  r.dispatched.desired_speed = t.at("desired_speed").get<double>();
  r.dispatched.plan_step = t.at("plan_step").get<double>();
  for (const auto& w : t.at("waypoints")) {
    r.dispatched.waypoints.push_back({w.at(0).get<double>(), w.at(1).get<double>()});
  }
  r.command = {j.at("command").at(0).get<double>(), j.at("command").at(1).get<double>()};
  for (const auto& l : j.at("leads")) {
    r.leads.push_back({l.at("id").get<std::string>(), l.at("gap").get<double>(),
                       l.at("rel_speed").get<double>(), l.at("virtual").get<bool>()});
  }
  r.blocked_cells = j.at("blocked_cells").get<std::size_t>();
  r.unreachable = j.at("unreachable").get<bool>();
  for (const auto& v : j.at("violations")) {
    r.violations.push_back(violation_from_json(v));
  }
  r.speed_after = j.at("speed_after").get<double>();
  r.progress = j.at("progress").get<double>();
  r.world_digest = parse_hex64(j.at("world_digest").get<std::string>());
  r.digest = parse_hex64(j.at("digest").get<std::string>());
  return r;
}

inline json to_json(const RunReport& r)
{
  json vio = json::array();
  for (const auto& v : r.violations) {
    vio.push_back(to_json(v));
  }
  json tk = json::array();
  for (const auto& t : r.takeovers) {
    tk.push_back({{"frame", t.frame},
                  {"cause", std::string(to_string(t.cause))},
                  {"return_frame", optional_json(t.return_frame)}});
  }
  return {{"scenario", r.scenario},
          {"argus", r.argus},
          {"noise", r.noise},
          {"route_completion", r.route_completion},
          {"infraction_score", r.infraction_score},
          {"driving_score", r.driving_score},
          {"success", r.success},
          {"violations", vio},
          {"distance_km", r.distance_km},
          {"takeovers", tk},
          {"eq8_violations", r.eq8_violations},
          {"frames", r.frames},
          {"end_reason", std::string(to_string(r.end_reason))}};
}

inline RunReport report_from_json(const json& j)
{
  RunReport r;
  r.scenario = j.at("scenario").get<std::string>();
  r.argus = j.at("argus").get<bool>();
  r.noise = j.at("noise").get<bool>();
  r.route_completion = j.at("route_completion").get<double>();
  r.infraction_score = j.at("infraction_score").get<double>();
  r.driving_score = j.at("driving_score").get<double>();
  r.success = j.at("success").get<bool>();
  for (const auto& v : j.at("violations")) {
    r.violations.push_back(violation_from_json(v));
  }
  r.distance_km = j.at("distance_km").get<double>();
  for (const auto& t : j.at("takeovers")) {
    const auto c = cause_from_string(t.at("cause").get<std::string>());
    if (!c) {
      throw std::invalid_argument("unknown takeover cause");
    }
    r.takeovers.push_back({t.at("frame").get<int>(), *c, optional_from<int>(t.at("return_frame"))});
  }
  r.eq8_violations = j.at("eq8_violations").get<int>();
  r.frames = j.at("frames").get<int>();
  const auto er = end_reason_from_string(j.at("end_reason").get<std::string>());
  if (!er) {
    throw std::invalid_argument("unknown end_reason");
  }
  r.end_reason = *er;
  return r;
}

}  // namespace argus::sim

#pragma once
/**
 * @file scenario.hpp
 * @brief Scenario description, JSON loading with located errors, and world initialization.
 *
 * Units: meters, radians, m/s, frames. Poses are written as [x, y, theta].
 */

#include <argus/world.hpp>

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace argus {

inline constexpr int kScenarioSchemaVersion = 1;

enum class AdsKind { ObliviousFollower, SignalIgnorer, Freezer, Swerver };

inline std::string_view to_string(AdsKind k)
{
  switch (k) {
    case AdsKind::ObliviousFollower: return "oblivious-follower";
    case AdsKind::SignalIgnorer: return "signal-ignorer";
    case AdsKind::Freezer: return "freezer";
    case AdsKind::Swerver: return "swerver";
  }
  return "unknown";
}

inline std::optional<AdsKind> ads_kind_from_string(std::string_view s)
{
  if (s == "oblivious-follower") return AdsKind::ObliviousFollower;
  if (s == "signal-ignorer") return AdsKind::SignalIgnorer;
  if (s == "freezer") return AdsKind::Freezer;
  if (s == "swerver") return AdsKind::Swerver;
  return std::nullopt;
}

/// Script parameters of the stand-in ADS.
struct AdsSpec
{
  AdsKind kind{AdsKind::ObliviousFollower};
  double cruise_speed{10.0};
  double follow_headway{1.5};    ///< signal-ignorer: time gap kept to vehicles ahead, seconds
  double freeze_distance{30.0};  ///< freezer: blocking object range that makes it stop
  int swerve_frame{0};           ///< swerver: frame from which it steers into the adjacent lane
  double swerve_offset{3.5};     ///< swerver: lateral offset of its waypoints, left positive
};

struct EgoSpec
{
  Pose2 pose;
  double speed{0.0};
  double length{4.5};
  double width{2.0};
  double wheelbase{2.7};
};

struct ActorSpec
{
  std::string id;
  ActorKind kind{ActorKind::Vehicle};
  double length{4.5};
  double width{2.0};
  std::optional<Pose2> pose;  ///< required unless the behavior places the actor on a lane
  Behavior behavior;
};

struct Scenario
{
  int schema_version{kScenarioSchemaVersion};
  std::string name;
  double frame_rate{20.0};
  double time_limit{60.0};
  std::uint64_t seed{0};
  std::shared_ptr<const RoadMap> map;
  Polyline route;
  EgoSpec ego;
  AdsSpec ads;
  std::vector<ActorSpec> actors;
  std::vector<StopSignal> signals;
  std::optional<NoiseParams> noise;

  [[nodiscard]] double dt() const { return 1.0 / frame_rate; }
  [[nodiscard]] double route_length() const { return route.length(); }
  [[nodiscard]] int frame_limit() const
  {
    return static_cast<int>(std::llround(time_limit * frame_rate));
  }
};

/// Any failure to turn a file into a valid Scenario. `location` is "<file>:<json-pointer>".
class ScenarioError : public std::runtime_error
{
public:
  enum class Kind { Io, Parse, Schema, DanglingReference };

  ScenarioError(Kind kind, std::string location, const std::string& what)
  : std::runtime_error(location + ": " + what), kind_(kind), location_(std::move(location))
  {
  }

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] const std::string& location() const { return location_; }

private:
  Kind kind_;
  std::string location_;
};

namespace detail {

using nlohmann::json;

class ScenarioReader
{
public:
  explicit ScenarioReader(std::string origin) : origin_(std::move(origin)) {}

  [[noreturn]] void fail(ScenarioError::Kind k, const std::string& ptr, const std::string& msg) const
  {
    throw ScenarioError(k, origin_ + ":" + (ptr.empty() ? "/" : ptr), msg);
  }

  const json& field(const json& obj, const std::string& ptr, const char* key) const
  {
    if (!obj.is_object() || !obj.contains(key)) {
      fail(ScenarioError::Kind::Schema, ptr, std::string("missing required field '") + key + "'");
    }
    return obj.at(key);
  }

  double number(const json& j, const std::string& ptr) const
  {
    if (!j.is_number()) {
      fail(ScenarioError::Kind::Schema, ptr, "expected a number");
    }
    const double v = j.get<double>();
    if (!std::isfinite(v)) {
      fail(ScenarioError::Kind::Schema, ptr, "expected a finite number");
    }
    return v;
  }

  double number(const json& obj, const std::string& ptr, const char* key) const
  {
    return number(field(obj, ptr, key), ptr + "/" + key);
  }

  double number_or(const json& obj, const std::string& ptr, const char* key, double dflt) const
  {
    return obj.contains(key) ? number(obj.at(key), ptr + "/" + key) : dflt;
  }

  double positive(const json& obj, const std::string& ptr, const char* key, double dflt) const
  {
    const double v = number_or(obj, ptr, key, dflt);
    if (!(v > 0.0)) {
      fail(ScenarioError::Kind::Schema, ptr + "/" + key, "must be > 0");
    }
    return v;
  }

  double non_negative(const json& obj, const std::string& ptr, const char* key, double dflt) const
  {
    const double v = number_or(obj, ptr, key, dflt);
    if (!(v >= 0.0)) {
      fail(ScenarioError::Kind::Schema, ptr + "/" + key, "must be >= 0");
    }
    return v;
  }

  int integer_or(const json& obj, const std::string& ptr, const char* key, int dflt) const
  {
    if (!obj.contains(key)) {
      return dflt;
    }
    const json& j = obj.at(key);
    if (!j.is_number_integer()) {
      fail(ScenarioError::Kind::Schema, ptr + "/" + key, "expected an integer");
    }
    return j.get<int>();
  }

  std::string string(const json& obj, const std::string& ptr, const char* key) const
  {
    const json& j = field(obj, ptr, key);
    if (!j.is_string()) {
      fail(ScenarioError::Kind::Schema, ptr + "/" + key, "expected a string");
    }
    return j.get<std::string>();
  }

  Vec2 point(const json& j, const std::string& ptr) const
  {
    if (!j.is_array() || j.size() != 2) {
      fail(ScenarioError::Kind::Schema, ptr, "expected [x, y]");
    }
    return {number(j[0], ptr + "/0"), number(j[1], ptr + "/1")};
  }

  Pose2 pose(const json& j, const std::string& ptr) const
  {
    if (!j.is_array() || j.size() != 3) {
      fail(ScenarioError::Kind::Schema, ptr, "expected [x, y, theta]");
    }
    return Pose2(number(j[0], ptr + "/0"), number(j[1], ptr + "/1"), number(j[2], ptr + "/2"));
  }

  Polyline polyline(const json& j, const std::string& ptr) const
  {
    if (!j.is_array() || j.size() < 2) {
      fail(ScenarioError::Kind::Schema, ptr, "expected an array of at least 2 points");
    }
    std::vector<Vec2> pts;
    for (std::size_t i = 0; i < j.size(); ++i) {
      pts.push_back(point(j[i], ptr + "/" + std::to_string(i)));
    }
    try {
      return Polyline(std::move(pts));
    } catch (const std::invalid_argument& e) {
      fail(ScenarioError::Kind::Schema, ptr, e.what());
    }
  }

  const Lane& lane_ref(const RoadMap& map, const json& obj, const std::string& ptr,
                       const char* key) const
  {
    const std::string id = string(obj, ptr, key);
    const Lane* lane = map.find_lane(id);
    if (lane == nullptr) {
      fail(ScenarioError::Kind::DanglingReference, ptr + "/" + key, "unknown lane '" + id + "'");
    }
    return *lane;
  }

  Behavior behavior(const json& j, const std::string& ptr, const RoadMap& map) const
  {
    const std::string type = string(j, ptr, "type");
    if (type == "static") {
      return StaticBehavior{};
    }
    if (type == "lane_follow" || type == "red_light_runner") {
      LaneFollowBehavior b;
      b.lane = lane_ref(map, j, ptr, "lane").id;
      b.speed = non_negative(j, ptr, "speed", 10.0);
      b.station = number_or(j, ptr, "station", 0.0);
      b.start_frame = integer_or(j, ptr, "start_frame", 0);
      if (type == "red_light_runner" && !j.contains("start_frame")) {
        fail(ScenarioError::Kind::Schema, ptr, "red_light_runner needs 'start_frame'");
      }
      return b;
    }
    if (type == "lane_cut") {
      LaneCutBehavior b;
      b.from_lane = lane_ref(map, j, ptr, "from_lane").id;
      b.to_lane = lane_ref(map, j, ptr, "to_lane").id;
      b.speed = non_negative(j, ptr, "speed", 10.0);
      b.station = number_or(j, ptr, "station", 0.0);
      b.cut_frame = integer_or(j, ptr, "cut_frame", 0);
      b.cut_duration = non_negative(j, ptr, "cut_duration", 2.0);
      if (j.contains("brake_to")) {
        b.brake_to = non_negative(j, ptr, "brake_to", 0.0);
      }
      b.decel = positive(j, ptr, "decel", 3.0);
      return b;
    }
    if (type == "crossing_pedestrian") {
      CrossingPedestrianBehavior b;
      b.speed = non_negative(j, ptr, "speed", 1.4);
      b.start_frame = integer_or(j, ptr, "start_frame", 0);
      if (j.contains("pause_after")) {
        b.pause_after = non_negative(j, ptr, "pause_after", 0.0);
      }
      b.pause_frames = integer_or(j, ptr, "pause_frames", 0);
      return b;
    }
    fail(ScenarioError::Kind::DanglingReference, ptr + "/type", "unknown behavior '" + type + "'");
  }

private:
  std::string origin_;
};

inline json pose_json(const Pose2& p) { return json::array({p.x, p.y, p.theta}); }
inline json point_json(Vec2 p) { return json::array({p.x, p.y}); }

inline json polyline_json(const Polyline& pl)
{
  json arr = json::array();
  for (const auto& p : pl.points()) {
    arr.push_back(point_json(p));
  }
  return arr;
}

}  // namespace detail

/// Parses and validates a scenario document. `origin` prefixes error locations.
inline Scenario parse_scenario(const nlohmann::json& doc, const std::string& origin = "<memory>")
{
  using detail::json;
  const detail::ScenarioReader r(origin);
  if (!doc.is_object()) {
    r.fail(ScenarioError::Kind::Schema, "", "scenario must be a JSON object");
  }
  Scenario s;
  const int version = r.integer_or(doc, "", "schema_version", -1);
  if (version != kScenarioSchemaVersion) {
    r.fail(ScenarioError::Kind::Schema, "/schema_version",
           "unsupported schema_version " + std::to_string(version) + " (expected " +
             std::to_string(kScenarioSchemaVersion) + ")");
  }
  s.name = doc.contains("name") ? r.string(doc, "", "name") : std::string("unnamed");
  s.frame_rate = r.positive(doc, "", "frame_rate", 20.0);
  s.time_limit = r.positive(doc, "", "time_limit", 60.0);
  if (doc.contains("seed")) {
    if (!doc.at("seed").is_number_unsigned() && !doc.at("seed").is_number_integer()) {
      r.fail(ScenarioError::Kind::Schema, "/seed", "expected a non-negative integer");
    }
    s.seed = doc.at("seed").get<std::uint64_t>();
  }

  auto map = std::make_shared<RoadMap>();
  const json& jmap = r.field(doc, "", "map");
  const json& jlanes = r.field(jmap, "/map", "lanes");
  if (!jlanes.is_array() || jlanes.empty()) {
    r.fail(ScenarioError::Kind::Schema, "/map/lanes", "expected a non-empty array");
  }
  for (std::size_t i = 0; i < jlanes.size(); ++i) {
    const std::string ptr = "/map/lanes/" + std::to_string(i);
    Lane lane;
    lane.id = r.string(jlanes[i], ptr, "id");
    if (map->find_lane(lane.id) != nullptr) {
      r.fail(ScenarioError::Kind::Schema, ptr + "/id", "duplicate lane id '" + lane.id + "'");
    }
    lane.centerline = r.polyline(r.field(jlanes[i], ptr, "points"), ptr + "/points");
    lane.width = r.positive(jlanes[i], ptr, "width", 3.5);
    lane.speed_limit = r.positive(jlanes[i], ptr, "speed_limit", 13.9);
    map->lanes.push_back(std::move(lane));
  }
  if (jmap.contains("boundaries")) {
    const json& jb = jmap.at("boundaries");
    if (!jb.is_array()) {
      r.fail(ScenarioError::Kind::Schema, "/map/boundaries", "expected an array");
    }
    for (std::size_t i = 0; i < jb.size(); ++i) {
      map->boundaries.push_back(r.polyline(jb[i], "/map/boundaries/" + std::to_string(i)));
    }
  }
  s.map = map;

  s.route = r.polyline(r.field(doc, "", "route"), "/route");

  const json& je = r.field(doc, "", "ego");
  s.ego.pose = r.pose(r.field(je, "/ego", "pose"), "/ego/pose");
  s.ego.speed = r.non_negative(je, "/ego", "speed", 0.0);
  s.ego.length = r.positive(je, "/ego", "length", 4.5);
  s.ego.width = r.positive(je, "/ego", "width", 2.0);
  s.ego.wheelbase = r.positive(je, "/ego", "wheelbase", 2.7);

  if (doc.contains("ads")) {
    const json& ja = doc.at("ads");
    const std::string kind = r.string(ja, "/ads", "kind");
    const auto k = ads_kind_from_string(kind);
    if (!k) {
      r.fail(ScenarioError::Kind::DanglingReference, "/ads/kind", "unknown ADS kind '" + kind + "'");
    }
    s.ads.kind = *k;
    s.ads.cruise_speed = r.non_negative(ja, "/ads", "cruise_speed", 10.0);
    s.ads.follow_headway = r.positive(ja, "/ads", "follow_headway", 1.5);
    s.ads.freeze_distance = r.positive(ja, "/ads", "freeze_distance", 30.0);
    s.ads.swerve_frame = r.integer_or(ja, "/ads", "swerve_frame", 0);
    s.ads.swerve_offset = r.number_or(ja, "/ads", "swerve_offset", 3.5);
  }

  if (doc.contains("actors")) {
    const json& ja = doc.at("actors");
    if (!ja.is_array()) {
      r.fail(ScenarioError::Kind::Schema, "/actors", "expected an array");
    }
    for (std::size_t i = 0; i < ja.size(); ++i) {
      const std::string ptr = "/actors/" + std::to_string(i);
      ActorSpec a;
      a.id = r.string(ja[i], ptr, "id");
      if (a.id == "ego") {
        r.fail(ScenarioError::Kind::Schema, ptr + "/id", "id 'ego' is reserved");
      }
      for (const auto& other : s.actors) {
        if (other.id == a.id) {
          r.fail(ScenarioError::Kind::Schema, ptr + "/id", "duplicate actor id '" + a.id + "'");
        }
      }
      const std::string kind = r.string(ja[i], ptr, "kind");
      const auto k = actor_kind_from_string(kind);
      if (!k || *k == ActorKind::Ego) {
        r.fail(ScenarioError::Kind::Schema, ptr + "/kind", "invalid actor kind '" + kind + "'");
      }
      a.kind = *k;
      a.length = r.positive(ja[i], ptr, "length", a.kind == ActorKind::Pedestrian ? 0.6 : 4.5);
      a.width = r.positive(ja[i], ptr, "width", a.kind == ActorKind::Pedestrian ? 0.6 : 2.0);
      if (ja[i].contains("pose")) {
        a.pose = r.pose(ja[i].at("pose"), ptr + "/pose");
      }
      a.behavior = ja[i].contains("behavior")
                     ? r.behavior(ja[i].at("behavior"), ptr + "/behavior", *map)
                     : Behavior{StaticBehavior{}};
      const bool on_lane = std::holds_alternative<LaneFollowBehavior>(a.behavior) ||
                           std::holds_alternative<LaneCutBehavior>(a.behavior);
      if (!on_lane && !a.pose) {
        r.fail(ScenarioError::Kind::Schema, ptr, "missing required field 'pose'");
      }
      if (a.kind == ActorKind::StaticObstacle && !std::holds_alternative<StaticBehavior>(a.behavior)) {
        r.fail(ScenarioError::Kind::Schema, ptr + "/behavior", "static obstacles cannot move");
      }
      s.actors.push_back(std::move(a));
    }
  }

  if (doc.contains("signals")) {
    const json& js = doc.at("signals");
    if (!js.is_array()) {
      r.fail(ScenarioError::Kind::Schema, "/signals", "expected an array");
    }
    for (std::size_t i = 0; i < js.size(); ++i) {
      const std::string ptr = "/signals/" + std::to_string(i);
      StopSignal sig;
      sig.id = r.string(js[i], ptr, "id");
      const std::string kind = r.string(js[i], ptr, "kind");
      const auto k = signal_kind_from_string(kind);
      if (!k) {
        r.fail(ScenarioError::Kind::Schema, ptr + "/kind", "invalid signal kind '" + kind + "'");
      }
      sig.kind = *k;
      const Lane& lane = r.lane_ref(*map, js[i], ptr, "lane");
      sig.lane_ref = lane.id;
      if (js[i].contains("pose")) {
        sig.pose = r.pose(js[i].at("pose"), ptr + "/pose");
      } else {
        sig.pose = lane.centerline.pose_at(r.number(js[i], ptr, "station"));
      }
      if (js[i].contains("green_frame")) {
        sig.green_frame = r.integer_or(js[i], ptr, "green_frame", 0);
      }
      s.signals.push_back(std::move(sig));
    }
  }

  if (doc.contains("noise") && !doc.at("noise").is_null()) {
    const json& jn = doc.at("noise");
    NoiseParams n;
    n.position_sigma = r.non_negative(jn, "/noise", "position_sigma", 0.0);
    n.heading_sigma = r.non_negative(jn, "/noise", "heading_sigma", 0.0);
    n.speed_sigma = r.non_negative(jn, "/noise", "speed_sigma", 0.0);
    n.drop_probability = r.non_negative(jn, "/noise", "drop_probability", 0.0);
    if (n.drop_probability > 1.0) {
      r.fail(ScenarioError::Kind::Schema, "/noise/drop_probability", "must be <= 1");
    }
    s.noise = n;
  }
  return s;
}

inline Scenario load_scenario(const std::string& path)
{
  std::ifstream in(path);
  if (!in) {
    throw ScenarioError(ScenarioError::Kind::Io, path, "cannot open scenario file");
  }
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ScenarioError(ScenarioError::Kind::Parse, path + ":byte " + std::to_string(e.byte),
                        e.what());
  }
  return parse_scenario(doc, path);
}

/// Inverse of parse_scenario; parse_scenario(to_json(s)) reproduces s.
inline nlohmann::json to_json(const Scenario& s)
{
  using detail::json;
  json doc;
  doc["schema_version"] = s.schema_version;
  doc["name"] = s.name;
  doc["frame_rate"] = s.frame_rate;
  doc["time_limit"] = s.time_limit;
  doc["seed"] = s.seed;
  json lanes = json::array();
  for (const auto& lane : s.map->lanes) {
    lanes.push_back({{"id", lane.id},
                     {"points", detail::polyline_json(lane.centerline)},
                     {"width", lane.width},
                     {"speed_limit", lane.speed_limit}});
  }
  json bounds = json::array();
  for (const auto& b : s.map->boundaries) {
    bounds.push_back(detail::polyline_json(b));
  }
  doc["map"] = {{"lanes", lanes}, {"boundaries", bounds}};
  doc["route"] = detail::polyline_json(s.route);
  doc["ego"] = {{"pose", detail::pose_json(s.ego.pose)},
                {"speed", s.ego.speed},
                {"length", s.ego.length},
                {"width", s.ego.width},
                {"wheelbase", s.ego.wheelbase}};
  doc["ads"] = {{"kind", std::string(to_string(s.ads.kind))},
                {"cruise_speed", s.ads.cruise_speed},
                {"follow_headway", s.ads.follow_headway},
                {"freeze_distance", s.ads.freeze_distance},
                {"swerve_frame", s.ads.swerve_frame},
                {"swerve_offset", s.ads.swerve_offset}};
  json actors = json::array();
  for (const auto& a : s.actors) {
    json ja = {{"id", a.id},
               {"kind", std::string(to_string(a.kind))},
               {"length", a.length},
               {"width", a.width}};
    if (a.pose) {
      ja["pose"] = detail::pose_json(*a.pose);
    }
    json jb = std::visit(
      [](const auto& b) -> json {
        using B = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<B, StaticBehavior>) {
          return {{"type", "static"}};
        } else if constexpr (std::is_same_v<B, LaneFollowBehavior>) {
          return {{"type", "lane_follow"},
                  {"lane", b.lane},
                  {"speed", b.speed},
                  {"station", b.station},
                  {"start_frame", b.start_frame}};
        } else if constexpr (std::is_same_v<B, LaneCutBehavior>) {
          json j = {{"type", "lane_cut"},       {"from_lane", b.from_lane},
                    {"to_lane", b.to_lane},     {"speed", b.speed},
                    {"station", b.station},     {"cut_frame", b.cut_frame},
                    {"cut_duration", b.cut_duration}, {"decel", b.decel}};
          if (b.brake_to) {
            j["brake_to"] = *b.brake_to;
          }
          return j;
        } else {
          json j = {{"type", "crossing_pedestrian"},
                    {"speed", b.speed},
                    {"start_frame", b.start_frame},
                    {"pause_frames", b.pause_frames}};
          if (b.pause_after) {
            j["pause_after"] = *b.pause_after;
          }
          return j;
        }
      },
      a.behavior);
    ja["behavior"] = jb;
    actors.push_back(ja);
  }
  doc["actors"] = actors;
  json sigs = json::array();
  for (const auto& sig : s.signals) {
    json js = {{"id", sig.id},
               {"kind", std::string(to_string(sig.kind))},
               {"lane", sig.lane_ref},
               {"pose", detail::pose_json(sig.pose)}};
    if (sig.green_frame) {
      js["green_frame"] = *sig.green_frame;
    }
    sigs.push_back(js);
  }
  doc["signals"] = sigs;
  if (s.noise) {
    doc["noise"] = {{"position_sigma", s.noise->position_sigma},
                    {"heading_sigma", s.noise->heading_sigma},
                    {"speed_sigma", s.noise->speed_sigma},
                    {"drop_probability", s.noise->drop_probability}};
  }
  return doc;
}

/// Ground-truth world at frame 0.
inline WorldState make_world(const Scenario& s)
{
  WorldState w;
  w.frame = 0;
  w.dt = s.dt();
  w.map = s.map;
  w.ego.participant = {"ego", ActorKind::Ego,
                       OrientedBox(s.ego.pose, s.ego.length, s.ego.width, s.ego.speed)};
  w.ego.wheelbase = s.ego.wheelbase;
  for (const auto& spec : s.actors) {
    ActorState a;
    a.behavior = spec.behavior;
    const Pose2 start = spec.pose.value_or(Pose2{});
    a.participant = {spec.id, spec.kind, OrientedBox(start, spec.length, spec.width, 0.0)};
    a.origin = start;
    std::visit(
      [&](const auto& b) {
        using B = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<B, LaneFollowBehavior>) {
          a.progress = b.station;
          a.speed = b.start_frame > 0 ? 0.0 : b.speed;
        } else if constexpr (std::is_same_v<B, LaneCutBehavior>) {
          a.progress = b.station;
          a.speed = b.speed;
        } else if constexpr (std::is_same_v<B, CrossingPedestrianBehavior>) {
          a.speed = b.start_frame > 0 ? 0.0 : b.speed;
        }
      },
      a.behavior);
    place_actor(a, *w.map, 0, w.dt);
    w.actors.push_back(std::move(a));
  }
  w.signals = s.signals;
  for (auto& sig : w.signals) {
    if (sig.kind == SignalKind::RedLight && sig.green_frame && *sig.green_frame <= 0) {
      sig.active = false;
    }
  }
  return w;
}

}  // namespace argus

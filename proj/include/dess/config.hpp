#pragma once

#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "dess/errors.hpp"
#include "dess/geometry.hpp"
#include "dess/planner.hpp"
#include "dess/simulator.hpp"
#include "json.hpp"

namespace dess {

/// Static-camera planning benchmark over random obstacle fields.
struct BenchSettings {
  int scenarios = 100;
  std::vector<double> budgets_ms{1.0, 2.0, 5.0, 10.0, 20.0};
  int min_spheres = 10;
  int max_spheres = 40;
  double min_radius = 0.1;
  double max_radius = 1.0;
  double shell_near = 0.5;  ///< sphere centres are drawn at camera depths in [near, far]
  double shell_far = 6.0;
  int ldens_points = 100000;
  double goal_distance = 10.0;

  void validate() const {
    if (scenarios <= 0) throw ConfigError("bench.scenarios must be positive");
    if (budgets_ms.empty()) throw ConfigError("bench.budgets_ms must not be empty");
    for (double b : budgets_ms) {
      if (!(b > 0.0)) throw ConfigError("bench.budgets_ms entries must be positive");
    }
    if (min_spheres < 0 || max_spheres < min_spheres) {
      throw ConfigError("bench sphere counts must satisfy 0 <= min_spheres <= max_spheres");
    }
    if (!(min_radius > 0.0) || max_radius < min_radius) {
      throw ConfigError("bench radii must satisfy 0 < min_radius <= max_radius");
    }
    if (!(shell_near > 0.0) || !(shell_far > shell_near)) {
      throw ConfigError("bench shell must satisfy 0 < shell_near < shell_far");
    }
    if (ldens_points <= 0) throw ConfigError("bench.ldens_points must be positive");
    if (!(goal_distance > 0.0)) throw ConfigError("bench.goal_distance must be positive");
  }
};

/// Closed-loop navigation trials.
struct NavigateSettings {
  int trials = 100;
  std::vector<std::string> scenarios{"easy", "medium", "hard"};
  std::vector<Policy> policies{Policy::Dess, Policy::FixedYawing};

  void validate() const {
    if (trials <= 0) throw ConfigError("navigate.trials must be positive");
    if (scenarios.empty()) throw ConfigError("navigate.scenarios must not be empty");
    if (policies.empty()) throw ConfigError("navigate.policies must not be empty");
  }
};

/// Single-frame render for inspection.
struct RenderSettings {
  std::string scenario = "hard";
  std::uint64_t scenario_seed = 0;
  Vec3 position{0.0, 0.0, 1.0};
  double yaw = 0.0;
};

/// Scenario names accepted by navigate and render besides the three levels.
inline bool known_scenario(const std::string& name) {
  return parse_level(name).has_value() || name == "wall" || name == "spheroid" ||
         name == "empty" || name == "bench";
}

struct Config {
  std::uint64_t seed = 1;
  unsigned threads = 0;  ///< 0: one per hardware thread
  std::string hardware_tag;
  EpisodeConfig episode;
  ScenarioParams scenario;
  double candidates_per_ms = 2000.0;  ///< budget conversion in candidate-count mode
  BenchSettings bench;
  NavigateSettings navigate;
  RenderSettings render;

  unsigned worker_count() const {
    if (threads > 0) return threads;
    return std::max(1u, std::thread::hardware_concurrency());
  }

  void validate() const {
    try {
      episode.validate();
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
    if (!(candidates_per_ms > 0.0)) throw ConfigError("planner.candidates_per_ms must be positive");
    bench.validate();
    navigate.validate();
    for (const auto& s : navigate.scenarios) {
      if (!known_scenario(s) || s == "bench") {
        throw ConfigError("navigate.scenarios: unknown scenario '" + s + "'");
      }
    }
    if (!known_scenario(render.scenario)) {
      throw ConfigError("render.scenario: unknown scenario '" + render.scenario + "'");
    }
    if (!(scenario.min_diameter > 0.0) || scenario.max_diameter < scenario.min_diameter) {
      throw ConfigError("scenario diameters must satisfy 0 < min_diameter <= max_diameter");
    }
  }
};

/// CPU model and thread count, for labelling wall-clock results.
inline std::string detect_hardware_tag() {
  std::string model = "unknown-cpu";
  std::ifstream cpuinfo("/proc/cpuinfo");
  std::string line;
  while (std::getline(cpuinfo, line)) {
    if (line.rfind("model name", 0) == 0) {
      const auto colon = line.find(':');
      if (colon != std::string::npos) {
        model = line.substr(line.find_first_not_of(" \t", colon + 1));
      }
      break;
    }
  }
  return model + " x" + std::to_string(std::max(1u, std::thread::hardware_concurrency()));
}

inline std::string_view to_string(BudgetMode m) {
  return m == BudgetMode::WallClock ? "wallclock" : "candidates";
}

inline std::optional<BudgetMode> parse_budget_mode(std::string_view s) {
  if (s == "wallclock") return BudgetMode::WallClock;
  if (s == "candidates") return BudgetMode::Candidates;
  return std::nullopt;
}

namespace detail {

using nlohmann::json;

/// Reads the members of one JSON object, rejecting unknown keys and
/// reporting type errors with the full field path.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + "expected an object");
  }

  bool has(const char* key) const { return j_.contains(key); }

  ObjectReader child(const char* key) {
    seen_.insert(key);
    return ObjectReader(j_.at(key), field(key));
  }

  void read(const char* key, double& out) {
    if (const json* v = get(key)) {
      if (!v->is_number()) fail(key, "expected a number");
      out = v->get<double>();
    }
  }
  void read(const char* key, int& out) {
    if (const json* v = get(key)) {
      if (!v->is_number_integer()) fail(key, "expected an integer");
      out = v->get<int>();
    }
  }
  void read(const char* key, unsigned& out) {
    if (const json* v = get(key)) {
      if (!v->is_number_unsigned()) fail(key, "expected a non-negative integer");
      out = v->get<unsigned>();
    }
  }
  void read(const char* key, std::uint64_t& out) {
    if (const json* v = get(key)) {
      if (!v->is_number_unsigned()) fail(key, "expected a non-negative integer");
      out = v->get<std::uint64_t>();
    }
  }
  void read(const char* key, bool& out) {
    if (const json* v = get(key)) {
      if (!v->is_boolean()) fail(key, "expected true or false");
      out = v->get<bool>();
    }
  }
  void read(const char* key, std::string& out) {
    if (const json* v = get(key)) {
      if (!v->is_string()) fail(key, "expected a string");
      out = v->get<std::string>();
    }
  }
  void read(const char* key, Vec3& out) {
    if (const json* v = get(key)) {
      if (!v->is_array() || v->size() != 3) fail(key, "expected an array of 3 numbers");
      for (const auto& e : *v) {
        if (!e.is_number()) fail(key, "expected an array of 3 numbers");
      }
      out = {(*v)[0].get<double>(), (*v)[1].get<double>(), (*v)[2].get<double>()};
    }
  }
  void read(const char* key, std::vector<double>& out) {
    if (const json* v = get(key)) {
      if (!v->is_array()) fail(key, "expected an array of numbers");
      out.clear();
      for (const auto& e : *v) {
        if (!e.is_number()) fail(key, "expected an array of numbers");
        out.push_back(e.get<double>());
      }
    }
  }
  void read(const char* key, std::vector<std::string>& out) {
    if (const json* v = get(key)) {
      if (!v->is_array()) fail(key, "expected an array of strings");
      out.clear();
      for (const auto& e : *v) {
        if (!e.is_string()) fail(key, "expected an array of strings");
        out.push_back(e.get<std::string>());
      }
    }
  }

  /// Rejects members that were never read.
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(field(it.key()) + ": unknown field");
    }
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ConfigError(field(key) + ": " + what);
  }

 private:
  const json* get(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }
  std::string field(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }
  std::string where() const { return path_.empty() ? "config: " : path_ + ": "; }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

inline json to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

}  // namespace detail

/// Parses a JSON config; absent fields keep their defaults.
inline Config parse_config(const std::string& text) {
  using detail::json;
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError("config line " + std::to_string(line) + ", column " + std::to_string(col) +
                      ": invalid JSON");
  }

  Config c;
  detail::ObjectReader r(root, "");
  r.read("seed", c.seed);
  r.read("threads", c.threads);
  r.read("hardware_tag", c.hardware_tag);

  PlannerConfig& p = c.episode.planner;
  if (r.has("camera")) {
    auto o = r.child("camera");
    o.read("width", p.intrinsics.width);
    o.read("height", p.intrinsics.height);
    o.read("focal_x", p.intrinsics.focal_x);
    o.read("focal_y", p.intrinsics.focal_y);
    o.read("center_x", p.intrinsics.center_x);
    o.read("center_y", p.intrinsics.center_y);
    o.finish();
  }
  if (r.has("vehicle")) {
    auto o = r.child("vehicle");
    o.read("radius", p.radius);
    o.read("desired_speed", p.v_des);
    o.read("peak_speed_factor", p.peak_speed_factor);
    o.read("yaw_rate_limit", c.episode.yaw_rate_limit);
    o.finish();
  }
  if (r.has("sampling")) {
    auto o = r.child("sampling");
    o.read("lower", p.bounds.lower);
    o.read("upper", p.bounds.upper);
    o.finish();
  }
  if (r.has("trajectory")) {
    auto o = r.child("trajectory");
    o.read("min_duration", p.durations.min_seconds);
    o.read("max_duration", p.durations.max_seconds);
    o.finish();
  }
  if (r.has("collision")) {
    auto o = r.child("collision");
    o.read("check_step", p.check_step);
    o.read("near_field", p.near_field);
    o.finish();
  }
  if (r.has("planner")) {
    auto o = r.child("planner");
    double budget_ms = p.budget * 1000.0;
    o.read("budget_ms", budget_ms);
    p.budget = budget_ms / 1000.0;
    std::string mode(to_string(p.budget_mode));
    o.read("budget_mode", mode);
    const auto parsed = parse_budget_mode(mode);
    if (!parsed) o.fail("budget_mode", "expected \"wallclock\" or \"candidates\"");
    p.budget_mode = *parsed;
    o.read("candidate_budget", p.candidate_budget);
    o.read("candidates_per_ms", c.candidates_per_ms);
    o.finish();
  }
  if (r.has("steering")) {
    auto o = r.child("steering");
    SteeringConfig& s = c.episode.steering;
    o.read("gain", s.gain);
    o.read("stuck_threshold", s.stuck_threshold);
    o.read("local_goal_distance", s.local_goal_distance);
    o.read("rest_position_tolerance", s.rest_position_tolerance);
    o.read("rest_speed_tolerance", s.rest_speed_tolerance);
    o.read("bearing_to_global_goal", s.bearing_to_global_goal);
    o.finish();
  }
  if (r.has("episode")) {
    auto o = r.child("episode");
    EpisodeConfig& e = c.episode;
    o.read("start", e.start);
    o.read("goal", e.goal);
    o.read("goal_radius", e.goal_radius);
    o.read("timeout", e.timeout);
    o.read("frame_rate", e.frame_rate);
    o.read("control_rate", e.control_rate);
    o.read("max_range", e.max_range);
    o.finish();
  }
  if (r.has("scenario")) {
    auto o = r.child("scenario");
    ScenarioParams& s = c.scenario;
    o.read("bounds_min", s.bounds.min);
    o.read("bounds_max", s.bounds.max);
    o.read("min_diameter", s.min_diameter);
    o.read("max_diameter", s.max_diameter);
    o.read("clearance", s.clearance);
    o.finish();
  }
  if (r.has("bench")) {
    auto o = r.child("bench");
    BenchSettings& b = c.bench;
    o.read("scenarios", b.scenarios);
    o.read("budgets_ms", b.budgets_ms);
    o.read("min_spheres", b.min_spheres);
    o.read("max_spheres", b.max_spheres);
    o.read("min_radius", b.min_radius);
    o.read("max_radius", b.max_radius);
    o.read("shell_near", b.shell_near);
    o.read("shell_far", b.shell_far);
    o.read("ldens_points", b.ldens_points);
    o.read("goal_distance", b.goal_distance);
    o.finish();
  }
  if (r.has("navigate")) {
    auto o = r.child("navigate");
    NavigateSettings& n = c.navigate;
    o.read("trials", n.trials);
    o.read("scenarios", n.scenarios);
    std::vector<std::string> policies;
    for (Policy pol : n.policies) policies.emplace_back(to_string(pol));
    o.read("policies", policies);
    n.policies.clear();
    for (const auto& name : policies) {
      const auto pol = parse_policy(name);
      if (!pol) o.fail("policies", "unknown policy '" + name + "'");
      n.policies.push_back(*pol);
    }
    o.finish();
  }
  if (r.has("render")) {
    auto o = r.child("render");
    RenderSettings& s = c.render;
    o.read("scenario", s.scenario);
    o.read("scenario_seed", s.scenario_seed);
    o.read("position", s.position);
    o.read("yaw", s.yaw);
    o.finish();
  }
  r.finish();

  c.scenario.start = c.episode.start;
  c.scenario.goal = c.episode.goal;
  c.scenario.vehicle_radius = p.radius;
  if (c.hardware_tag.empty()) c.hardware_tag = detect_hardware_tag();
  c.validate();
  return c;
}

inline Config load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("cannot read config file '" + path + "'");
  return parse_config(ss.str());
}

/// The effective configuration with every default filled in.
inline nlohmann::json to_json(const Config& c) {
  using detail::json;
  using detail::to_json;
  const EpisodeConfig& e = c.episode;
  const PlannerConfig& p = e.planner;
  const SteeringConfig& s = e.steering;
  json policies = json::array();
  for (Policy pol : c.navigate.policies) policies.push_back(std::string(to_string(pol)));
  return json{
      {"seed", c.seed},
      {"threads", c.threads},
      {"hardware_tag", c.hardware_tag},
      {"camera",
       {{"width", p.intrinsics.width},
        {"height", p.intrinsics.height},
        {"focal_x", p.intrinsics.focal_x},
        {"focal_y", p.intrinsics.focal_y},
        {"center_x", p.intrinsics.center_x},
        {"center_y", p.intrinsics.center_y}}},
      {"vehicle",
       {{"radius", p.radius},
        {"desired_speed", p.v_des},
        {"peak_speed_factor", p.peak_speed_factor},
        {"yaw_rate_limit", e.yaw_rate_limit}}},
      {"sampling", {{"lower", p.bounds.lower}, {"upper", p.bounds.upper}}},
      {"trajectory",
       {{"min_duration", p.durations.min_seconds}, {"max_duration", p.durations.max_seconds}}},
      {"collision", {{"check_step", p.check_step}, {"near_field", p.near_field}}},
      {"planner",
       {{"budget_ms", p.budget * 1000.0},
        {"budget_mode", std::string(to_string(p.budget_mode))},
        {"candidate_budget", p.candidate_budget},
        {"candidates_per_ms", c.candidates_per_ms}}},
      {"steering",
       {{"gain", s.gain},
        {"stuck_threshold", s.stuck_threshold},
        {"local_goal_distance", s.local_goal_distance},
        {"rest_position_tolerance", s.rest_position_tolerance},
        {"rest_speed_tolerance", s.rest_speed_tolerance},
        {"bearing_to_global_goal", s.bearing_to_global_goal}}},
      {"episode",
       {{"start", to_json(e.start)},
        {"goal", to_json(e.goal)},
        {"goal_radius", e.goal_radius},
        {"timeout", e.timeout},
        {"frame_rate", e.frame_rate},
        {"control_rate", e.control_rate},
        {"max_range", e.max_range}}},
      {"scenario",
       {{"bounds_min", to_json(c.scenario.bounds.min)},
        {"bounds_max", to_json(c.scenario.bounds.max)},
        {"min_diameter", c.scenario.min_diameter},
        {"max_diameter", c.scenario.max_diameter},
        {"clearance", c.scenario.clearance}}},
      {"bench",
       {{"scenarios", c.bench.scenarios},
        {"budgets_ms", c.bench.budgets_ms},
        {"min_spheres", c.bench.min_spheres},
        {"max_spheres", c.bench.max_spheres},
        {"min_radius", c.bench.min_radius},
        {"max_radius", c.bench.max_radius},
        {"shell_near", c.bench.shell_near},
        {"shell_far", c.bench.shell_far},
        {"ldens_points", c.bench.ldens_points},
        {"goal_distance", c.bench.goal_distance}}},
      {"navigate",
       {{"trials", c.navigate.trials},
        {"scenarios", c.navigate.scenarios},
        {"policies", policies}}},
      {"render",
       {{"scenario", c.render.scenario},
        {"scenario_seed", c.render.scenario_seed},
        {"position", to_json(c.render.position)},
        {"yaw", c.render.yaw}}},
  };
}

}  // namespace dess

#pragma once

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "dess/collision.hpp"
#include "dess/config.hpp"
#include "dess/depth_image.hpp"
#include "dess/planner.hpp"
#include "dess/random.hpp"
#include "dess/sampling.hpp"
#include "dess/simulator.hpp"
#include "json.hpp"

namespace dess {

// ---------------------------------------------------------------------------
// Utilities
// ---------------------------------------------------------------------------

/// Runs fn(i) for i in [0, n) on up to `workers` threads.
inline void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn) {
  workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, workers), n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      (void)w;
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n || failed.load()) return;
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

/// Shortest round-trip decimal text, independent of the C locale.
inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.close();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

inline void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw IoError("cannot create output directory '" + dir.string() + "'");
  }
}

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

/// Mean and sample standard deviation; zero for fewer than two values.
inline MeanStd mean_std(const std::vector<double>& v) {
  MeanStd r;
  if (v.empty()) return r;
  for (double x : v) r.mean += x;
  r.mean /= static_cast<double>(v.size());
  if (v.size() < 2) return r;
  double ss = 0.0;
  for (double x : v) ss += (x - r.mean) * (x - r.mean);
  r.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
  return r;
}

// ---------------------------------------------------------------------------
// Depth frame export
// ---------------------------------------------------------------------------

/// Binary 16-bit PGM, big-endian, depth in millimetres; no return stays 0
/// and depths beyond 65.535 m saturate.
inline std::string encode_pgm(const DepthImage& img) {
  std::string out = "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) +
                    "\n65535\n";
  const auto data = img.data();
  out.reserve(out.size() + 2 * data.size());
  for (float d : data) {
    const double mm = std::round(static_cast<double>(d) * 1000.0);
    const auto v = static_cast<std::uint16_t>(std::clamp(mm, 0.0, 65535.0));
    out.push_back(static_cast<char>(v >> 8));
    out.push_back(static_cast<char>(v & 0xff));
  }
  return out;
}

inline void write_pgm(const std::filesystem::path& path, const DepthImage& img) {
  write_text_file(path, encode_pgm(img));
}

// ---------------------------------------------------------------------------
// Static benchmark
// ---------------------------------------------------------------------------

/// One benchmark frame: camera at the origin with yaw 0, spheres in front of it.
struct BenchScenario {
  World world;
  Pose pose;
  VehicleState state;
  Vec3 goal;
};

/// Spheres with centres at random pixels and depths in the shell. No sphere
/// reaches closer than the lower sampling bound, so every return lies at or
/// beyond it.
inline BenchScenario generate_bench_scenario(const BenchSettings& b, const CameraIntrinsics& k,
                                             const SampleBounds& bounds, std::uint64_t seed) {
  Rng rng(seed);
  BenchScenario sc;
  sc.pose = Pose({0.0, 0.0, 0.0}, 0.0);
  sc.state.position = sc.pose.position;
  sc.state.yaw = 0.0;
  auto random_pixel_point = [&](double depth) {
    const double px = uniform_real(rng, -0.5, k.width - 0.5);
    const double py = uniform_real(rng, -0.5, k.height - 0.5);
    return camera_to_world(sc.pose, deproject(px, py, depth, k));
  };
  sc.goal = random_pixel_point(b.goal_distance);
  const int count =
      b.min_spheres + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(
                                                               b.max_spheres - b.min_spheres + 1)));
  constexpr int kMaxDraws = 100000;
  int draws = 0;
  while (static_cast<int>(sc.world.spheres.size()) < count) {
    if (++draws > kMaxDraws) throw GenerationFailure("bench scenario: too many rejected spheres");
    const double depth = uniform_real(rng, b.shell_near, b.shell_far);
    const Vec3 center = random_pixel_point(depth);
    const double radius = uniform_real(rng, b.min_radius, b.max_radius);
    if (depth - radius < bounds.lower) continue;
    sc.world.spheres.push_back({center, radius});
  }
  return sc;
}

/// Occupied fraction of the frustum shell between the sampling bounds,
/// estimated from points drawn uniformly by volume.
inline double estimate_ldens(const World& world, const Pose& pose, const CameraIntrinsics& k,
                             const SampleBounds& bounds, int points, std::uint64_t seed) {
  Rng rng(seed);
  const double l3 = bounds.lower * bounds.lower * bounds.lower;
  const double u3 = bounds.upper * bounds.upper * bounds.upper;
  int inside = 0;
  for (int i = 0; i < points; ++i) {
    // Cross-sections grow as z^2, so z has density proportional to z^2.
    const double z = std::cbrt(l3 + uniform01(rng) * (u3 - l3));
    const double px = uniform_real(rng, -0.5, k.width - 0.5);
    const double py = uniform_real(rng, -0.5, k.height - 0.5);
    const Vec3 p = camera_to_world(pose, deproject(px, py, z, k));
    if (world.occupied(p)) ++inside;
  }
  return static_cast<double>(inside) / points;
}

struct BenchRow {
  int scenario_id = 0;
  double budget_ms = 0.0;
  SamplerKind sampler = SamplerKind::DepthBased;
  std::optional<double> best_cost;  ///< empty when nothing feasible was found
  PlanCounters counters;
  double l_dens = 0.0;
};

inline std::string_view to_string(SamplerKind s) {
  return s == SamplerKind::DepthBased ? "depth-based" : "uniform";
}

struct BenchAggregate {
  double budget_ms = 0.0;
  SamplerKind sampler = SamplerKind::DepthBased;
  double mean_best_cost = 0.0;  ///< infeasible frames count as the worst cost, 1
  double feasible_fraction = 0.0;
  double mean_sampled = 0.0;
  double mean_cost_passed = 0.0;
  double mean_collision_checked = 0.0;
  double mean_collision_free = 0.0;
  double mean_pixels_touched = 0.0;
};

struct BenchResult {
  std::vector<BenchRow> rows;  ///< ordered by scenario, budget, sampler
  std::vector<BenchAggregate> aggregates;
  std::vector<double> l_dens;  ///< per scenario
};

inline constexpr std::array<SamplerKind, 2> kBenchSamplers{SamplerKind::DepthBased,
                                                          SamplerKind::Uniform};

/// Planner settings for one bench cell.
inline PlannerConfig bench_planner(const Config& cfg, double budget_ms, SamplerKind sampler) {
  PlannerConfig p = cfg.episode.planner;
  p.sampler = sampler;
  p.cost = CostKind::Direction;
  p.budget = budget_ms / 1000.0;
  p.candidate_budget =
      std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(budget_ms * cfg.candidates_per_ms)));
  return p;
}

/// Seeds for bench scenario `s`: world, L_dens estimate, planner stream.
struct BenchSeeds {
  std::uint64_t world, ldens, planner;
};

inline BenchSeeds bench_seeds(std::uint64_t seed, int s) {
  const std::uint64_t base = derive_seed(seed, static_cast<std::uint64_t>(s));
  return {derive_seed(base, 0), derive_seed(base, 1), derive_seed(base, 2)};
}

/// Every scenario x budget x sampler cell. Both samplers and all budgets of a
/// scenario replay the same planner random stream.
inline BenchResult run_bench(const Config& cfg) {
  const BenchSettings& b = cfg.bench;
  const PlannerConfig& base = cfg.episode.planner;
  const std::size_t per_scenario = b.budgets_ms.size() * kBenchSamplers.size();
  BenchResult result;
  result.rows.resize(static_cast<std::size_t>(b.scenarios) * per_scenario);
  result.l_dens.resize(static_cast<std::size_t>(b.scenarios));

  parallel_for(static_cast<std::size_t>(b.scenarios), cfg.worker_count(), [&](std::size_t si) {
    const int s = static_cast<int>(si);
    const BenchSeeds seeds = bench_seeds(cfg.seed, s);
    const BenchScenario sc = generate_bench_scenario(b, base.intrinsics, base.bounds, seeds.world);
    const double l_dens =
        estimate_ldens(sc.world, sc.pose, base.intrinsics, base.bounds, b.ldens_points, seeds.ldens);
    result.l_dens[si] = l_dens;
    const DepthImage img = render_depth(sc.world, sc.pose, base.intrinsics, cfg.episode.max_range);
    const DepthCollisionChecker checker(img, base.intrinsics, sc.pose, base.collision_params());
    std::size_t slot = si * per_scenario;
    for (double budget : b.budgets_ms) {
      for (SamplerKind sampler : kBenchSamplers) {
        const PlannerConfig p = bench_planner(cfg, budget, sampler);
        Rng rng(seeds.planner);
        const PlanOutcome out = plan(checker, img, sc.pose, sc.state, sc.goal, p, rng);
        BenchRow& row = result.rows[slot++];
        row.scenario_id = s;
        row.budget_ms = budget;
        row.sampler = sampler;
        if (out.best) row.best_cost = out.best_cost;
        row.counters = out.counters;
        row.l_dens = l_dens;
      }
    }
  });

  for (std::size_t bi = 0; bi < b.budgets_ms.size(); ++bi) {
    for (std::size_t ki = 0; ki < kBenchSamplers.size(); ++ki) {
      BenchAggregate a;
      a.budget_ms = b.budgets_ms[bi];
      a.sampler = kBenchSamplers[ki];
      double n = 0.0;
      for (int s = 0; s < b.scenarios; ++s) {
        const BenchRow& row =
            result.rows[static_cast<std::size_t>(s) * per_scenario + bi * kBenchSamplers.size() + ki];
        n += 1.0;
        a.mean_best_cost += row.best_cost.value_or(1.0);
        a.feasible_fraction += row.best_cost ? 1.0 : 0.0;
        a.mean_sampled += static_cast<double>(row.counters.sampled);
        a.mean_cost_passed += static_cast<double>(row.counters.cost_passed);
        a.mean_collision_checked += static_cast<double>(row.counters.collision_checked);
        a.mean_collision_free += static_cast<double>(row.counters.collision_free);
        a.mean_pixels_touched += static_cast<double>(row.counters.pixels_touched);
      }
      a.mean_best_cost /= n;
      a.feasible_fraction /= n;
      a.mean_sampled /= n;
      a.mean_cost_passed /= n;
      a.mean_collision_checked /= n;
      a.mean_collision_free /= n;
      a.mean_pixels_touched /= n;
      result.aggregates.push_back(a);
    }
  }
  return result;
}

inline std::string bench_csv(const BenchResult& r) {
  std::string out =
      "scenario_id,budget_ms,sampler_kind,feasible,best_cost,sampled,cost_passed,"
      "collision_checked,collision_free,pixels_touched,l_dens\n";
  for (const BenchRow& row : r.rows) {
    out += std::to_string(row.scenario_id) + "," + format_number(row.budget_ms) + "," +
           std::string(to_string(row.sampler)) + "," + (row.best_cost ? "1" : "0") + "," +
           (row.best_cost ? format_number(*row.best_cost) : std::string()) + "," +
           std::to_string(row.counters.sampled) + "," + std::to_string(row.counters.cost_passed) +
           "," + std::to_string(row.counters.collision_checked) + "," +
           std::to_string(row.counters.collision_free) + "," +
           std::to_string(row.counters.pixels_touched) + "," + format_number(row.l_dens) + "\n";
  }
  return out;
}

inline nlohmann::json bench_json(const BenchResult& r, const Config& cfg) {
  nlohmann::json cells = nlohmann::json::array();
  for (const BenchAggregate& a : r.aggregates) {
    cells.push_back({{"budget_ms", a.budget_ms},
                     {"sampler_kind", std::string(to_string(a.sampler))},
                     {"mean_best_cost", a.mean_best_cost},
                     {"feasible_fraction", a.feasible_fraction},
                     {"mean_sampled", a.mean_sampled},
                     {"mean_cost_passed", a.mean_cost_passed},
                     {"mean_collision_checked", a.mean_collision_checked},
                     {"mean_collision_free", a.mean_collision_free},
                     {"mean_pixels_touched", a.mean_pixels_touched}});
  }
  return {{"hardware_tag", cfg.hardware_tag},
          {"budget_mode", std::string(to_string(cfg.episode.planner.budget_mode))},
          {"mean_l_dens", mean_std(r.l_dens).mean},
          {"aggregates", cells},
          {"config", to_json(cfg)}};
}

// ---------------------------------------------------------------------------
// Navigation trials
// ---------------------------------------------------------------------------

/// World for a named scenario; levels share their draws across a seed.
inline World make_world(const std::string& name, std::uint64_t seed, const Config& cfg) {
  if (const auto level = parse_level(name)) return generate_scenario({*level, seed}, cfg.scenario);
  if (name == "wall") return wall_scenario();
  if (name == "spheroid") return spheroid_scenario(cfg.episode.start, cfg.episode.goal);
  if (name == "empty") return World{};
  if (name == "bench") {
    const auto& p = cfg.episode.planner;
    return generate_bench_scenario(cfg.bench, p.intrinsics, p.bounds, seed).world;
  }
  throw ConfigError("unknown scenario '" + name + "'");
}

struct NavSeeds {
  std::uint64_t world, episode;
};

/// Seeds for trial `t`; shared by every policy so the comparison is paired.
inline NavSeeds nav_seeds(std::uint64_t seed, int t) {
  const std::uint64_t base = derive_seed(seed, 0x6e6176ULL);
  return {derive_seed(derive_seed(base, 0), static_cast<std::uint64_t>(t)),
          derive_seed(derive_seed(base, 1), static_cast<std::uint64_t>(t))};
}

struct TrialRow {
  std::string scenario;
  Policy policy = Policy::Dess;
  int trial = 0;
  std::uint64_t world_seed = 0;
  TrialResult result;
};

struct NavSummary {
  std::string level;
  Policy policy = Policy::Dess;
  int trials = 0;
  int successes = 0;
  double success_rate = 0.0;
  MeanStd distance;  ///< over successful trials
  MeanStd time;      ///< over successful trials
  double mean_steer_episodes = 0.0;  ///< over all trials
  int collisions = 0;
  int timeouts = 0;
};

struct NavigateResult {
  std::vector<TrialRow> trials;  ///< ordered by scenario, policy, trial
  std::vector<NavSummary> summaries;
};

inline NavSummary summarize(const std::string& level, Policy policy,
                            const std::vector<const TrialRow*>& rows) {
  NavSummary s;
  s.level = level;
  s.policy = policy;
  s.trials = static_cast<int>(rows.size());
  std::vector<double> dist, time;
  double steers = 0.0;
  for (const TrialRow* r : rows) {
    steers += r->result.steer_episodes;
    if (r->result.failure_kind == FailureKind::Collision) ++s.collisions;
    if (r->result.failure_kind == FailureKind::Timeout) ++s.timeouts;
    if (!r->result.success) continue;
    ++s.successes;
    dist.push_back(r->result.distance_travelled);
    time.push_back(r->result.elapsed);
  }
  s.success_rate = s.trials ? static_cast<double>(s.successes) / s.trials : 0.0;
  s.distance = mean_std(dist);
  s.time = mean_std(time);
  s.mean_steer_episodes = s.trials ? steers / s.trials : 0.0;
  return s;
}

/// Runs every scenario x policy x trial episode.
inline NavigateResult run_navigate(const Config& cfg) {
  const NavigateSettings& n = cfg.navigate;
  NavigateResult result;
  for (const auto& scenario : n.scenarios) {
    for (Policy policy : n.policies) {
      for (int t = 0; t < n.trials; ++t) {
        TrialRow row;
        row.scenario = scenario;
        row.policy = policy;
        row.trial = t;
        row.world_seed = nav_seeds(cfg.seed, t).world;
        result.trials.push_back(row);
      }
    }
  }
  parallel_for(result.trials.size(), cfg.worker_count(), [&](std::size_t i) {
    TrialRow& row = result.trials[i];
    const World world = make_world(row.scenario, row.world_seed, cfg);
    EpisodeConfig ec = cfg.episode;
    ec.policy = row.policy;
    Rng rng(nav_seeds(cfg.seed, row.trial).episode);
    row.result = run_episode(world, ec, rng);
  });
  std::size_t i = 0;
  for (const auto& scenario : n.scenarios) {
    for (Policy policy : n.policies) {
      std::vector<const TrialRow*> cell;
      for (int t = 0; t < n.trials; ++t) cell.push_back(&result.trials[i++]);
      result.summaries.push_back(summarize(scenario, policy, cell));
    }
  }
  return result;
}

inline std::string trials_csv(const NavigateResult& r) {
  std::string out =
      "scenario,policy,trial,world_seed,success,failure,distance,time,steer_episodes,frames\n";
  for (const TrialRow& row : r.trials) {
    const TrialResult& t = row.result;
    out += row.scenario + "," + std::string(to_string(row.policy)) + "," +
           std::to_string(row.trial) + "," + std::to_string(row.world_seed) + "," +
           (t.success ? "1" : "0") + "," + std::string(to_string(t.failure_kind)) + "," +
           format_number(t.distance_travelled) + "," + format_number(t.elapsed) + "," +
           std::to_string(t.steer_episodes) + "," + std::to_string(t.frames) + "\n";
  }
  return out;
}

inline nlohmann::json navigate_json(const NavigateResult& r, const Config& cfg) {
  nlohmann::json cells = nlohmann::json::array();
  for (const NavSummary& s : r.summaries) {
    cells.push_back({{"level", s.level},
                     {"policy", std::string(to_string(s.policy))},
                     {"trials", s.trials},
                     {"successes", s.successes},
                     {"success_rate", s.success_rate},
                     {"collisions", s.collisions},
                     {"timeouts", s.timeouts},
                     {"distance_mean", s.distance.mean},
                     {"distance_std", s.distance.std},
                     {"time_mean", s.time.mean},
                     {"time_std", s.time.std},
                     {"mean_steer_episodes", s.mean_steer_episodes}});
  }
  return {{"hardware_tag", cfg.hardware_tag},
          {"budget_mode", std::string(to_string(cfg.episode.planner.budget_mode))},
          {"summaries", cells},
          {"config", to_json(cfg)}};
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

inline void cmd_bench(const Config& cfg, const std::filesystem::path& out_dir) {
  ensure_directory(out_dir);
  const BenchResult r = run_bench(cfg);
  write_text_file(out_dir / "bench.csv", bench_csv(r));
  write_text_file(out_dir / "bench_summary.json", bench_json(r, cfg).dump(2) + "\n");
}

inline void cmd_navigate(const Config& cfg, const std::filesystem::path& out_dir) {
  ensure_directory(out_dir);
  const NavigateResult r = run_navigate(cfg);
  write_text_file(out_dir / "trials.csv", trials_csv(r));
  write_text_file(out_dir / "navigate_summary.json", navigate_json(r, cfg).dump(2) + "\n");
}

inline DepthImage render_scenario(const Config& cfg) {
  const RenderSettings& s = cfg.render;
  const World world = make_world(s.scenario, s.scenario_seed, cfg);
  return render_depth(world, Pose(s.position, s.yaw), cfg.episode.planner.intrinsics,
                      cfg.episode.max_range);
}

inline void cmd_render(const Config& cfg, const std::filesystem::path& out_file) {
  const DepthImage img = render_scenario(cfg);
  if (out_file.has_parent_path()) ensure_directory(out_file.parent_path());
  write_pgm(out_file, img);
}

}  // namespace dess

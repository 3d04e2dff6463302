#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "dess/dess.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> budget_mode;
};

dess::Config load(const Options& o) {
  dess::Config cfg = dess::load_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (o.budget_mode) {
    const auto mode = dess::parse_budget_mode(*o.budget_mode);
    if (!mode) throw dess::ConfigError("--budget-mode: expected wallclock or candidates");
    cfg.episode.planner.budget_mode = *mode;
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  dess::tune_allocator();

  CLI::App app{"Depth-based sampling and steering planner: benchmarks, navigation trials, renders"};
  app.require_subcommand(1);

  Options bench_opt, nav_opt, render_opt;
  auto* bench = app.add_subcommand("bench", "static-frame planner benchmark (CSV + JSON)");
  bench->add_option("--config", bench_opt.config, "JSON config file")->required();
  bench->add_option("--out", bench_opt.out, "output directory")->required();
  bench->add_option("--seed", bench_opt.seed, "override the config seed");
  bench->add_option("--budget-mode", bench_opt.budget_mode, "wallclock or candidates")
      ->check(CLI::IsMember({"wallclock", "candidates"}));

  auto* nav = app.add_subcommand("navigate", "closed-loop navigation trials (CSV + JSON)");
  nav->add_option("--config", nav_opt.config, "JSON config file")->required();
  nav->add_option("--out", nav_opt.out, "output directory")->required();

  auto* render = app.add_subcommand("render", "render one depth frame to a 16-bit PGM");
  render->add_option("--config", render_opt.config, "JSON config file")->required();
  render->add_option("--out", render_opt.out, "output .pgm file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*bench) {
      dess::cmd_bench(load(bench_opt), bench_opt.out);
    } else if (*nav) {
      dess::cmd_navigate(load(nav_opt), nav_opt.out);
    } else if (*render) {
      dess::cmd_render(load(render_opt), render_opt.out);
    }
  } catch (const dess::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const dess::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

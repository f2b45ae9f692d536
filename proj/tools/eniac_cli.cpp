// eniac command-line driver: train, eval, bench, width-demo.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "eniac/csv.hpp"
#include "eniac/dynamic_programming.hpp"
#include "eniac/experiment.hpp"
#include "eniac/neural_width.hpp"
#include "eniac/presets.hpp"

namespace fs = std::filesystem;
using namespace eniac;

namespace {

constexpr int kConfigError = 2;
constexpr int kBudgetExhausted = 3;

std::string output_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("ENIAC_OUTPUT_DIR"); env && *env) return env;
  return "runs";
}

RunConfig resolve_config(const std::string& path, std::optional<std::uint64_t> seed,
                         bool experiment) {
  RunConfig cfg = path.empty() ? lock_benchmark("eniac") : load_run_config(path);
  if (seed) cfg.seeds = {*seed};
  if (experiment) cfg.experiment = true;
  cfg.validate();
  return cfg;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

int cmd_train(const RunConfig& cfg, const std::string& out) {
  const auto outcomes = run_experiment(cfg, out);
  bool exhausted = false;
  for (const auto& o : outcomes) {
    std::cout << "seed " << o.seed << ": final return " << format_number(o.final_return);
    if (!std::isnan(o.final_exact)) std::cout << " (exact " << format_number(o.final_exact) << ")";
    std::cout << ", env steps " << o.env_steps;
    if (o.budget_exhausted) std::cout << ", budget exhausted";
    std::cout << '\n';
    exhausted = exhausted || o.budget_exhausted;
  }
  std::cout << "metrics: " << (fs::path(out) / "metrics.csv").string() << '\n';
  return exhausted ? kBudgetExhausted : 0;
}

int cmd_eval(const RunConfig& cfg, std::size_t episodes) {
  std::cout << "seed,mean_return,exact_value\n";
  for (std::uint64_t seed : cfg.seeds) {
    const Problem problem = build_problem(cfg);
    RunOutcome o = run_single(cfg, seed);
    Rng rng(seed + 7919);
    const double ret = evaluate_return(*problem.mdp, *o.policy, episodes, rng);
    std::cout << seed << ',' << format_number(ret) << ',' << format_number(o.final_exact) << '\n';
  }
  return 0;
}

int cmd_bench(const std::string& out, bool extended) {
  fs::create_directories(out);
  bool ok = true;

  const Problem lock = build_problem(lock_benchmark("eniac"));
  const double v_star = optimal_value(dynamic_cast<const TabularMdp&>(*lock.mdp));
  std::vector<double> eniac_vals, zero_vals;
  for (const char* algo : {"eniac", "zero-bonus"}) {
    const auto outcomes = run_experiment(lock_benchmark(algo), (fs::path(out) / algo).string());
    auto& vals = std::string(algo) == "eniac" ? eniac_vals : zero_vals;
    for (const auto& o : outcomes) vals.push_back(o.final_exact);
  }
  const double me = median(eniac_vals), mz = median(zero_vals);
  const bool lock_ok = me >= 0.9 * v_star && mz < 0.5 * v_star;
  ok = ok && lock_ok;
  std::cout << "combination lock: V* " << format_number(v_star) << ", eniac median "
            << format_number(me) << ", zero-bonus median " << format_number(mz) << " -> "
            << (lock_ok ? "PASS" : "FAIL") << '\n';

  if (extended) {
    const RunConfig mc = mountain_car_benchmark("eniac", 2);
    const auto outcomes = run_experiment(mc, (fs::path(out) / "mountain-car").string());
    std::size_t reached = 0;
    for (const auto& o : outcomes) {
      std::cout << "mountain car seed " << o.seed << ": final " << format_number(o.final_return)
                << " after " << o.env_steps << " steps\n";
      if (o.reached_threshold && o.env_steps <= mc.experiment_mode.max_env_steps) ++reached;
    }
    const bool mc_ok = reached >= 3;
    ok = ok && mc_ok;
    std::cout << "mountain car: " << reached << "/" << outcomes.size() << " seeds above 93 -> "
              << (mc_ok ? "PASS" : "FAIL") << '\n';
  }
  return ok ? 0 : kBudgetExhausted;
}

int cmd_width_demo(const std::string& out, std::uint64_t seed, std::size_t iters) {
  fs::create_directories(out);
  Rng rng(seed);
  RingFixture ring = make_ring_fixture(rng);
  WidthTrainConfig wc;
  wc.outer_iters = iters;
  TrainedWidth tw = train_width(ring.arch, ring.buffer, ring.query_set, wc, rng);
  {
    std::ofstream log(fs::path(out) / "width_log.csv", std::ios::binary);
    write_width_log(log, tw.log);
  }
  std::ofstream grid(fs::path(out) / "width_grid.csv", std::ios::binary);
  grid << "x,y,width\n";
  for (int i = 0; i <= 40; ++i)
    for (int j = 0; j <= 40; ++j) {
      const double x = -2.0 + 0.1 * i, y = -2.0 + 0.1 * j;
      grid << format_number(x) << ',' << format_number(y) << ','
           << format_number(tw.pair.width(State::continuous({x, y}), 0)) << '\n';
    }
  auto mean_width = [&](const Dataset& d) {
    double s = 0.0;
    for (const auto& z : d.items()) s += tw.pair.width(z.state, z.action);
    return s / static_cast<double>(d.size());
  };
  const double on = mean_width(ring.buffer_probes), off = mean_width(ring.far_probes);
  std::cout << "mean width on ring " << format_number(on) << ", off ring " << format_number(off)
            << ", ratio " << format_number(off / on) << '\n'
            << "wrote " << (fs::path(out) / "width_grid.csv").string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ENIAC exploration toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_flag;
  std::optional<std::uint64_t> seed;
  bool experiment = false, extended = false;
  std::size_t episodes = 2000, iters = 200;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "Run a single seed");
    sub->add_option("--out", out_flag, "Output directory (default: $ENIAC_OUTPUT_DIR or ./runs)");
  };
  auto* train = app.add_subcommand("train", "Run a configured experiment and write metrics");
  train->add_option("--config", config_path, "JSON run config (default: combination lock)");
  train->add_flag("--experiment", experiment, "Use the network/PPO experiment loop");
  add_common(train);

  auto* eval = app.add_subcommand("eval", "Retrain deterministically and evaluate the output policy");
  eval->add_option("--config", config_path, "JSON run config");
  eval->add_option("--episodes", episodes, "Evaluation episodes");
  eval->add_flag("--experiment", experiment, "Use the network/PPO experiment loop");
  add_common(eval);

  auto* bench = app.add_subcommand("bench", "Built-in benchmarks with pass/fail verdicts");
  bench->add_flag("--extended", extended, "Include the multi-hour mountain-car runs");
  add_common(bench);

  auto* demo = app.add_subcommand("width-demo", "Train a width pair on the ring fixture");
  demo->add_option("--iters", iters, "Outer iterations");
  add_common(demo);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigError;
  }
  const std::string out = output_dir(out_flag);

  RunConfig cfg;
  if (train->parsed() || eval->parsed()) {
    try {
      cfg = resolve_config(config_path, seed, experiment);
    } catch (const std::invalid_argument& e) {
      std::cerr << "config error: " << e.what() << '\n';
      return kConfigError;
    }
  }
  try {
    if (train->parsed()) return cmd_train(cfg, out);
    if (eval->parsed()) return cmd_eval(cfg, episodes);
    if (bench->parsed()) return cmd_bench(out, extended);
    return cmd_width_demo(out, seed.value_or(0), iters);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

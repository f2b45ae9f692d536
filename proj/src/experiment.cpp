#include "eniac/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "eniac/csv.hpp"
#include "eniac/dynamic_programming.hpp"
#include "json.hpp"

namespace eniac {

using nlohmann::json;

namespace {

const std::set<std::string> kBuilt = {"eniac", "zero-bonus", "vanilla-pg"};
const std::set<std::string> kStubs = {"pc-pg", "ppo-rnd"};

void check_keys(const json& j, std::initializer_list<const char*> allowed, const char* where) {
  if (!j.is_object()) throw std::invalid_argument(std::string(where) + ": expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items())
    if (!ok.count(key))
      throw std::invalid_argument(std::string(where) + ": unknown key '" + key + "'");
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

json ppo_json(const PpoConfig& p) {
  return json{{"learning_rate", p.learning_rate}, {"gae_lambda", p.gae_lambda},
              {"gradient_clip", p.gradient_clip}, {"entropy_coef", p.entropy_coef},
              {"ratio_clip", p.ratio_clip},       {"minibatch", p.minibatch},
              {"epochs", p.epochs},               {"epsilon_greedy", p.epsilon_greedy},
              {"rollout_steps", p.rollout_steps}, {"value_coef", p.value_coef}};
}

json width_json(const WidthTrainConfig& w) {
  return json{{"lambda", w.lambda},
              {"lambda1", w.lambda1},
              {"query_set_size", w.query_set_size},
              {"learning_rate", w.learning_rate},
              {"buffer_batch", w.buffer_batch},
              {"query_batch", w.query_batch},
              {"gradient_clip", w.gradient_clip},
              {"outer_iters", w.outer_iters},
              {"inner_iters", w.inner_iters}};
}

void read_width(const json& w, WidthTrainConfig& t) {
  check_keys(w,
             {"lambda", "lambda1", "query_set_size", "learning_rate", "buffer_batch",
              "query_batch", "gradient_clip", "outer_iters", "inner_iters"},
             "width");
  read(w, "lambda", t.lambda);
  read(w, "lambda1", t.lambda1);
  read(w, "query_set_size", t.query_set_size);
  read(w, "learning_rate", t.learning_rate);
  read(w, "buffer_batch", t.buffer_batch);
  read(w, "query_batch", t.query_batch);
  read(w, "gradient_clip", t.gradient_clip);
  read(w, "outer_iters", t.outer_iters);
  read(w, "inner_iters", t.inner_iters);
}

json to_json(const RunConfig& c) {
  const auto& e = c.environment;
  const auto& f = c.function_class;
  const auto& x = c.experiment_mode;
  return json{
      {"environment",
       {{"id", e.id},
        {"horizon", e.horizon},
        {"delta", e.delta},
        {"gamma", e.gamma},
        {"num_actions", e.num_actions},
        {"width", e.width},
        {"height", e.height},
        {"slip", e.slip},
        {"arm_means", e.arm_means},
        {"action_grid", e.action_grid}}},
      {"algorithm", c.algorithm},
      {"function_class",
       {{"kind", f.kind},
        {"bound", f.bound},
        {"layers", f.layers},
        {"bins", f.bins},
        {"fit_steps", f.fit.steps},
        {"fit_step_size", f.fit.step_size},
        {"fit_seed", f.fit.init_seed}}},
      {"eniac", json::parse(eniac_config_to_json(c.eniac))},
      {"seeds", c.seeds},
      {"stop_threshold", c.stop_threshold ? json(*c.stop_threshold) : json(nullptr)},
      {"eval_episodes", c.eval_episodes},
      {"experiment", c.experiment},
      {"experiment_mode",
       {{"ppo", ppo_json(x.ppo)},
        {"width", width_json(x.width)},
        {"buffer_draws", x.buffer_draws},
        {"explorer_updates", x.explorer_updates},
        {"exploit_updates", x.exploit_updates},
        {"max_env_steps", x.max_env_steps},
        {"eval_episodes", x.eval_episodes},
        {"episode_length", x.episode_length}}},
  };
}

RunConfig from_json(const json& j) {
  check_keys(j,
             {"environment", "algorithm", "function_class", "eniac", "seeds", "stop_threshold",
              "eval_episodes", "experiment", "experiment_mode"},
             "run config");
  RunConfig c;
  if (j.contains("environment")) {
    const json& e = j.at("environment");
    check_keys(e,
               {"id", "horizon", "delta", "gamma", "num_actions", "width", "height", "slip",
                "arm_means", "action_grid"},
               "environment");
    auto& t = c.environment;
    read(e, "id", t.id);
    read(e, "horizon", t.horizon);
    read(e, "delta", t.delta);
    read(e, "gamma", t.gamma);
    read(e, "num_actions", t.num_actions);
    read(e, "width", t.width);
    read(e, "height", t.height);
    read(e, "slip", t.slip);
    read(e, "arm_means", t.arm_means);
    read(e, "action_grid", t.action_grid);
  }
  read(j, "algorithm", c.algorithm);
  if (j.contains("function_class")) {
    const json& f = j.at("function_class");
    check_keys(f, {"kind", "bound", "layers", "bins", "fit_steps", "fit_step_size", "fit_seed"},
               "function_class");
    auto& t = c.function_class;
    read(f, "kind", t.kind);
    read(f, "bound", t.bound);
    read(f, "layers", t.layers);
    read(f, "bins", t.bins);
    read(f, "fit_steps", t.fit.steps);
    read(f, "fit_step_size", t.fit.step_size);
    read(f, "fit_seed", t.fit.init_seed);
  }
  if (j.contains("eniac")) c.eniac = eniac_config_from_json(j.at("eniac").dump());
  read(j, "seeds", c.seeds);
  if (j.contains("stop_threshold")) {
    if (j.at("stop_threshold").is_null()) c.stop_threshold.reset();
    else c.stop_threshold = j.at("stop_threshold").get<double>();
  }
  read(j, "eval_episodes", c.eval_episodes);
  read(j, "experiment", c.experiment);
  if (j.contains("experiment_mode")) {
    const json& x = j.at("experiment_mode");
    check_keys(x,
               {"ppo", "width", "buffer_draws", "explorer_updates", "exploit_updates",
                "max_env_steps", "eval_episodes", "episode_length"},
               "experiment_mode");
    auto& t = c.experiment_mode;
    if (x.contains("ppo")) {
      const json& p = x.at("ppo");
      check_keys(p,
                 {"learning_rate", "gae_lambda", "gradient_clip", "entropy_coef", "ratio_clip",
                  "minibatch", "epochs", "epsilon_greedy", "rollout_steps", "value_coef"},
                 "ppo");
      read(p, "learning_rate", t.ppo.learning_rate);
      read(p, "gae_lambda", t.ppo.gae_lambda);
      read(p, "gradient_clip", t.ppo.gradient_clip);
      read(p, "entropy_coef", t.ppo.entropy_coef);
      read(p, "ratio_clip", t.ppo.ratio_clip);
      read(p, "minibatch", t.ppo.minibatch);
      read(p, "epochs", t.ppo.epochs);
      read(p, "epsilon_greedy", t.ppo.epsilon_greedy);
      read(p, "rollout_steps", t.ppo.rollout_steps);
      read(p, "value_coef", t.ppo.value_coef);
    }
    if (x.contains("width")) read_width(x.at("width"), t.width);
    read(x, "buffer_draws", t.buffer_draws);
    read(x, "explorer_updates", t.explorer_updates);
    read(x, "exploit_updates", t.exploit_updates);
    read(x, "max_env_steps", t.max_env_steps);
    read(x, "eval_episodes", t.eval_episodes);
    read(x, "episode_length", t.episode_length);
  }
  return c;
}

double resolved_bound(const ClassConfig& f, double gamma) {
  return f.bound > 0.0 ? f.bound : 1.0 / (1.0 - gamma);
}

// Stream for evaluation draws, kept apart so evaluation never shifts training.
Rng eval_stream(std::uint64_t seed) { return Rng(seed ^ 0x5eed0fe7a1ULL); }

double final_exact_value(const Mdp& mdp, const Policy& policy) {
  if (const auto* tab = dynamic_cast<const TabularMdp*>(&mdp))
    return exact_value(*tab, policy, reward_table(*tab));
  return std::numeric_limits<double>::quiet_NaN();
}

// ---------------------------------------------------------------------------
// Theory path

RunOutcome run_theory(const RunConfig& config, const Problem& problem, std::uint64_t seed) {
  const Mdp& mdp = *problem.mdp;
  RunOutcome out;
  out.seed = seed;
  Rng rng(seed);
  Rng eval_rng = eval_stream(seed);
  const auto threshold = config.resolved_stop_threshold();
  const bool mountain = dynamic_cast<const MountainCarMdp*>(&mdp) != nullptr;

  EniacConfig ec = config.eniac;
  ec.seed = seed;

  if (config.algorithm == "vanilla-pg") {
    PolicyUpdateConfig uc = ec.update;
    uc.on_policy = true;
    uc.iterations = ec.epochs * ec.update.iterations;
    const PairSampler unused = [](Rng&, RolloutCounters*) -> StateAction {
      throw std::logic_error("vanilla-pg samples on-policy");
    };
    PolicyUpdateResult upd = policy_update(mdp, unused, Bonus::zero(mdp.num_actions()),
                                           problem.cls, uc, ec.variant, rng);
    out.env_steps = upd.counters.steps;
    for (std::size_t k = 1; k <= ec.epochs; ++k) {
      const std::size_t t = k * ec.update.iterations;
      const PolicyPtr pi = t < upd.iterates.size() ? upd.iterates[t] : upd.final_iterate;
      const double ret =
          mountain ? evaluate_return(mdp, *pi, config.eval_episodes, eval_rng)
                   : evaluate_policy(mdp, *pi, config.eval_episodes, eval_rng);
      out.rows.push_back(MetricsRow{upd.diagnostics[t - 1].rollouts, ret, k, seed});
      out.policy = pi;
      if (threshold && ret > *threshold) {
        out.reached_threshold = true;
        break;
      }
    }
  } else {
    if (config.algorithm == "zero-bonus") ec.bonus_kind = BonusKind::zero;
    auto on_epoch = [&](const EpochRecord& rec, const ExploitationResult* ex) {
      if (!ex) return true;
      const double ret =
          mountain ? evaluate_return(mdp, *ex->policy, config.eval_episodes, eval_rng) : ex->value;
      out.rows.push_back(MetricsRow{rec.env_rollouts, ret, rec.epoch, seed});
      if (threshold && ret > *threshold) {
        out.reached_threshold = true;
        return false;
      }
      return true;
    };
    EniacResult res = run_eniac(mdp, problem.cls, ec, rng, on_epoch);
    out.env_steps = res.counters.steps;
    out.policy = res.exploitation ? res.exploitation->policy : PolicyPtr(res.policy);
    if (res.exploitation) out.final_exact = res.exploitation->exact_value;
  }
  if (!out.rows.empty()) out.final_return = out.rows.back().mean_return;
  if (std::isnan(out.final_exact) && out.policy) out.final_exact = final_exact_value(mdp, *out.policy);
  out.budget_exhausted = threshold.has_value() && !out.reached_threshold;
  return out;
}

// ---------------------------------------------------------------------------
// Experiment path: PPO explorers over a policy cover

using StartFn = std::function<State(Rng&)>;

class Collector {
 public:
  Collector(const Mdp& mdp, std::size_t episode_length)
      : mdp_(mdp),
        mountain_(dynamic_cast<const MountainCarMdp*>(&mdp)),
        episode_length_(episode_length) {}

  bool over(const State& s, std::size_t t) const {
    return mountain_ ? mountain_->episode_over(s) : t >= episode_length_;
  }

  bool terminal(const State& s) const {
    return mountain_ && MountainCarPhysics::at_goal(s.x[0], s.x[1]);
  }

  std::vector<Transition> collect(const PpoAgent& agent, const StartFn& start,
                                  const RewardFn& reward, std::size_t steps, Rng& rng,
                                  RolloutCounters& counters) const {
    std::vector<Transition> batch;
    batch.reserve(steps);
    std::vector<double> probs(agent.num_actions());
    auto fresh = [&] {
      ++counters.rollouts;
      State s = start(rng);
      if (over(s, 0)) s = mdp_.initial_state(rng);
      return s;
    };
    State s = fresh();
    std::size_t t = 0;
    for (std::size_t i = 0; i < steps; ++i) {
      agent.probabilities(s, probs);
      const std::size_t a = sample_index(probs, rng);
      const double r = reward(s, a);
      State next = mdp_.step(s, a, rng);
      ++counters.steps;
      ++t;
      const bool end = over(next, t);
      Transition tr{s, a, r, probs[a], end || i + 1 == steps, end && terminal(next), next};
      batch.push_back(std::move(tr));
      if (end) {
        s = fresh();
        t = 0;
      } else {
        s = std::move(next);
      }
    }
    return batch;
  }

 private:
  const Mdp& mdp_;
  const MountainCarMdp* mountain_;
  std::size_t episode_length_;
};

// Same encoder as the critic, one output head.
std::shared_ptr<const MlpClass> value_architecture(std::shared_ptr<const MlpClass> critic,
                                                   std::vector<std::size_t> hidden) {
  const std::size_t dim = critic->network().input_dim();
  return std::make_shared<MlpClass>(
      dim, [critic](const State& s, Eigen::Ref<Eigen::VectorXd> out) { out = critic->encode(s); },
      std::move(hidden), 1, 1e9);
}

RunOutcome run_network(const RunConfig& config, const Problem& problem, std::uint64_t seed) {
  const Mdp& mdp = *problem.mdp;
  auto arch = std::dynamic_pointer_cast<const MlpClass>(problem.cls);
  if (!arch) throw std::invalid_argument("experiment mode needs an mlp function class");
  const ExperimentModeConfig& xc = config.experiment_mode;
  const std::size_t na = mdp.num_actions();
  const std::vector<std::size_t> hidden = network_preset(config.function_class.layers);
  PpoConfig ppo = xc.ppo;
  ppo.hidden = hidden;

  RunOutcome out;
  out.seed = seed;
  Rng rng(seed);
  Rng eval_rng = eval_stream(seed);
  const auto threshold = config.resolved_stop_threshold();
  const Collector collector(mdp, xc.episode_length);
  RolloutCounters counters;

  auto value_arch = value_architecture(arch, hidden);
  PpoAgent exploit(arch, value_arch, ppo, rng);
  PpoAgent explorer(arch, value_arch, ppo, rng);
  const bool cover_based = config.algorithm != "vanilla-pg";
  const bool with_bonus = config.algorithm == "eniac";

  PolicyCover cover(na);
  Dataset buffer;
  std::vector<StateAction> visited;
  const RewardFn external = mdp.reward_fn();
  const StartFn from_start = [&mdp](Rng& r) { return mdp.initial_state(r); };

  for (std::size_t epoch = 1; epoch <= config.eniac.epochs; ++epoch) {
    if (cover_based) {
      advance_buffer(buffer, mdp, cover, xc.buffer_draws, rng, &counters);
      Bonus bonus = Bonus::zero(na);
      if (with_bonus) {
        // Z_Q comes from pairs the cover visited last epoch; the buffer seeds epoch 1.
        WidthTrainConfig wc = xc.width;
        wc.buffer_batch = std::min(wc.buffer_batch, buffer.size());
        Dataset query;
        for (std::size_t i = 0; i < wc.query_set_size; ++i) {
          const StateAction& z =
              visited.empty() ? buffer[rng.index(buffer.size())] : visited[rng.index(visited.size())];
          query.append(z.state, z.action);
        }
        TrainedWidth trained = train_width(arch, buffer, query, wc, rng);
        bonus = normalized_bonus(trained.as_function(), trained.query_set, na);
      }
      const PairSampler rho = build_cover_distribution(mdp, cover);
      const StartFn from_cover = [&rho, &counters](Rng& r) { return rho(r, &counters).state; };
      const RewardFn explore_reward = combined_reward(mdp, bonus, Combiner::max);

      visited.clear();
      for (std::size_t u = 0; u < xc.explorer_updates; ++u) {
        auto batch = collector.collect(explorer, from_cover, explore_reward, ppo.rollout_steps,
                                       rng, counters);
        for (const auto& tr : batch) visited.push_back(StateAction{tr.state, tr.action});
        explorer.update(batch, mdp.gamma(), rng);
      }
      cover.add(explorer.snapshot());
      const PairSampler rho_next = build_cover_distribution(mdp, cover);
      const StartFn exploit_start = [&rho_next, &counters](Rng& r) {
        return rho_next(r, &counters).state;
      };
      for (std::size_t u = 0; u < xc.exploit_updates; ++u) {
        auto batch =
            collector.collect(exploit, exploit_start, external, ppo.rollout_steps, rng, counters);
        exploit.update(batch, mdp.gamma(), rng);
      }
    } else {
      for (std::size_t u = 0; u < xc.explorer_updates + xc.exploit_updates; ++u) {
        auto batch =
            collector.collect(exploit, from_start, external, ppo.rollout_steps, rng, counters);
        exploit.update(batch, mdp.gamma(), rng);
      }
    }

    out.policy = exploit.snapshot();
    const double ret = evaluate_return(mdp, *out.policy, xc.eval_episodes, eval_rng);
    out.rows.push_back(MetricsRow{counters.rollouts, ret, epoch, seed});
    if (threshold && ret > *threshold) {
      out.reached_threshold = true;
      break;
    }
    if (counters.steps >= xc.max_env_steps) break;
  }
  out.env_steps = counters.steps;
  if (!out.rows.empty()) out.final_return = out.rows.back().mean_return;
  if (out.policy) out.final_exact = final_exact_value(mdp, *out.policy);
  out.budget_exhausted = threshold.has_value() && !out.reached_threshold;
  return out;
}

}  // namespace

void RunConfig::validate() const {
  if (kStubs.count(algorithm))
    throw std::invalid_argument("algorithm '" + algorithm + "' is out of scope");
  if (!kBuilt.count(algorithm))
    throw std::invalid_argument("unknown algorithm '" + algorithm + "'");
  if (seeds.empty()) throw std::invalid_argument("run config: no seeds");
  if (eval_episodes == 0) throw std::invalid_argument("run config: eval_episodes must be >= 1");
  const std::set<std::string> envs = {"combination-lock", "gridworld", "bandit", "mountain-car"};
  if (!envs.count(environment.id))
    throw std::invalid_argument("unknown environment '" + environment.id + "'");
  const std::set<std::string> kinds = {"tabular", "linear", "mlp"};
  if (!kinds.count(function_class.kind))
    throw std::invalid_argument("unknown function class '" + function_class.kind + "'");
  if (!(environment.gamma > 0.0 && environment.gamma < 1.0))
    throw std::invalid_argument("environment: gamma outside (0, 1)");
  eniac.validate();
  if (experiment) {
    experiment_mode.ppo.validate();
    experiment_mode.width.validate();
    if (function_class.kind != "mlp")
      throw std::invalid_argument("experiment mode needs the mlp function class");
    if (experiment_mode.eval_episodes == 0 || experiment_mode.episode_length == 0)
      throw std::invalid_argument("experiment_mode: eval_episodes and episode_length must be >= 1");
  }
}

std::optional<double> RunConfig::resolved_stop_threshold() const {
  if (stop_threshold) return stop_threshold;
  if (environment.id == "mountain-car") return 93.0;
  return std::nullopt;
}

std::string run_config_to_json(const RunConfig& config) { return to_json(config).dump(2) + "\n"; }

RunConfig run_config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("run config: ") + e.what());
  }
  try {
    RunConfig c = from_json(j);
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("run config: ") + e.what());
  }
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return run_config_from_json(ss.str());
}

bool is_known_algorithm(const std::string& id) { return kBuilt.count(id) || kStubs.count(id); }

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows) {
  out << "episode,mean_return,epochs_used,seed\n";
  for (const auto& r : rows)
    out << r.episode << ',' << format_number(r.mean_return) << ',' << r.epochs_used << ','
        << r.seed << '\n';
}

Problem build_problem(const RunConfig& config) {
  const auto& e = config.environment;
  const auto& f = config.function_class;
  Problem p;
  p.environment_name = e.id;
  p.class_name = f.kind;
  if (e.id == "mountain-car") {
    auto mc = std::make_shared<MountainCarMdp>(e.action_grid, 100, e.gamma);
    const double bound = resolved_bound(f, e.gamma);
    if (f.kind == "mlp") {
      p.cls = mountain_car_mlp(*mc, network_preset(f.layers), bound, f.fit);
      p.class_name = "mlp-" + std::to_string(f.layers);
    } else if (f.kind == "linear") {
      p.cls = mountain_car_linear(*mc, f.bins, bound);
    } else {
      throw std::invalid_argument("mountain car has no tabular class");
    }
    p.mdp = mc;
    return p;
  }

  std::shared_ptr<TabularMdp> tab;
  if (e.id == "combination-lock")
    tab = std::make_shared<TabularMdp>(make_combination_lock(e.horizon, e.delta, e.gamma, e.num_actions));
  else if (e.id == "gridworld")
    tab = std::make_shared<TabularMdp>(make_gridworld(e.width, e.height, e.slip, e.gamma));
  else if (e.id == "bandit")
    tab = std::make_shared<TabularMdp>(make_bandit(e.arm_means, e.gamma));
  else
    throw std::invalid_argument("unknown environment '" + e.id + "'");
  const double bound = resolved_bound(f, e.gamma);
  if (f.kind == "tabular" || f.kind == "linear") {
    p.cls = make_tabular_class(tab->state_count(), tab->num_actions(), bound);
  } else {
    p.cls = MlpClass::for_discrete(tab->state_count(), network_preset(f.layers),
                                   tab->num_actions(), bound, f.fit);
    p.class_name = "mlp-" + std::to_string(f.layers);
  }
  p.mdp = tab;
  return p;
}

double evaluate_policy(const Mdp& mdp, const Policy& policy, std::size_t episodes, Rng& rng) {
  if (episodes == 0) throw std::invalid_argument("evaluate_policy: episodes must be >= 1");
  const RewardFn reward = mdp.reward_fn();
  double total = 0.0;
  for (std::size_t i = 0; i < episodes; ++i)
    total += estimate_v(mdp, policy, mdp.initial_state(rng), reward, rng);
  return total / static_cast<double>(episodes);
}

double evaluate_return(const Mdp& mdp, const Policy& policy, std::size_t episodes, Rng& rng) {
  const auto* mc = dynamic_cast<const MountainCarMdp*>(&mdp);
  if (!mc) return evaluate_policy(mdp, policy, episodes, rng);
  if (episodes == 0) throw std::invalid_argument("evaluate_return: episodes must be >= 1");
  double total = 0.0;
  for (std::size_t i = 0; i < episodes; ++i) total += mc->episode_return(policy, rng);
  return total / static_cast<double>(episodes);
}

RunOutcome run_single(const RunConfig& config, std::uint64_t seed) {
  config.validate();
  const Problem problem = build_problem(config);
  return config.experiment ? run_network(config, problem, seed)
                           : run_theory(config, problem, seed);
}

std::vector<RunOutcome> run_experiment(const RunConfig& config, const std::string& out_dir) {
  config.validate();
  std::vector<RunOutcome> outcomes;
  std::vector<MetricsRow> rows;
  for (std::uint64_t seed : config.seeds) {
    outcomes.push_back(run_single(config, seed));
    rows.insert(rows.end(), outcomes.back().rows.begin(), outcomes.back().rows.end());
  }
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ofstream csv(std::filesystem::path(out_dir) / "metrics.csv", std::ios::binary);
    if (!csv) throw std::runtime_error("cannot write metrics.csv in '" + out_dir + "'");
    write_metrics_csv(csv, rows);
    const Problem problem = build_problem(config);
    const BonusKind kind =
        config.algorithm == "zero-bonus"
            ? BonusKind::zero
            : config.eniac.bonus_kind.value_or(default_bonus_kind(*problem.cls, config.eniac.variant));
    json manifest = json::parse(run_manifest(config.eniac, problem.environment_name,
                                             problem.class_name, kind));
    manifest["algorithm"] = config.algorithm;
    manifest["seeds"] = config.seeds;
    manifest["experiment"] = config.experiment;
    manifest["run_config"] = to_json(config);
    std::ofstream mf(std::filesystem::path(out_dir) / "manifest.json", std::ios::binary);
    mf << manifest.dump(2) << '\n';
  }
  return outcomes;
}

}  // namespace eniac

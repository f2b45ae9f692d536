#include "eniac/eniac.hpp"

#include <chrono>
#include <cmath>
#include <initializer_list>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>

#include "eniac/csv.hpp"
#include "eniac/dynamic_programming.hpp"
#include "json.hpp"

namespace eniac {

using nlohmann::json;

PolicyCover::PolicyCover(std::size_t num_actions) {
  policies_.push_back(std::make_shared<UniformPolicy>(num_actions));
}

void PolicyCover::add(PolicyPtr policy) {
  if (!policy || policy->num_actions() != policies_.front()->num_actions())
    throw std::invalid_argument("PolicyCover: inconsistent policy");
  policies_.push_back(std::move(policy));
}

PairSampler build_cover_distribution(const Mdp& mdp, const PolicyCover& cover) {
  // Copy the list so the sampler stays valid while the cover keeps growing.
  auto policies = std::make_shared<const std::vector<PolicyPtr>>(cover.policies());
  return [&mdp, policies](Rng& rng, RolloutCounters* counters) {
    const Policy& pi = *(*policies)[rng.index(policies->size())];
    OccupancyDraw d = sample_occupancy(mdp, pi, start_from_initial(mdp), rng, counters);
    return StateAction{std::move(d.state), d.action};
  };
}

void advance_buffer(Dataset& buffer, const Mdp& mdp, const PolicyCover& cover, std::size_t k,
                    Rng& rng, RolloutCounters* counters) {
  const Policy& newest = *cover.newest();
  const StartSampler init = start_from_initial(mdp);
  for (std::size_t i = 0; i < k; ++i) {
    OccupancyDraw d = sample_occupancy(mdp, newest, init, rng, counters);
    buffer.append(std::move(d.state), d.action);
  }
}

std::string bonus_kind_name(BonusKind kind) {
  switch (kind) {
    case BonusKind::width_threshold: return "width-threshold";
    case BonusKind::neural_normalized: return "neural-normalized";
    case BonusKind::zero: return "zero";
  }
  return "?";
}

namespace {

BonusKind parse_bonus_kind(const std::string& s) {
  if (s == "width-threshold") return BonusKind::width_threshold;
  if (s == "neural-normalized") return BonusKind::neural_normalized;
  if (s == "zero") return BonusKind::zero;
  throw std::invalid_argument("unknown bonus kind '" + s + "'");
}

std::string critic_mode_name(CriticMode m) {
  return m == CriticMode::monte_carlo ? "monte-carlo" : "exact-dp";
}

CriticMode parse_critic_mode(const std::string& s) {
  if (s == "monte-carlo") return CriticMode::monte_carlo;
  if (s == "exact-dp") return CriticMode::exact_dp;
  throw std::invalid_argument("unknown critic mode '" + s + "'");
}

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

template <typename T>
void read_optional(const json& j, const char* key, std::optional<T>& out) {
  if (!j.contains(key)) return;
  if (j.at(key).is_null()) out.reset();
  else out = j.at(key).get<T>();
}

template <typename T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

json config_json(const EniacConfig& c) {
  const auto& u = c.update;
  const auto& w = c.width_train;
  return json{
      {"epochs", c.epochs},
      {"rollouts", c.rollouts},
      {"radius", c.radius},
      {"beta", optional_json(c.beta)},
      {"target_accuracy", c.target_accuracy},
      {"ridge", optional_json(c.ridge)},
      {"variant", c.variant.name()},
      {"alpha", c.variant.alpha},
      {"update",
       {{"iterations", u.iterations},
        {"samples", u.samples},
        {"eta", optional_json(u.eta)},
        {"critic_bound", optional_json(u.critic_bound)},
        {"critic", critic_mode_name(u.critic)},
        {"combiner", combiner_name(u.combiner)},
        {"npg",
         {{"coefficient_bound", u.npg.coefficient_bound},
          {"gradient_bound", u.npg.gradient_bound},
          {"hessian_bound", u.npg.hessian_bound}}}}},
      {"bonus", c.bonus_kind ? json(bonus_kind_name(*c.bonus_kind)) : json("auto")},
      {"width_train",
       {{"lambda", w.lambda},
        {"lambda1", w.lambda1},
        {"query_set_size", w.query_set_size},
        {"learning_rate", w.learning_rate},
        {"buffer_batch", w.buffer_batch},
        {"query_batch", w.query_batch},
        {"gradient_clip", w.gradient_clip},
        {"outer_iters", w.outer_iters},
        {"inner_iters", w.inner_iters}}},
      {"evaluate_every", c.evaluate_every},
      {"exploit_rollouts", c.exploit_rollouts},
      {"record_wallclock", c.record_wallclock},
      {"seed", c.seed},
  };
}

EniacConfig config_from(const json& j) {
  check_keys(j,
             {"epochs", "rollouts", "radius", "beta", "target_accuracy", "ridge", "variant",
              "alpha", "update", "bonus", "width_train", "evaluate_every", "exploit_rollouts",
              "record_wallclock", "seed"},
             "eniac config");
  EniacConfig c;
  read(j, "epochs", c.epochs);
  read(j, "rollouts", c.rollouts);
  read(j, "radius", c.radius);
  read_optional(j, "beta", c.beta);
  read(j, "target_accuracy", c.target_accuracy);
  read_optional(j, "ridge", c.ridge);
  double alpha = c.variant.alpha;
  read(j, "alpha", alpha);
  std::string variant = c.variant.name();
  read(j, "variant", variant);
  c.variant = UpdateVariant::parse(variant, alpha);
  if (j.contains("update")) {
    const json& u = j.at("update");
    check_keys(u, {"iterations", "samples", "eta", "critic_bound", "critic", "combiner", "npg"},
               "update");
    read(u, "iterations", c.update.iterations);
    read(u, "samples", c.update.samples);
    read_optional(u, "eta", c.update.eta);
    read_optional(u, "critic_bound", c.update.critic_bound);
    if (u.contains("critic")) c.update.critic = parse_critic_mode(u.at("critic").get<std::string>());
    if (u.contains("combiner"))
      c.update.combiner = parse_combiner(u.at("combiner").get<std::string>());
    if (u.contains("npg")) {
      const json& n = u.at("npg");
      check_keys(n, {"coefficient_bound", "gradient_bound", "hessian_bound"}, "npg");
      read(n, "coefficient_bound", c.update.npg.coefficient_bound);
      read(n, "gradient_bound", c.update.npg.gradient_bound);
      read(n, "hessian_bound", c.update.npg.hessian_bound);
    }
  }
  if (j.contains("bonus")) {
    const auto b = j.at("bonus").get<std::string>();
    if (b == "auto") c.bonus_kind.reset();
    else c.bonus_kind = parse_bonus_kind(b);
  }
  if (j.contains("width_train")) {
    const json& w = j.at("width_train");
    check_keys(w,
               {"lambda", "lambda1", "query_set_size", "learning_rate", "buffer_batch",
                "query_batch", "gradient_clip", "outer_iters", "inner_iters"},
               "width_train");
    auto& t = c.width_train;
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
  read(j, "evaluate_every", c.evaluate_every);
  read(j, "exploit_rollouts", c.exploit_rollouts);
  read(j, "record_wallclock", c.record_wallclock);
  read(j, "seed", c.seed);
  return c;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

void EniacConfig::validate() const {
  if (epochs == 0) throw std::invalid_argument("EniacConfig: N must be >= 1");
  if (!(radius >= 0.0)) throw std::invalid_argument("EniacConfig: radius must be >= 0");
  if (beta && !(*beta > 0.0)) throw std::invalid_argument("EniacConfig: beta must be > 0");
  if (!beta && !(target_accuracy > 0.0))
    throw std::invalid_argument("EniacConfig: target accuracy must be > 0");
  if (exploit_rollouts == 0) throw std::invalid_argument("EniacConfig: exploit_rollouts must be >= 1");
  variant.validate();
  update.validate();
}

double EniacConfig::resolved_beta(double gamma) const {
  return beta ? *beta : default_beta(target_accuracy, gamma);
}

std::string eniac_config_to_json(const EniacConfig& config) {
  return config_json(config).dump(2);
}

EniacConfig eniac_config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("eniac config: ") + e.what());
  }
  EniacConfig config;
  try {
    config = config_from(j);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("eniac config: ") + e.what());
  }
  config.validate();
  return config;
}

std::string run_manifest(const EniacConfig& config, const std::string& environment,
                         const std::string& function_class, BonusKind kind) {
  json j{{"format", "eniac-run-manifest"},
         {"version", 1},
         {"environment", environment},
         {"function_class", function_class},
         {"bonus_backend", bonus_kind_name(kind)},
         {"seed", config.seed},
         {"config", config_json(config)}};
  return j.dump(2) + "\n";
}

BonusKind default_bonus_kind(const FunctionClass& cls, const UpdateVariant& variant) {
  if (variant.algorithm == UpdateAlgorithm::npg) return BonusKind::width_threshold;
  if (dynamic_cast<const MlpClass*>(&cls)) return BonusKind::neural_normalized;
  return BonusKind::width_threshold;
}

Bonus build_epoch_bonus(const Mdp& mdp, FunctionClassPtr cls, const EniacConfig& config,
                        BonusKind kind, const Dataset& buffer, const PolicyCover& cover,
                        Rng& rng) {
  const std::size_t na = mdp.num_actions();
  Bonus bonus = Bonus::zero(na);
  if (kind == BonusKind::zero) return bonus;

  if (kind == BonusKind::width_threshold) {
    BonusSpec spec;
    spec.beta = config.resolved_beta(mdp.gamma());
    spec.variant =
        config.variant.mode == UpdateMode::sample ? BonusVariant::sample : BonusVariant::compute;
    spec.gamma = mdp.gamma();
    spec.num_actions = na;
    spec.alpha = config.variant.alpha;

    WidthFn width;
    if (config.variant.algorithm == UpdateAlgorithm::npg) {
      auto diff = std::dynamic_pointer_cast<const DifferentiableClass>(cls);
      if (!diff) throw std::invalid_argument("NPG width needs a differentiable class");
      const auto& npg = config.update.npg;
      auto tangent = std::make_shared<const TangentFeatureMap>(
          diff, diff->uniform_params(), npg.coefficient_bound, npg.gradient_bound,
          npg.hessian_bound);
      LinearWidthOracle oracle(std::make_shared<TangentFeatureAdapter>(tangent),
                               npg.coefficient_bound, config.radius, config.ridge);
      oracle.append(buffer);
      width = oracle.as_function();
    } else if (auto finite = std::dynamic_pointer_cast<const FiniteClass>(cls)) {
      width = FiniteWidthOracle(finite, buffer, config.radius).as_function();
    } else if (auto linear = std::dynamic_pointer_cast<const LinearClass>(cls)) {
      LinearWidthOracle oracle(linear->feature_map_ptr(), linear->coefficient_bound(),
                               config.radius, config.ridge);
      oracle.append(buffer);
      width = oracle.as_function();
    } else {
      throw std::invalid_argument("no exact width for class kind '" + cls->kind() +
                                  "'; use the neural bonus");
    }
    bonus = Bonus::thresholded(std::move(width), spec);
  } else {
    auto arch = std::dynamic_pointer_cast<const MlpClass>(cls);
    if (!arch) throw std::invalid_argument("neural bonus needs an MLP class");
    if (buffer.empty()) throw std::invalid_argument("neural bonus: empty buffer");
    WidthTrainConfig wcfg = config.width_train;
    wcfg.buffer_batch = std::min(wcfg.buffer_batch, buffer.size());
    const PairSampler rho = build_cover_distribution(mdp, cover);
    TrainedWidth trained = train_width(
        arch, buffer, [&rho](Rng& r) { return rho(r, nullptr); }, wcfg, rng);
    bonus = normalized_bonus(trained.as_function(), trained.query_set, na);
  }
  if (auto n = mdp.num_states()) bonus = bonus.tabulated(*n);
  return bonus;
}

ExploitationResult evaluate_exploitation(const Mdp& mdp, const PolicyCover& cover,
                                         FunctionClassPtr cls, const EniacConfig& config,
                                         Rng& rng) {
  const PairSampler rho = build_cover_distribution(mdp, cover);
  const Bonus none = Bonus::zero(mdp.num_actions());
  PolicyUpdateResult upd = policy_update(mdp, rho, none, cls, config.update, config.variant, rng);
  ExploitationResult out;
  out.policy = upd.mixture;
  out.counters = upd.counters;
  const RewardFn reward = mdp.reward_fn();
  double total = 0.0;
  for (std::size_t i = 0; i < config.exploit_rollouts; ++i)
    total += estimate_v(mdp, *upd.mixture, mdp.initial_state(rng), reward, rng, &out.counters);
  out.value = total / static_cast<double>(config.exploit_rollouts);
  if (const auto* tab = dynamic_cast<const TabularMdp*>(&mdp))
    out.exact_value = exact_value(*tab, *upd.mixture, reward_table(*tab));
  return out;
}

EniacResult run_eniac(const Mdp& mdp, FunctionClassPtr cls, const EniacConfig& config, Rng& rng,
                      const EpochCallback& on_epoch) {
  config.validate();
  if (!cls) throw std::invalid_argument("run_eniac: null class");
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t na = mdp.num_actions();

  EniacResult result;
  result.cover = PolicyCover(na);
  result.bonus_kind = config.bonus_kind.value_or(default_bonus_kind(*cls, config.variant));

  for (std::size_t n = 1; n <= config.epochs; ++n) {
    EpochRecord rec;
    rec.epoch = n;
    try {
      advance_buffer(result.buffer, mdp, result.cover, config.rollouts, rng, &result.counters);
      const Bonus bonus = build_epoch_bonus(mdp, cls, config, result.bonus_kind, result.buffer,
                                            result.cover, rng);
      const PairSampler rho = build_cover_distribution(mdp, result.cover);
      PolicyUpdateResult upd =
          policy_update(mdp, rho, bonus, cls, config.update, config.variant, rng);
      result.counters += upd.counters;
      for (const auto& d : upd.diagnostics)
        result.iterations.push_back(
            IterationRecord{n, d, config.record_wallclock ? seconds_since(t0) : 0.0});
      result.cover.add(upd.mixture);

      std::size_t unknown = 0;
      for (const auto& z : result.buffer.items())
        if (bonus(z.state, z.action) > 0.0) ++unknown;
      rec.buffer_size = result.buffer.size();
      rec.unknown_fraction = result.buffer.empty()
                                 ? 0.0
                                 : static_cast<double>(unknown) /
                                       static_cast<double>(result.buffer.size());

      const bool last = n == config.epochs;
      if (last || (config.evaluate_every > 0 && n % config.evaluate_every == 0)) {
        ExploitationResult ex = evaluate_exploitation(mdp, result.cover, cls, config, rng);
        result.counters += ex.counters;
        rec.exploit_value = ex.value;
        rec.exploit_value_exact = ex.exact_value;
        result.exploitation = std::move(ex);
      }
    } catch (const std::exception& e) {
      throw std::runtime_error("eniac epoch " + std::to_string(n) + ": " + e.what());
    }
    rec.env_rollouts = result.counters.rollouts;
    rec.env_steps = result.counters.steps;
    rec.wallclock = config.record_wallclock ? seconds_since(t0) : 0.0;
    result.epochs.push_back(rec);
    const bool evaluated = !std::isnan(rec.exploit_value);
    if (on_epoch && !on_epoch(rec, evaluated ? &*result.exploitation : nullptr)) break;
  }

  std::vector<PolicyPtr> outputs(result.cover.policies().begin() + 1,
                                 result.cover.policies().end());
  result.policy = std::make_shared<MixturePolicy>(std::move(outputs));
  return result;
}

void write_epoch_csv(std::ostream& out, const std::vector<EpochRecord>& rows) {
  out << "epoch,buffer_size,unknown_fraction,exploit_value,exploit_value_exact,env_rollouts,"
         "env_steps,wallclock\n";
  for (const auto& r : rows)
    out << r.epoch << ',' << r.buffer_size << ',' << format_number(r.unknown_fraction) << ','
        << format_number(r.exploit_value) << ',' << format_number(r.exploit_value_exact) << ','
        << r.env_rollouts << ',' << r.env_steps << ',' << format_number(r.wallclock) << '\n';
}

void write_iteration_csv(std::ostream& out, const std::vector<IterationRecord>& rows) {
  out << "epoch,iter,critic_loss,mean_target,entropy,wallclock\n";
  for (const auto& r : rows)
    out << r.epoch << ',' << r.diag.iter << ',' << format_number(r.diag.critic_loss) << ','
        << format_number(r.diag.mean_target) << ',' << format_number(r.diag.entropy) << ','
        << format_number(r.wallclock) << '\n';
}

}  // namespace eniac

#include "eniac/actor_critic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "eniac/dynamic_programming.hpp"

namespace eniac {

using Eigen::Index;
using Eigen::VectorXd;

void UpdateVariant::validate() const {
  if (mode == UpdateMode::compute && !(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("UpdateVariant: compute mode needs alpha in (0, 1)");
}

std::string UpdateVariant::name() const {
  std::string out = algorithm == UpdateAlgorithm::spi ? "spi" : "npg";
  out += mode == UpdateMode::sample ? "-sample" : "-compute";
  return out;
}

UpdateVariant UpdateVariant::parse(const std::string& name, double alpha) {
  UpdateVariant v;
  v.alpha = alpha;
  if (name == "spi-sample") {
  } else if (name == "spi-compute") {
    v.mode = UpdateMode::compute;
  } else if (name == "npg-sample") {
    v.algorithm = UpdateAlgorithm::npg;
  } else if (name == "npg-compute") {
    v.algorithm = UpdateAlgorithm::npg;
    v.mode = UpdateMode::compute;
  } else {
    throw std::invalid_argument("unknown update variant '" + name + "'");
  }
  return v;
}

std::string combiner_name(Combiner c) { return c == Combiner::sum ? "sum" : "max"; }

Combiner parse_combiner(const std::string& name) {
  if (name == "sum") return Combiner::sum;
  if (name == "max") return Combiner::max;
  throw std::invalid_argument("unknown reward combiner '" + name + "'");
}

RewardFn combined_reward(const Mdp& mdp, const Bonus& bonus, Combiner combiner) {
  if (bonus.is_zero()) return mdp.reward_fn();
  if (combiner == Combiner::sum)
    return [&mdp, bonus](const State& s, std::size_t a) { return mdp.reward(s, a) + bonus(s, a); };
  return [&mdp, bonus](const State& s, std::size_t a) {
    return std::max(mdp.reward(s, a), bonus(s, a));
  };
}

double effective_bonus(const Mdp& mdp, const Bonus& bonus, Combiner combiner, const State& s,
                       std::size_t a) {
  if (bonus.is_zero()) return 0.0;
  const double b = bonus(s, a);
  if (combiner == Combiner::sum) return b;
  const double r = mdp.reward(s, a);
  return std::max(r, b) - r;
}

double entropy(std::span<const double> probs) {
  double h = 0.0;
  for (double p : probs)
    if (p > 0.0) h -= p * std::log(p);
  return h;
}

void initial_probabilities(const UpdateVariant& variant, const Bonus& known, const State& s,
                           std::span<double> out) {
  const double n = static_cast<double>(out.size());
  if (variant.mode == UpdateMode::compute || known.is_zero()) {
    std::fill(out.begin(), out.end(), 1.0 / n);
    return;
  }
  const KnownStatus status = known.known_status(s);
  if (status.fully_known) {
    std::fill(out.begin(), out.end(), 1.0 / n);
    return;
  }
  std::fill(out.begin(), out.end(), 0.0);
  const double p = 1.0 / static_cast<double>(status.unknown_actions.size());
  for (std::size_t a : status.unknown_actions) out[a] = p;
}

namespace {

class InitialPolicy final : public Policy {
 public:
  InitialPolicy(UpdateVariant variant, Bonus known, std::size_t num_actions)
      : variant_(variant), known_(std::move(known)), num_actions_(num_actions) {}
  std::size_t num_actions() const override { return num_actions_; }
  void action_probabilities(const State& s, std::span<double> out) const override {
    initial_probabilities(variant_, known_, s, out);
  }

 private:
  UpdateVariant variant_;
  Bonus known_;
  std::size_t num_actions_;
};

// Logits -> action law shared by both policy kinds.
void finish(const UpdateVariant& variant, const Bonus& known, const State& s,
            std::span<double> logits, std::span<double> out) {
  if (variant.mode == UpdateMode::sample) {
    if (!known.state_known(s)) {
      initial_probabilities(variant, known, s, out);
      return;
    }
    softmax(logits, out);
    return;
  }
  softmax(logits, out);
  const double floor = variant.alpha / static_cast<double>(out.size());
  for (double& p : out) p = (1.0 - variant.alpha) * p + floor;
}

template <typename F>
void with_buffer(std::size_t n, F&& f) {
  if (n <= 32) {
    std::array<double, 32> buf{};
    f(std::span<double>(buf.data(), n));
  } else {
    std::vector<double> buf(n);
    f(std::span<double>(buf));
  }
}

}  // namespace

PolicyPtr init_policy(const UpdateVariant& variant, const Bonus& known, std::size_t num_actions) {
  variant.validate();
  return std::make_shared<InitialPolicy>(variant, known, num_actions);
}

SpiPolicy::SpiPolicy(FunctionClassPtr cls, UpdateVariant variant, Bonus known)
    : cls_(std::move(cls)), variant_(variant), known_(std::move(known)) {
  if (!cls_) throw std::invalid_argument("SpiPolicy: null class");
  variant_.validate();
}

void SpiPolicy::logits(const State& s, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  if (count_ == 0) return;
  if (cls_->is_linear()) {
    cls_->evaluate_all(summed_, s, out);
    return;
  }
  with_buffer(out.size(), [&](std::span<double> buf) {
    for (const Term* t = terms_.get(); t; t = t->prev.get()) {
      cls_->evaluate_all(t->params, s, buf);
      for (std::size_t a = 0; a < out.size(); ++a) out[a] += t->eta * buf[a];
    }
  });
}

void SpiPolicy::action_probabilities(const State& s, std::span<double> out) const {
  if (variant_.mode == UpdateMode::sample && !known_.state_known(s)) {
    initial_probabilities(variant_, known_, s, out);
    return;
  }
  with_buffer(out.size(), [&](std::span<double> lg) {
    logits(s, lg);
    finish(variant_, known_, s, lg, out);
  });
}

std::shared_ptr<const SpiPolicy> SpiPolicy::step(const Params& critic, double eta) const {
  if (static_cast<std::size_t>(critic.size()) != cls_->num_params())
    throw std::invalid_argument("spi_actor_step: critic has wrong parameter count");
  auto next = std::make_shared<SpiPolicy>(*this);
  if (cls_->is_linear()) {
    next->summed_ = count_ == 0 ? Params(eta * critic) : Params(summed_ + eta * critic);
  } else {
    next->terms_ = std::make_shared<const Term>(Term{critic, eta, terms_});
  }
  next->count_ = count_ + 1;
  return next;
}

NpgPolicy::NpgPolicy(DifferentiableClassPtr cls, UpdateVariant variant, Bonus known,
                     std::optional<Params> theta)
    : cls_(std::move(cls)), variant_(variant), known_(std::move(known)) {
  if (!cls_) throw std::invalid_argument("NpgPolicy: null class");
  variant_.validate();
  theta_ = theta ? std::move(*theta) : cls_->uniform_params();
  if (static_cast<std::size_t>(theta_.size()) != cls_->num_params())
    throw std::invalid_argument("NpgPolicy: theta has wrong dimension");
}

void NpgPolicy::action_probabilities(const State& s, std::span<double> out) const {
  if (variant_.mode == UpdateMode::sample && !known_.state_known(s)) {
    initial_probabilities(variant_, known_, s, out);
    return;
  }
  with_buffer(out.size(), [&](std::span<double> lg) {
    cls_->evaluate_all(theta_, s, lg);
    finish(variant_, known_, s, lg, out);
  });
}

std::shared_ptr<const NpgPolicy> NpgPolicy::step(const VectorXd& u, double eta) const {
  if (u.size() != theta_.size())
    throw std::invalid_argument("npg_actor_step: u has dimension " + std::to_string(u.size()) +
                                ", theta has " + std::to_string(theta_.size()));
  return std::make_shared<NpgPolicy>(cls_, variant_, known_, Params(theta_ + eta * u));
}

std::shared_ptr<const SpiPolicy> spi_actor_step(const SpiPolicy& policy, const Params& critic,
                                                double eta) {
  return policy.step(critic, eta);
}

std::shared_ptr<const NpgPolicy> npg_actor_step(const NpgPolicy& policy, const VectorXd& u,
                                                double eta) {
  return policy.step(u, eta);
}

void PolicyUpdateConfig::validate() const {
  if (iterations == 0) throw std::invalid_argument("PolicyUpdateConfig: T must be >= 1");
  if (samples == 0) throw std::invalid_argument("PolicyUpdateConfig: M must be >= 1");
  if (eta && !(*eta > 0.0)) throw std::invalid_argument("PolicyUpdateConfig: eta must be > 0");
  if (critic_bound && !(*critic_bound > 0.0))
    throw std::invalid_argument("PolicyUpdateConfig: critic bound must be > 0");
}

double default_spi_step(std::size_t num_actions, double critic_bound, std::size_t iterations) {
  return std::sqrt(std::log(static_cast<double>(num_actions)) /
                   (16.0 * critic_bound * critic_bound * static_cast<double>(iterations)));
}

double default_npg_step(std::size_t num_actions, const NpgSettings& npg, double gamma,
                        std::size_t iterations) {
  const double b = npg.coefficient_bound;
  const double d = std::max(b * npg.gradient_bound, 1.0 / (1.0 - gamma));
  return std::sqrt(std::log(static_cast<double>(num_actions)) /
                   ((16.0 * d * d + npg.hessian_bound * b * b) * static_cast<double>(iterations)));
}

double regret_bound(double critic_bound, std::size_t num_actions, std::size_t iterations) {
  return 8.0 * critic_bound *
         std::sqrt(std::log(static_cast<double>(num_actions)) / static_cast<double>(iterations));
}

std::vector<CriticSample> collect_critic_samples(const Mdp& mdp, const PairSampler& rho,
                                                 const Policy& policy, const Bonus& bonus,
                                                 std::size_t samples, UpdateAlgorithm algorithm,
                                                 Combiner combiner, Rng& rng,
                                                 RolloutCounters* counters) {
  const RewardFn reward = combined_reward(mdp, bonus, combiner);
  const std::size_t na = mdp.num_actions();
  std::vector<CriticSample> out;
  out.reserve(samples);
  std::vector<double> probs(na);
  for (std::size_t i = 0; i < samples; ++i) {
    StateAction z = rho(rng, counters);
    CriticSample smp{z.state, z.action, 0.0};
    if (algorithm == UpdateAlgorithm::spi) {
      smp.target = estimate_q(mdp, policy, z.state, z.action, reward, rng, counters) -
                   effective_bonus(mdp, bonus, combiner, z.state, z.action);
    } else {
      double bbar = effective_bonus(mdp, bonus, combiner, z.state, z.action);
      if (!bonus.is_zero()) {
        policy.action_probabilities(z.state, probs);
        for (std::size_t a = 0; a < na; ++a)
          bbar -= probs[a] * effective_bonus(mdp, bonus, combiner, z.state, a);
      }
      smp.target =
          estimate_advantage(mdp, policy, z.state, z.action, reward, rng, counters) - bbar;
    }
    out.push_back(std::move(smp));
  }
  return out;
}

namespace {

std::vector<CriticSample> exact_critic_samples(const Mdp& mdp, const Policy& policy,
                                               const Bonus& bonus, UpdateAlgorithm algorithm,
                                               Combiner combiner) {
  const auto* tab = dynamic_cast<const TabularMdp*>(&mdp);
  if (!tab) throw std::invalid_argument("exact critics need a tabular MDP");
  const std::size_t ns = tab->state_count(), na = tab->num_actions();
  const QTable reward = reward_table(*tab, combined_reward(mdp, bonus, combiner));
  const QTable q = exact_q_dp(mdp, policy, reward);
  const QTable pi = policy_table(policy, ns);
  const QTable adv = advantages(q, pi);
  std::vector<CriticSample> out;
  out.reserve(ns * na);
  for (std::size_t s = 0; s < ns; ++s) {
    const State st = State::discrete(s);
    double mean_b = 0.0;
    std::vector<double> beff(na);
    for (std::size_t a = 0; a < na; ++a) {
      beff[a] = reward(static_cast<Index>(s), static_cast<Index>(a)) - tab->reward_at(s, a);
      mean_b += pi(static_cast<Index>(s), static_cast<Index>(a)) * beff[a];
    }
    for (std::size_t a = 0; a < na; ++a) {
      const auto si = static_cast<Index>(s), ai = static_cast<Index>(a);
      const double target = algorithm == UpdateAlgorithm::spi ? q(si, ai) - beff[a]
                                                              : adv(si, ai) - (beff[a] - mean_b);
      out.push_back(CriticSample{st, a, target});
    }
  }
  return out;
}

PairSampler on_policy_sampler(const Mdp& mdp, PolicyPtr policy) {
  return [&mdp, policy](Rng& rng, RolloutCounters* counters) {
    OccupancyDraw d = sample_occupancy(mdp, *policy, start_from_initial(mdp), rng, counters);
    return StateAction{std::move(d.state), d.action};
  };
}

// Tabular MDPs roll out a materialized copy of each iterate.
PolicyPtr rollout_view(const Mdp& mdp, PolicyPtr policy) {
  if (auto n = mdp.num_states()) return TabularPolicy::tabulate(*policy, *n);
  return policy;
}

}  // namespace

PolicyUpdateResult policy_update(const Mdp& mdp, const PairSampler& rho, const Bonus& bonus,
                                 FunctionClassPtr cls, const PolicyUpdateConfig& config,
                                 const UpdateVariant& variant, Rng& rng) {
  config.validate();
  variant.validate();
  if (!cls) throw std::invalid_argument("policy_update: null class");
  if (cls->num_actions() != mdp.num_actions())
    throw std::invalid_argument("policy_update: class and MDP disagree on the action count");

  const std::size_t na = mdp.num_actions();
  const std::size_t T = config.iterations;
  const double w = cls->sup_bound();

  PolicyUpdateResult result;
  std::shared_ptr<const SpiPolicy> spi;
  std::shared_ptr<const NpgPolicy> npg;
  DifferentiableClassPtr diff;
  if (variant.algorithm == UpdateAlgorithm::spi) {
    spi = std::make_shared<SpiPolicy>(cls, variant, bonus);
    result.eta = config.eta ? *config.eta
                            : default_spi_step(na, config.critic_bound.value_or(w), T);
  } else {
    diff = std::dynamic_pointer_cast<const DifferentiableClass>(cls);
    if (!diff) throw std::invalid_argument("policy_update: NPG needs a differentiable class");
    npg = std::make_shared<NpgPolicy>(diff, variant, bonus);
    result.eta = config.eta ? *config.eta : default_npg_step(na, config.npg, mdp.gamma(), T);
  }
  const auto* mlp = dynamic_cast<const MlpClass*>(cls.get());

  std::vector<double> probs(na);
  for (std::size_t t = 0; t < T; ++t) {
    const PolicyPtr current =
        spi ? PolicyPtr(spi) : PolicyPtr(std::static_pointer_cast<const Policy>(npg));
    const PolicyPtr view = rollout_view(mdp, current);
    result.iterates.push_back(view);

    IterationDiagnostics diag;
    diag.iter = t;
    try {
      std::vector<CriticSample> samples =
          config.critic == CriticMode::exact_dp
              ? exact_critic_samples(mdp, *view, bonus, variant.algorithm, config.combiner)
              : collect_critic_samples(mdp, config.on_policy ? on_policy_sampler(mdp, view) : rho,
                                       *view, bonus, config.samples, variant.algorithm,
                                       config.combiner, rng, &result.counters);

      for (const auto& smp : samples) {
        diag.mean_target += smp.target;
        view->action_probabilities(smp.state, probs);
        diag.entropy += entropy(probs);
      }
      diag.mean_target /= static_cast<double>(samples.size());
      diag.entropy /= static_cast<double>(samples.size());

      if (spi) {
        FitResult fit = fit_critic_spi(*cls, samples);
        if (mlp && !(fit.loss <= 4.0 * w * w)) {
          ++diag.fit_retries;
          fit = mlp->fit(samples, 0.5 * mlp->fit_config().step_size);
          if (!(fit.loss <= 4.0 * w * w))
            throw std::runtime_error("critic diverged (loss " + std::to_string(fit.loss) +
                                     " > 4 W^2 = " + std::to_string(4.0 * w * w) +
                                     ") after retry with half step size");
        }
        diag.critic_loss = fit.loss;
        spi = spi_actor_step(*spi, fit.params, result.eta);
      } else {
        const TangentFeatureMap tangent(diff, npg->theta(), config.npg.coefficient_bound,
                                        config.npg.gradient_bound, config.npg.hessian_bound);
        FitResult fit = fit_critic_npg(tangent, samples);
        diag.critic_loss = fit.loss;
        npg = npg_actor_step(*npg, fit.params, result.eta);
      }
    } catch (const std::exception& e) {
      throw std::runtime_error("policy_update iteration " + std::to_string(t) + ": " + e.what());
    }
    diag.rollouts = result.counters.rollouts;
    result.diagnostics.push_back(diag);
  }

  const PolicyPtr last = spi ? PolicyPtr(spi) : PolicyPtr(npg);
  result.final_iterate = rollout_view(mdp, last);
  result.mixture = std::make_shared<MixturePolicy>(result.iterates);
  return result;
}

}  // namespace eniac

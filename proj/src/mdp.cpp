#include "eniac/mdp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace eniac {

State State::continuous(std::initializer_list<double> values, std::size_t tag) {
  State s;
  s.index = tag;
  s.x.resize(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double v : values) s.x[i++] = v;
  return s;
}

RewardFn Mdp::reward_fn() const {
  return [this](const State& s, std::size_t a) { return reward(s, a); };
}

TabularMdp::TabularMdp(std::vector<std::vector<std::vector<double>>> transitions,
                       std::vector<std::vector<double>> rewards, double gamma,
                       std::size_t initial_state)
    : num_states_(transitions.size()),
      num_actions_(transitions.empty() ? 0 : transitions.front().size()),
      transitions_(std::move(transitions)),
      rewards_(std::move(rewards)),
      gamma_(gamma),
      initial_state_(initial_state) {
  if (num_states_ == 0 || num_actions_ == 0)
    throw std::invalid_argument("TabularMdp: empty state or action space");
  if (!(gamma_ > 0.0 && gamma_ < 1.0))
    throw std::invalid_argument("TabularMdp: gamma must lie strictly inside (0, 1)");
  if (initial_state_ >= num_states_)
    throw std::invalid_argument("TabularMdp: initial state out of range");
  if (rewards_.size() != num_states_)
    throw std::invalid_argument("TabularMdp: reward table has wrong state count");

  support_.resize(num_states_ * num_actions_);
  for (std::size_t s = 0; s < num_states_; ++s) {
    if (transitions_[s].size() != num_actions_ || rewards_[s].size() != num_actions_)
      throw std::invalid_argument("TabularMdp: action space differs at state " +
                                  std::to_string(s));
    for (std::size_t a = 0; a < num_actions_; ++a) {
      const auto& row = transitions_[s][a];
      if (row.size() != num_states_)
        throw std::invalid_argument("TabularMdp: transition row has wrong length");
      const double r = rewards_[s][a];
      if (!(r >= 0.0 && r <= 1.0))
        throw std::invalid_argument("TabularMdp: reward outside [0, 1] at (" +
                                    std::to_string(s) + ", " + std::to_string(a) + ")");
      double total = 0.0;
      Support& sup = support_[s * num_actions_ + a];
      for (std::size_t n = 0; n < num_states_; ++n) {
        if (row[n] < 0.0) throw std::invalid_argument("TabularMdp: negative probability");
        if (row[n] > 0.0) {
          total += row[n];
          sup.next.push_back(n);
          sup.cumulative.push_back(total);
        }
      }
      if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("TabularMdp: row (" + std::to_string(s) + ", " +
                                    std::to_string(a) + ") sums to " + std::to_string(total));
    }
  }
}

State TabularMdp::step(const State& s, std::size_t a, Rng& rng) const {
  const Support& sup = support_[s.index * num_actions_ + a];
  if (sup.next.size() == 1) return State::discrete(sup.next.front());
  const double u = rng.uniform() * sup.cumulative.back();
  const auto it = std::upper_bound(sup.cumulative.begin(), sup.cumulative.end(), u);
  const auto k = std::min<std::size_t>(it - sup.cumulative.begin(), sup.next.size() - 1);
  return State::discrete(sup.next[k]);
}

std::size_t Policy::act(const State& s, Rng& rng) const {
  const std::size_t n = num_actions();
  if (n <= 32) {
    std::array<double, 32> buf;
    std::span<double> probs(buf.data(), n);
    action_probabilities(s, probs);
    return sample_index(probs, rng);
  }
  std::vector<double> probs(n);
  action_probabilities(s, probs);
  return sample_index(probs, rng);
}

std::vector<double> Policy::probabilities(const State& s) const {
  std::vector<double> out(num_actions());
  action_probabilities(s, out);
  return out;
}

void UniformPolicy::action_probabilities(const State&, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(num_actions_));
}

TabularPolicy::TabularPolicy(std::vector<std::vector<double>> table)
    : num_actions_(table.empty() ? 0 : table.front().size()), table_(std::move(table)) {
  for (const auto& row : table_) {
    if (row.size() != num_actions_)
      throw std::invalid_argument("TabularPolicy: ragged table");
    double total = 0.0;
    for (double p : row) total += p;
    if (std::abs(total - 1.0) > 1e-9)
      throw std::invalid_argument("TabularPolicy: row does not sum to 1");
  }
}

std::shared_ptr<TabularPolicy> TabularPolicy::tabulate(const Policy& policy,
                                                       std::size_t num_states) {
  std::vector<std::vector<double>> table(num_states);
  for (std::size_t s = 0; s < num_states; ++s)
    table[s] = policy.probabilities(State::discrete(s));
  return std::make_shared<TabularPolicy>(std::move(table));
}

std::shared_ptr<TabularPolicy> TabularPolicy::deterministic(
    const std::vector<std::size_t>& actions, std::size_t num_actions) {
  std::vector<std::vector<double>> table(actions.size(), std::vector<double>(num_actions, 0.0));
  for (std::size_t s = 0; s < actions.size(); ++s) table[s].at(actions[s]) = 1.0;
  return std::make_shared<TabularPolicy>(std::move(table));
}

void TabularPolicy::action_probabilities(const State& s, std::span<double> out) const {
  const auto& row = table_.at(s.index);
  std::copy(row.begin(), row.end(), out.begin());
}

MixturePolicy::MixturePolicy(std::vector<PolicyPtr> components)
    : components_(std::move(components)) {
  if (components_.empty()) throw std::invalid_argument("MixturePolicy: no components");
  for (const auto& c : components_)
    if (!c || c->num_actions() != components_.front()->num_actions())
      throw std::invalid_argument("MixturePolicy: inconsistent components");
}

std::size_t MixturePolicy::num_actions() const { return components_.front()->num_actions(); }

void MixturePolicy::action_probabilities(const State& s, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  std::vector<double> buf(out.size());
  for (const auto& c : components_) {
    c->action_probabilities(s, buf);
    for (std::size_t a = 0; a < out.size(); ++a) out[a] += buf[a];
  }
  const double scale = 1.0 / static_cast<double>(components_.size());
  for (double& p : out) p *= scale;
}

const Policy& MixturePolicy::episode_policy(Rng& rng) const {
  const Policy& chosen = *components_[rng.index(components_.size())];
  return chosen.episode_policy(rng);
}

void softmax(std::span<const double> logits, std::span<double> out) {
  double hi = logits[0];
  for (double v : logits) hi = std::max(hi, v);
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - hi);
    total += out[i];
  }
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] /= total;
}

std::size_t sample_index(std::span<const double> probs, Rng& rng) {
  double u = rng.uniform();
  for (std::size_t i = 0; i < probs.size(); ++i) {
    u -= probs[i];
    if (u < 0.0) return i;
  }
  // Round-off: return the last action with positive mass.
  for (std::size_t i = probs.size(); i-- > 0;)
    if (probs[i] > 0.0) return i;
  return probs.size() - 1;
}

}  // namespace eniac

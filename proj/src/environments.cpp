#include "eniac/environments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace eniac {

std::size_t lock_correct_action(std::size_t h, std::size_t num_actions) {
  return (5 * h + 1) % num_actions;
}

TabularMdp make_combination_lock(std::size_t horizon, double delta, double gamma,
                                 std::size_t num_actions) {
  if (horizon < 2) throw std::invalid_argument("combination lock: H must be >= 2");
  if (!(delta >= 0.0 && delta <= 0.1))
    throw std::invalid_argument("combination lock: delta must lie in [0, 0.1]");
  if (num_actions < 2) throw std::invalid_argument("combination lock: need at least 2 actions");
  const std::size_t decoy = horizon, dead = horizon + 1, n = horizon + 2;
  std::vector<std::vector<std::vector<double>>> p(
      n, std::vector<std::vector<double>>(num_actions, std::vector<double>(n, 0.0)));
  std::vector<std::vector<double>> r(n, std::vector<double>(num_actions, 0.0));
  for (std::size_t h = 0; h + 1 < horizon; ++h)
    for (std::size_t a = 0; a < num_actions; ++a)
      p[h][a][a == lock_correct_action(h, num_actions) ? h + 1 : decoy] = 1.0;
  for (std::size_t a = 0; a < num_actions; ++a) {
    p[horizon - 1][a][horizon - 1] = 1.0;
    r[horizon - 1][a] = 1.0;
    p[decoy][a][dead] = 1.0;
    r[decoy][a] = delta;
    p[dead][a][dead] = 1.0;
  }
  return TabularMdp(std::move(p), std::move(r), gamma, 0);
}

TabularMdp make_bandit(const std::vector<double>& means, double gamma) {
  if (means.empty()) throw std::invalid_argument("bandit: need at least one arm");
  for (double m : means)
    if (!(m >= 0.0 && m <= 1.0)) throw std::invalid_argument("bandit: arm mean outside [0, 1]");
  std::vector<std::vector<std::vector<double>>> p(
      1, std::vector<std::vector<double>>(means.size(), std::vector<double>{1.0}));
  return TabularMdp(std::move(p), {means}, gamma, 0);
}

TabularMdp make_gridworld(std::size_t width, std::size_t height, double slip, double gamma) {
  if (width == 0 || height == 0 || width * height < 2)
    throw std::invalid_argument("gridworld: need at least two cells");
  if (!(slip >= 0.0 && slip <= 1.0)) throw std::invalid_argument("gridworld: slip outside [0, 1]");
  const std::size_t n = width * height, goal = n - 1;
  auto move = [&](std::size_t s, std::size_t dir) {
    std::size_t x = s % width, y = s / width;
    switch (dir) {
      case 0: y = std::min(y + 1, height - 1); break;
      case 1: x = std::min(x + 1, width - 1); break;
      case 2: y = y == 0 ? 0 : y - 1; break;
      default: x = x == 0 ? 0 : x - 1; break;
    }
    return y * width + x;
  };
  std::vector<std::vector<std::vector<double>>> p(
      n, std::vector<std::vector<double>>(4, std::vector<double>(n, 0.0)));
  std::vector<std::vector<double>> r(n, std::vector<double>(4, 0.0));
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t a = 0; a < 4; ++a) {
      if (s == goal) {
        p[s][a][s] = 1.0;
        r[s][a] = 1.0;
        continue;
      }
      p[s][a][move(s, a)] += 1.0 - slip;
      for (std::size_t d = 0; d < 4; ++d) p[s][a][move(s, d)] += slip / 4.0;
    }
  return TabularMdp(std::move(p), std::move(r), gamma, 0);
}

void MountainCarPhysics::step(double& position, double& velocity, double force) {
  force = std::clamp(force, -1.0, 1.0);
  velocity += force * kPower - 0.0025 * std::cos(3.0 * position);
  velocity = std::clamp(velocity, -kMaxSpeed, kMaxSpeed);
  position += velocity;
  position = std::clamp(position, kMinPosition, kMaxPosition);
  if (position == kMinPosition && velocity < 0.0) velocity = 0.0;
}

bool MountainCarPhysics::at_goal(double position, double velocity) {
  return position >= kGoalPosition && velocity >= kGoalVelocity;
}

MountainCarMdp::MountainCarMdp(std::size_t action_grid_size, std::size_t horizon, double gamma)
    : horizon_(horizon), gamma_(gamma) {
  if (action_grid_size < 2) throw std::invalid_argument("mountain car: action grid needs >= 2 points");
  if (horizon == 0) throw std::invalid_argument("mountain car: horizon must be positive");
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("mountain car: gamma outside (0, 1)");
  for (std::size_t i = 0; i < action_grid_size; ++i)
    forces_.push_back(-1.0 + 2.0 * static_cast<double>(i) /
                                 static_cast<double>(action_grid_size - 1));
}

State MountainCarMdp::initial_state(Rng& rng) const {
  return State::continuous({rng.uniform(-0.6, -0.4), 0.0}, 0);
}

bool MountainCarMdp::episode_over(const State& s) const {
  return s.index >= horizon_ || MountainCarPhysics::at_goal(s.x[0], s.x[1]);
}

State MountainCarMdp::step(const State& s, std::size_t a, Rng& rng) const {
  if (episode_over(s)) return initial_state(rng);
  double pos = s.x[0], vel = s.x[1];
  MountainCarPhysics::step(pos, vel, forces_.at(a));
  return State::continuous({pos, vel}, s.index + 1);
}

double MountainCarMdp::raw_reward(const State& s, std::size_t a) const {
  if (episode_over(s)) return 0.0;
  const double f = forces_.at(a);
  double pos = s.x[0], vel = s.x[1];
  MountainCarPhysics::step(pos, vel, f);
  return -0.1 * f * f + (MountainCarPhysics::at_goal(pos, vel) ? 100.0 : 0.0);
}

double MountainCarMdp::scale_reward(double raw) { return (raw + 0.1) / 100.1; }

double MountainCarMdp::reward(const State& s, std::size_t a) const {
  // Reset transitions are outside every episode and pay nothing.
  if (episode_over(s)) return 0.0;
  return scale_reward(raw_reward(s, a));
}

double MountainCarMdp::episode_return(const Policy& policy, Rng& rng, std::size_t* steps) const {
  const Policy& pi = policy.episode_policy(rng);
  State s = initial_state(rng);
  double total = 0.0;
  std::size_t t = 0;
  while (!episode_over(s)) {
    const std::size_t a = pi.act(s, rng);
    total += raw_reward(s, a);
    s = step(s, a, rng);
    ++t;
  }
  if (steps) *steps += t;
  return total;
}

std::shared_ptr<MountainCarMdp> make_mountain_car(std::size_t action_grid_size) {
  return std::make_shared<MountainCarMdp>(action_grid_size, 100, 0.99);
}

std::vector<std::size_t> network_preset(std::size_t layers) {
  switch (layers) {
    case 2: return {64, 64};
    case 4: return {64, 128, 128, 64};
    case 6: return {64, 64, 128, 128, 64, 64};
  }
  throw std::invalid_argument("network preset must be 2, 4 or 6 layers");
}

namespace {

Eigen::VectorXd box_center() {
  Eigen::VectorXd c(2);
  c << 0.5 * (MountainCarPhysics::kMinPosition + MountainCarPhysics::kMaxPosition), 0.0;
  return c;
}

Eigen::VectorXd box_half_range() {
  Eigen::VectorXd h(2);
  h << 0.5 * (MountainCarPhysics::kMaxPosition - MountainCarPhysics::kMinPosition),
      MountainCarPhysics::kMaxSpeed;
  return h;
}

}  // namespace

std::shared_ptr<MlpClass> mountain_car_mlp(const MountainCarMdp& mdp,
                                           std::vector<std::size_t> hidden, double sup_bound,
                                           MlpFitConfig fit) {
  return MlpClass::for_continuous(box_center(), box_half_range(), std::move(hidden),
                                  mdp.num_actions(), sup_bound, fit);
}

std::shared_ptr<LinearClass> mountain_car_linear(const MountainCarMdp& mdp,
                                                 std::size_t bins_per_dim, double bound) {
  Eigen::VectorXd lo = box_center() - box_half_range(), hi = box_center() + box_half_range();
  auto features = std::make_shared<RadialBinFeatures>(lo, hi, bins_per_dim, mdp.num_actions());
  return std::make_shared<LinearClass>(features, bound);
}

}  // namespace eniac

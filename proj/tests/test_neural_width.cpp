#include <cmath>
#include <sstream>

#include "doctest.h"
#include "eniac/neural_width.hpp"
#include "eniac/presets.hpp"

using namespace eniac;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

std::shared_ptr<MlpClass> small_arch() {
  VectorXd offset = VectorXd::Zero(2), scale = VectorXd::Constant(2, 2.0);
  return MlpClass::for_continuous(offset, scale, {3}, 1, 1e9);
}

// 2-3-1 ReLU network written out by hand: W1 (3x2 column-major), b1, W2 (1x3), b2.
double hand_forward(const VectorXd& th, double x0, double y0) {
  const double x = x0 / 2.0, y = y0 / 2.0;
  double out = th[12];
  for (int j = 0; j < 3; ++j) {
    const double pre = th[j] * x + th[3 + j] * y + th[6 + j];
    out += th[9 + j] * std::max(0.0, pre);
  }
  return out;
}

Dataset points(std::initializer_list<std::pair<double, double>> xs) {
  Dataset d;
  for (auto [x, y] : xs) d.append(State::continuous({x, y}), 0);
  return d;
}

}  // namespace

TEST_CASE("normalized bonus divides by twice the query-set maximum") {
  Dataset z = points({{0, 0}, {1, 0}, {2, 0}});
  const WidthFn w = [](const State& s, std::size_t) { return std::pow(2.0, s.x[0]); };
  const Bonus b = normalized_bonus(w, z, 1);
  CHECK(b(z[0].state, 0) == doctest::Approx(0.125));
  CHECK(b(z[1].state, 0) == doctest::Approx(0.25));
  CHECK(b(z[2].state, 0) == doctest::Approx(0.5));
  const WidthFn none = [](const State&, std::size_t) { return 0.0; };
  CHECK(normalized_bonus(none, z, 1)(z[1].state, 0) == 0.0);
}

TEST_CASE("width loss matches hand arithmetic") {
  auto arch = small_arch();
  Rng rng(1);
  VectorXd f(13), g(13);
  for (int i = 0; i < 13; ++i) {
    f[i] = rng.uniform(-1, 1);
    g[i] = rng.uniform(-1, 1);
  }
  REQUIRE(arch->num_params() == 13);
  WidthNetPair pair(arch, f, g);
  const Dataset q = points({{0.3, -0.2}, {1.5, 0.7}});
  const Dataset buf = points({{-1.0, 0.4}, {0.1, 0.1}, {0.9, -1.2}});
  const double lambda = 0.1, lambda1 = 0.01;

  double stretch = 0.0, level = 0.0, tie = 0.0;
  for (const auto& z : q.items()) {
    const double d = hand_forward(f, z.state.x[0], z.state.x[1]) - hand_forward(g, z.state.x[0], z.state.x[1]);
    stretch += d * d / 2.0;
    level += d / 2.0;
  }
  for (const auto& z : buf.items()) {
    const double d = hand_forward(f, z.state.x[0], z.state.x[1]) - hand_forward(g, z.state.x[0], z.state.x[1]);
    tie += d * d / 3.0;
  }
  const WidthLoss loss = width_loss(pair, q.items(), buf.items(), lambda, lambda1);
  CHECK(std::abs(loss.stretch - lambda * stretch) < 1e-9);
  CHECK(std::abs(loss.tie + tie) < 1e-9);
  CHECK(std::abs(loss.degeneracy + lambda1 * level) < 1e-9);
  CHECK(std::abs(loss.total() - (lambda * stretch - tie - lambda1 * level)) < 1e-9);
  CHECK(std::abs(pair.difference(q[1].state, 0) -
                 (hand_forward(f, 1.5, 0.7) - hand_forward(g, 1.5, 0.7))) < 1e-12);

  // The analytic gradient against central differences of the same loss.
  const VectorXd grad = width_loss_gradient(pair, q.items(), buf.items(), lambda, lambda1);
  for (int i = 0; i < 13; ++i) {
    VectorXd up = f, down = f;
    up[i] += 1e-6;
    down[i] -= 1e-6;
    const double num = (width_loss(WidthNetPair(arch, up, g), q.items(), buf.items(), lambda, lambda1).total() -
                        width_loss(WidthNetPair(arch, down, g), q.items(), buf.items(), lambda, lambda1).total()) /
                       2e-6;
    CHECK(grad[i] == doctest::Approx(num).epsilon(1e-4).scale(1.0));
  }
  CHECK_THROWS(width_loss(pair, {}, buf.items(), lambda, lambda1));
}

TEST_CASE("fresh pair has zero width and a stable hash") {
  auto arch = small_arch();
  Rng rng(2);
  const WidthNetPair pair = WidthNetPair::initialize(arch, rng);
  CHECK(pair.width(State::continuous({0.5, 0.5}), 0) == 0.0);
  CHECK(params_hash(pair.f()) == params_hash(pair.f_prime()));
  VectorXd other = pair.f();
  other[0] += 1e-12;
  CHECK(params_hash(other) != params_hash(pair.f()));
}

TEST_CASE("training keeps f' frozen and clips every update") {
  Rng rng(3);
  RingFixture ring = make_ring_fixture(rng, 200, 500, 10);
  WidthTrainConfig cfg;
  cfg.outer_iters = 20;
  cfg.inner_iters = 3;
  cfg.learning_rate = 0.01;
  cfg.gradient_clip = 0.5;
  Rng train_rng(4);
  const TrainedWidth out = train_width(ring.arch, ring.buffer, ring.query_set, cfg, train_rng);
  Rng again(4);
  const WidthNetPair fresh = WidthNetPair::initialize(ring.arch, again);
  CHECK(params_hash(out.pair.f_prime()) == params_hash(fresh.f_prime()));
  CHECK(out.max_update_norm <= cfg.learning_rate * cfg.gradient_clip + 1e-12);
  CHECK(out.max_update_norm > 0.0);
  CHECK(out.log.size() == cfg.outer_iters);
  std::ostringstream log;
  write_width_log(log, out.log);
  CHECK(log.str().rfind("iter,", 0) == 0);
}

TEST_CASE("zero outer iterations leaves a zero width") {
  Rng rng(5);
  RingFixture ring = make_ring_fixture(rng, 200, 100, 10);
  WidthTrainConfig cfg;
  cfg.outer_iters = 0;
  const TrainedWidth out = train_width(ring.arch, ring.buffer, ring.query_set, cfg, rng);
  for (const auto& z : ring.far_probes.items()) CHECK(out.pair.width(z.state, z.action) == 0.0);
}

TEST_CASE("training rejects a buffer smaller than the minibatch") {
  Rng rng(6);
  RingFixture ring = make_ring_fixture(rng, 100, 100, 10);
  WidthTrainConfig cfg;  // buffer_batch 160
  CHECK_THROWS_AS(train_width(ring.arch, ring.buffer, ring.query_set, cfg, rng), std::invalid_argument);
  cfg.buffer_batch = 50;
  cfg.learning_rate = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("query sampler overload draws the configured number of pairs") {
  Rng rng(7);
  RingFixture ring = make_ring_fixture(rng, 200, 10, 10);
  WidthTrainConfig cfg;
  cfg.outer_iters = 2;
  cfg.query_set_size = 37;
  const QuerySampler sampler = [](Rng& r) {
    return StateAction{State::continuous({r.uniform(-2, 2), r.uniform(-2, 2)}), 0};
  };
  const TrainedWidth out = train_width(ring.arch, ring.buffer, sampler, cfg, rng);
  CHECK(out.query_set.size() == 37);
}

TEST_CASE("ring fixture geometry") {
  Rng rng(8);
  RingFixture ring = make_ring_fixture(rng, 300, 300, 20);
  for (const auto& z : ring.buffer.items()) {
    const double r = std::hypot(z.state.x[0], z.state.x[1]);
    CHECK(r >= 0.95 - 1e-12);
    CHECK(r <= 1.05 + 1e-12);
  }
  for (const auto& z : ring.far_probes.items()) {
    const double r = std::hypot(z.state.x[0], z.state.x[1]);
    CHECK((r < 0.3 || r >= 1.7));
  }
  CHECK(ring.buffer_probes.size() == 20);
}

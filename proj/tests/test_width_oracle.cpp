#include <cmath>
#include <sstream>

#include "doctest.h"
#include "eniac/eluder.hpp"
#include "eniac/width.hpp"
#include "width_oracles.hpp"

using namespace eniac;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

std::shared_ptr<TableFeatures> plane_features(const std::vector<Eigen::Vector2d>& points) {
  std::vector<std::vector<VectorXd>> table;
  for (const auto& p : points) table.push_back({VectorXd(p)});
  return std::make_shared<TableFeatures>(table);
}

State pt(std::size_t i) { return State::discrete(i); }

}  // namespace

TEST_CASE("linear width: vacuous data hits the norm cap") {
  auto phi = plane_features({{1, 0}, {0, 1}});
  CHECK(width_linear(phi, 1.0, Dataset{}, 0.1, 0.0, pt(0), 0) == doctest::Approx(2.0));
}

TEST_CASE("linear width: one observed direction") {
  auto phi = plane_features({{1, 0}, {0, 1}});
  Dataset z;
  z.append(pt(0), 0);
  CHECK(width_linear(phi, 1.0, z, 0.1, 0.0, pt(0), 0) == doctest::Approx(0.1));
  CHECK(width_linear(phi, 1.0, z, 0.1, 0.0, pt(1), 0) == doctest::Approx(2.0));
  LinearWidthOracle oracle(phi, 1.0, 0.1, 0.0);
  oracle.append(z);
  oracle.freeze();
  CHECK(oracle.width_exact(pt(0), 0) == doctest::Approx(0.1));
  CHECK(oracle.width_exact(pt(1), 0) == doctest::Approx(2.0));
}

TEST_CASE("linear width: queries need a frozen snapshot") {
  LinearWidthOracle oracle(plane_features({{1, 0}}), 1.0, 0.1);
  oracle.append(pt(0), 0);
  CHECK_THROWS_AS(oracle.width(pt(0), 0), std::logic_error);
  CHECK(oracle.ridge() == doctest::Approx(0.01 / 4.0));
}

TEST_CASE("ridge width is an upper bound on the exact width") {
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Eigen::Vector2d> pts;
    for (int i = 0; i < 5; ++i) pts.emplace_back(rng.uniform(-1, 1), rng.uniform(-1, 1));
    auto phi = plane_features(pts);
    LinearWidthOracle ridge(phi, 1.0, 0.2), exact(phi, 1.0, 0.2, 0.0);
    for (int i = 0; i < 2; ++i) {
      const std::size_t k = rng.index(5);
      ridge.append(pt(k), 0);
      exact.append(pt(k), 0);
    }
    ridge.freeze();
    exact.freeze();
    for (std::size_t q = 0; q < 5; ++q) {
      CHECK(ridge.width(pt(q), 0) >= exact.width_exact(pt(q), 0) - 1e-9);
      CHECK(exact.width(pt(q), 0) >= exact.width_exact(pt(q), 0) - 1e-9);
    }
  }
}

TEST_CASE("linear width agrees with a lattice scan of the coefficient ball") {
  Rng rng(2);
  int checked = 0;
  while (checked < 5) {
    MatrixXd X(3, 2);
    for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = rng.uniform(-1, 1);
    const Eigen::Vector2d q(rng.uniform(-1, 1), rng.uniform(-1, 1));
    const double B = 1.0, eps = 0.3;
    std::vector<Eigen::Vector2d> pts = {X.row(0), X.row(1), X.row(2), q};
    LinearWidthOracle oracle(plane_features(pts), B, eps, 0.0);
    for (std::size_t i = 0; i < 3; ++i) oracle.append(pt(i), 0);
    oracle.freeze();
    const double w = oracle.width(pt(3), 0);
    if (w >= 2.0 * B * q.norm() - 1e-9) continue;  // cap active
    const double brute = oracles::linear_width_lattice(X, B, eps, q, 0.004);
    CHECK(std::abs(w - brute) <= 0.02 * brute);
    CHECK(oracle.width_exact(pt(3), 0) == doctest::Approx(w).epsilon(1e-6));
    ++checked;
  }
}

TEST_CASE("finite width matches pair enumeration") {
  Rng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t nf = 1 + rng.index(5), np = 2 + rng.index(5);
    auto tables = oracles::random_finite(rng, nf, np);
    auto cls = std::make_shared<FiniteClass>(tables);
    Dataset z;
    std::vector<std::size_t> zi;
    for (std::size_t k = 0; k < rng.index(4); ++k) {
      zi.push_back(rng.index(np));
      z.append(pt(zi.back()), 0);
    }
    FiniteWidthOracle oracle(cls, z, 0.3);
    for (std::size_t x = 0; x < np; ++x) {
      CHECK(oracle.width(pt(x), 0) == doctest::Approx(oracles::finite_width(tables, zi, 0.3, x)));
      CHECK(width_finite(*cls, z, 0.3, pt(x), 0) == oracle.width(pt(x), 0));
    }
  }
}

TEST_CASE("finite width trivial cases") {
  MatrixXd one(2, 1);
  one << 0.2, 0.7;
  auto single = std::make_shared<FiniteClass>(std::vector<MatrixXd>{one});
  CHECK(FiniteWidthOracle(single, Dataset{}, 0.1).width(pt(0), 0) == 0.0);
  MatrixXd two(2, 1);
  two << 0.9, 0.1;
  auto pair = std::make_shared<FiniteClass>(std::vector<MatrixXd>{one, two});
  CHECK(FiniteWidthOracle(pair, Dataset{}, 0.1).width(pt(0), 0) == doctest::Approx(0.7));
}

TEST_CASE("width is monotone in the data and the radius") {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    auto tables = oracles::random_finite(rng, 5, 6);
    auto cls = std::make_shared<FiniteClass>(tables);
    Dataset z;
    std::vector<double> prev(6, 1e9);
    for (int step = 0; step < 6; ++step) {
      FiniteWidthOracle oracle(cls, z, 0.25);
      for (std::size_t x = 0; x < 6; ++x) {
        const double w = oracle.width(pt(x), 0);
        CHECK(w <= prev[x] + 1e-9);
        CHECK(FiniteWidthOracle(cls, z, 0.5).width(pt(x), 0) >= w - 1e-12);
        prev[x] = w;
      }
      z.append(pt(rng.index(6)), 0);
    }
  }
}

TEST_CASE("points inside the data have width at most eps") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    auto cls = std::make_shared<FiniteClass>(oracles::random_finite(rng, 5, 6));
    Dataset z;
    for (int k = 0; k < 3; ++k) z.append(pt(rng.index(6)), 0);
    FiniteWidthOracle oracle(cls, z, 0.2);
    for (const auto& item : z.items()) CHECK(oracle.width(item.state, item.action) <= 0.2 + 1e-12);
  }
}

TEST_CASE("bonus magnitudes") {
  BonusSpec sample;
  sample.beta = 0.05;
  sample.gamma = 0.99;
  CHECK(bonus(0.01, sample) == 0.0);
  CHECK(bonus(0.05, sample) == doctest::Approx(100.0));
  BonusSpec compute = sample;
  compute.variant = BonusVariant::compute;
  compute.num_actions = 4;
  compute.alpha = 0.1;
  CHECK(bonus(1.0, compute) == doctest::Approx(4000.0));
  CHECK(default_beta(0.1, 0.9) == doctest::Approx(0.005));
  BonusSpec bad = sample;
  bad.beta = 0.0;
  CHECK_THROWS(bad.validate());
}

TEST_CASE("known set classification") {
  const WidthFn zero = [](const State&, std::size_t) { return 0.0; };
  CHECK(known_set_query(zero, 0.1, pt(0), 3).fully_known);
  const WidthFn one_hot = [](const State&, std::size_t a) { return a == 2 ? 0.5 : 0.01; };
  const KnownStatus st = known_set_query(one_hot, 0.1, pt(0), 3);
  CHECK_FALSE(st.fully_known);
  REQUIRE(st.unknown_actions.size() == 1);
  CHECK(st.unknown_actions[0] == 2);

  BonusSpec spec;
  spec.beta = 0.1;
  spec.gamma = 0.5;
  spec.num_actions = 3;
  const Bonus b = Bonus::thresholded(one_hot, spec);
  CHECK(b(pt(0), 2) == doctest::Approx(2.0));
  CHECK(b(pt(0), 1) == 0.0);
  CHECK(b.known_status(pt(0)).unknown_actions == st.unknown_actions);
  const Bonus t = b.tabulated(2);
  CHECK(t(pt(1), 2) == b(pt(1), 2));
  CHECK_FALSE(t.state_known(pt(1)));
}

TEST_CASE("dataset text round trip") {
  Dataset z;
  z.append(pt(3), 1);
  z.append(State::continuous({0.1, -2.5}, 7), 0);
  std::stringstream ss;
  z.write(ss);
  const Dataset back = Dataset::read(ss);
  REQUIRE(back.size() == 2);
  CHECK(back[0].state == z[0].state);
  CHECK(back[1].state == z[1].state);
  CHECK(back[1].action == 0);
  CHECK(z.norm([](const State& s, std::size_t) { return s.is_discrete() ? 3.0 : 4.0; }) ==
        doctest::Approx(5.0));
}

TEST_CASE("independence checks") {
  auto phi = plane_features({{1, 0}, {0, 1}});
  Dataset z;
  z.append(pt(0), 0);
  CHECK(is_independent(phi, 1.0, z, 0.1, pt(1), 0));
  CHECK_FALSE(is_independent(phi, 1.0, z, 0.1, pt(0), 0));
  MatrixXd f(3, 1), g(3, 1);
  f << 0, 0, 0;
  g << 0, 1, 0;
  FiniteClass cls({f, g});
  CHECK(is_independent(cls, Dataset{}, 0.5, pt(1), 0));
  Dataset with;
  with.append(pt(1), 0);
  CHECK_FALSE(is_independent(cls, with, 0.5, pt(1), 0));
}

TEST_CASE("eluder dimension examples") {
  MatrixXd f(3, 1), g(3, 1);
  f << 0, 0, 0;
  g << 0, 1, 0;
  auto two = std::make_shared<FiniteClass>(std::vector<MatrixXd>{f, g});
  std::vector<StateAction> domain = {{pt(0), 0}, {pt(1), 0}, {pt(2), 0}};
  const EluderResult r = eluder_dimension(finite_set_width(two, domain, 0.5), 3, 0.5);
  CHECK(r.dimension == 1);
  CHECK(r.exact);

  auto single = std::make_shared<FiniteClass>(std::vector<MatrixXd>{f});
  CHECK(eluder_dimension(finite_set_width(single, domain, 0.5), 3, 0.5).dimension == 0);

  auto phi = plane_features({{1, 0}, {0, 1}});
  std::vector<StateAction> basis = {{pt(0), 0}, {pt(1), 0}};
  const EluderResult lin = eluder_dimension(linear_set_width(phi, 1.0, basis, 0.1), 2, 0.1);
  CHECK(lin.dimension == 2);
  CHECK(lin.witness.size() == 2);
}

TEST_CASE("greedy eluder never beats exact, and exact matches brute force") {
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t np = 2 + rng.index(4);
    auto tables = oracles::random_finite(rng, 2 + rng.index(4), np);
    auto cls = std::make_shared<FiniteClass>(tables);
    std::vector<StateAction> domain;
    for (std::size_t p = 0; p < np; ++p) domain.push_back({pt(p), 0});
    const double eps = 0.2;
    const auto w = finite_set_width(cls, domain, eps);
    const EluderResult exact = eluder_dimension(w, np, eps);
    const EluderResult greedy = eluder_dim_greedy(w, np, eps);
    CHECK(greedy.dimension <= exact.dimension);
    CHECK(exact.dimension == oracles::eluder_bruteforce(tables, np, eps));
  }
}

TEST_CASE("exact eluder search falls back to greedy past its limits") {
  auto phi = plane_features({{1, 0}, {0, 1}, {1, 1}});
  std::vector<StateAction> domain = {{pt(0), 0}, {pt(1), 0}, {pt(2), 0}};
  EluderOptions opts;
  opts.max_exact_domain = 2;
  const EluderResult r = eluder_dimension(linear_set_width(phi, 1.0, domain, 0.1), 3, 0.1, opts);
  CHECK(r.fell_back);
  CHECK_FALSE(r.exact);
  CHECK(r.dimension >= 2);
}

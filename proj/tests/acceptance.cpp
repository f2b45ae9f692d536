// Acceptance gate: one PASS/FAIL line per criterion. Criteria 1-6 write their
// raw numbers as CSV under <out>/run1; criterion 8 reruns them into <out>/run2
// and compares the files byte for byte.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "eniac/csv.hpp"
#include "eniac/dynamic_programming.hpp"
#include "eniac/eluder.hpp"
#include "eniac/environments.hpp"
#include "eniac/estimators.hpp"
#include "eniac/experiment.hpp"
#include "eniac/neural_width.hpp"
#include "eniac/presets.hpp"
#include "eniac/width.hpp"
#include "fixtures.hpp"
#include "width_oracles.hpp"

namespace fs = std::filesystem;
using namespace eniac;
using eniac::format_number;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Check = std::function<Outcome(const fs::path& csv)>;

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::shared_ptr<TableFeatures> plane(const std::vector<Eigen::Vector2d>& pts) {
  std::vector<std::vector<Eigen::VectorXd>> table;
  for (const auto& p : pts) table.push_back({Eigen::VectorXd(p)});
  return std::make_shared<TableFeatures>(table);
}

// 1. Monte-Carlo Q on the 5-state chain against exact DP.
Outcome estimator_accuracy(const fs::path& csv) {
  const TabularMdp m = fixtures::chain5(0.9);
  UniformPolicy pi(2);
  const QTable exact = exact_q_dp(m, pi, reward_table(m));
  Rng rng(20240601);
  std::ofstream out(csv, std::ios::binary);
  out << "state,action,mean,exact,abs_error\n";
  double worst = 0.0;
  const int draws = 20000;
  for (std::size_t s = 0; s < 5; ++s)
    for (std::size_t a = 0; a < 2; ++a) {
      double total = 0.0;
      for (int i = 0; i < draws; ++i) total += estimate_q(m, pi, State::discrete(s), a, m.reward_fn(), rng);
      const double mean = total / draws, q = exact(static_cast<long>(s), static_cast<long>(a));
      worst = std::max(worst, std::abs(mean - q));
      out << s << ',' << a << ',' << format_number(mean) << ',' << format_number(q) << ','
          << format_number(std::abs(mean - q)) << '\n';
    }
  return {worst <= 0.05, "max |mean - exact| = " + format_number(worst) + " (tol 0.05)"};
}

// 2. Width oracle correctness.
Outcome width_correctness(const fs::path& csv) {
  Rng rng(7);
  std::ofstream out(csv, std::ios::binary);
  out << "part,instance,value,reference\n";
  const double eps = 0.25;
  std::size_t bad_a = 0, bad_b = 0, bad_oracle = 0;
  for (int inst = 0; inst < 50; ++inst) {
    const std::size_t nf = 1 + rng.index(5), np = 1 + rng.index(6);
    auto tables = oracles::random_finite(rng, nf, np);
    auto cls = std::make_shared<FiniteClass>(tables);
    Dataset z;
    std::vector<std::size_t> zi;
    std::vector<double> prev(np, std::numeric_limits<double>::infinity());
    for (std::size_t step = 0; step <= np; ++step) {
      FiniteWidthOracle oracle(cls, z, eps);
      for (std::size_t x = 0; x < np; ++x) {
        const double w = oracle.width(State::discrete(x), 0);
        const double ref = oracles::finite_width(tables, zi, eps, x);
        if (std::abs(w - ref) > 1e-12) ++bad_oracle;
        if (w > prev[x] + 1e-12) ++bad_b;
        prev[x] = w;
      }
      for (std::size_t k : zi)
        if (oracle.width(State::discrete(k), 0) > eps + 1e-12) ++bad_a;
      out << "finite," << inst << ',' << format_number(oracle.width(State::discrete(0), 0)) << ','
          << format_number(oracles::finite_width(tables, zi, eps, 0)) << '\n';
      zi.push_back(rng.index(np));
      z.append(State::discrete(zi.back()), 0);
    }
  }

  // (c) exact linear width with no ridge against a refined lattice scan.
  std::size_t compared = 0, bad_c = 0;
  double worst_rel = 0.0;
  for (int inst = 0; compared < 50 && inst < 500; ++inst) {
    const std::size_t d = 1 + (inst % 2);
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(3, 2);
    Eigen::Vector2d q = Eigen::Vector2d::Zero();
    for (int i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < d; ++j) X(i, static_cast<long>(j)) = rng.uniform(-1, 1);
    for (std::size_t j = 0; j < d; ++j) q[static_cast<long>(j)] = rng.uniform(-1, 1);
    const double B = 1.0, lin_eps = 0.3;
    // d = 1 embeds in the plane; the second coordinate is then pinned only by
    // the ball, so restrict the class to the first coordinate instead.
    std::vector<std::vector<Eigen::VectorXd>> table;
    for (int i = 0; i < 3; ++i) table.push_back({Eigen::VectorXd(X.row(i).head(static_cast<long>(d)).transpose())});
    table.push_back({Eigen::VectorXd(q.head(static_cast<long>(d)))});
    LinearWidthOracle oracle(std::make_shared<TableFeatures>(table), B, lin_eps, 0.0);
    for (std::size_t i = 0; i < 3; ++i) oracle.append(State::discrete(i), 0);
    oracle.freeze();
    const Eigen::MatrixXd G = X.leftCols(static_cast<long>(d)).transpose() * X.leftCols(static_cast<long>(d));
    if (std::abs(G.determinant()) < 1e-3) continue;
    const double w = oracle.width(State::discrete(3), 0);
    if (w >= 2.0 * B * q.norm() - 1e-9) continue;  // norm cap active
    double ref;
    if (d == 2) {
      ref = oracles::linear_width_zoom(X, B, lin_eps, q);
    } else {
      // One dimension: v in [-2B, 2B] with |v| ||x|| <= eps.
      ref = std::min(2.0 * B, lin_eps / X.col(0).norm()) * std::abs(q[0]);
    }
    const double rel = std::abs(w - ref) / ref;
    worst_rel = std::max(worst_rel, rel);
    if (rel > 0.02) ++bad_c;
    out << "linear-d" << d << ',' << inst << ',' << format_number(w) << ',' << format_number(ref) << '\n';
    ++compared;
  }
  const bool pass = bad_a == 0 && bad_b == 0 && bad_oracle == 0 && bad_c == 0 && compared >= 50;
  return {pass, "(a) violations " + std::to_string(bad_a) + ", (b) violations " + std::to_string(bad_b) +
                    ", pair-enumeration mismatches " + std::to_string(bad_oracle) + ", (c) " +
                    std::to_string(compared) + " instances, max rel err " + format_number(worst_rel) +
                    " (tol 0.02)"};
}

// 3. Eluder dimension.
Outcome eluder(const fs::path& csv) {
  std::ofstream out(csv, std::ios::binary);
  out << "instance,greedy,exact,brute\n";
  std::vector<StateAction> basis = {{State::discrete(0), 0}, {State::discrete(1), 0}};
  const EluderResult lin =
      eluder_dimension(linear_set_width(plane({{1, 0}, {0, 1}}), 1.0, basis, 0.1), 2, 0.1);
  out << "linear-e1e2,," << lin.dimension << ",2\n";
  bool ok = lin.dimension == 2 && lin.exact;
  Rng rng(11);
  std::size_t bad = 0;
  for (int inst = 0; inst < 20; ++inst) {
    const std::size_t np = 2 + rng.index(4);
    auto tables = oracles::random_finite(rng, 2 + rng.index(4), np);
    auto cls = std::make_shared<FiniteClass>(tables);
    std::vector<StateAction> domain;
    for (std::size_t p = 0; p < np; ++p) domain.push_back({State::discrete(p), 0});
    const auto w = finite_set_width(cls, domain, 0.2);
    const std::size_t g = eluder_dim_greedy(w, np, 0.2).dimension;
    const std::size_t e = eluder_dimension(w, np, 0.2).dimension;
    const std::size_t b = oracles::eluder_bruteforce(tables, np, 0.2);
    if (g > e || e != b) ++bad;
    out << inst << ',' << g << ',' << e << ',' << b << '\n';
  }
  ok = ok && bad == 0;
  return {ok, "linear e1,e2 exact = " + std::to_string(lin.dimension) + " (want 2); greedy<=exact==brute failures " +
                  std::to_string(bad) + "/20"};
}

// 4. Combination lock: ENIAC against the zero-bonus cover.
Outcome combination_lock(const fs::path& csv) {
  const Problem problem = build_problem(lock_benchmark("eniac"));
  const double v_star = optimal_value(dynamic_cast<const TabularMdp&>(*problem.mdp));
  std::ofstream out(csv, std::ios::binary);
  out << "algorithm,seed,final_exact,final_mc,v_star\n";
  std::vector<double> eniac_vals, zero_vals;
  for (const char* algo : {"eniac", "zero-bonus"}) {
    const RunConfig cfg = lock_benchmark(algo);
    for (std::uint64_t seed : cfg.seeds) {
      const RunOutcome o = run_single(cfg, seed);
      (std::string(algo) == "eniac" ? eniac_vals : zero_vals).push_back(o.final_exact);
      out << algo << ',' << seed << ',' << format_number(o.final_exact) << ',' << format_number(o.final_return)
          << ',' << format_number(v_star) << '\n';
    }
  }
  const double me = median(eniac_vals), mz = median(zero_vals);
  return {me >= 0.9 * v_star && mz < 0.5 * v_star,
          "V* " + format_number(v_star) + ", eniac median " + format_number(me) + " (need >= " +
              format_number(0.9 * v_star) + "), zero-bonus median " + format_number(mz) + " (need < " +
              format_number(0.5 * v_star) + ")"};
}

// 5. Bandit regret with exact critics.
Outcome bandit_regret(const fs::path& csv) {
  std::ofstream out(csv, std::ios::binary);
  out << "iterations,seed,average_regret,bound\n";
  bool ok = true;
  double worst_ratio = 0.0;
  for (std::size_t T : {std::size_t{100}, std::size_t{400}}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      RunConfig cfg = bandit_benchmark(T);
      // The seed permutes which arm is best.
      Rng rng(seed);
      auto& means = cfg.environment.arm_means;
      for (std::size_t i = means.size(); i > 1; --i) std::swap(means[i - 1], means[rng.index(i)]);
      const Problem p = build_problem(cfg);
      const auto& mdp = dynamic_cast<const TabularMdp&>(*p.mdp);
      const PairSampler rho = [](Rng& r, RolloutCounters*) { return StateAction{State::discrete(0), r.index(3)}; };
      const PolicyUpdateResult res =
          policy_update(mdp, rho, Bonus::zero(3), p.cls, cfg.eniac.update, cfg.eniac.variant, rng);
      const double v_star = optimal_value(mdp);
      double regret = 0.0;
      for (const auto& pi : res.iterates) regret += v_star - exact_value(mdp, *pi, reward_table(mdp));
      regret /= static_cast<double>(res.iterates.size());
      const double W = 1.0 / (1.0 - mdp.gamma());
      const double bound = 8.0 * W * std::sqrt(std::log(3.0) / static_cast<double>(T));
      ok = ok && regret <= bound;
      worst_ratio = std::max(worst_ratio, regret / bound);
      out << T << ',' << seed << ',' << format_number(regret) << ',' << format_number(bound) << '\n';
    }
  }
  return {ok, "max regret / bound = " + format_number(worst_ratio) + " over T in {100, 400} x 5 seeds"};
}

// 6. Neural width separation on the ring.
Outcome ring_width(const fs::path& csv) {
  std::ofstream out(csv, std::ios::binary);
  out << "seed,buffer_mean,far_mean,ratio,f_prime_hash_unchanged\n";
  std::vector<double> ratios;
  bool hashes = true;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed);
    RingFixture ring = make_ring_fixture(rng, 2000, 20000, 100);
    Rng replay = rng;
    const std::uint64_t before = params_hash(WidthNetPair::initialize(ring.arch, replay).f_prime());
    WidthTrainConfig cfg;
    cfg.outer_iters = 200;
    const TrainedWidth tw = train_width(ring.arch, ring.buffer, ring.query_set, cfg, rng);
    const bool same = params_hash(tw.pair.f_prime()) == before;
    hashes = hashes && same;
    auto mean_width = [&](const Dataset& d) {
      double s = 0.0;
      for (const auto& z : d.items()) s += tw.pair.width(z.state, z.action);
      return s / static_cast<double>(d.size());
    };
    const double on = mean_width(ring.buffer_probes), off = mean_width(ring.far_probes);
    ratios.push_back(off / on);
    out << seed << ',' << format_number(on) << ',' << format_number(off) << ',' << format_number(off / on) << ','
        << (same ? 1 : 0) << '\n';
  }
  const double med = median(ratios);
  return {med >= 3.0 && hashes,
          "median far/buffer width ratio " + format_number(med) + " (need >= 3), f' hash " +
              (hashes ? "unchanged" : "CHANGED")};
}

struct Criterion {
  std::string id;
  std::string name;
  double limit_seconds;
  Check check;
};

std::vector<Criterion> criteria() {
  return {
      {"1", "Q estimator matches DP on the 5-state chain", 30, estimator_accuracy},
      {"2", "width oracle: membership, monotonicity, lattice agreement", 60, width_correctness},
      {"3", "eluder dimension: exact linear value and greedy <= exact", 60, eluder},
      {"4", "combination lock: eniac >= 0.9 V*, zero-bonus < 0.5 V*", 600, combination_lock},
      {"5", "bandit average regret within 8 W sqrt(log 3 / T)", 60, bandit_regret},
      {"6", "ring width separation >= 3x and frozen f'", 300, ring_width},
  };
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path root = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_out");
  fs::remove_all(root);
  fs::create_directories(root / "run1");
  fs::create_directories(root / "run2");

  bool all = true;
  auto report = [&](const std::string& id, const std::string& name, bool pass, const std::string& detail,
                    double seconds, double limit) {
    const bool in_time = seconds <= limit;
    const bool ok = pass && in_time;
    all = all && ok;
    std::cout << (ok ? "PASS" : "FAIL") << "  [" << id << "] " << name << " -- " << detail << "; "
              << format_number(std::round(seconds * 10.0) / 10.0) << " s (limit " << limit << " s)"
              << (in_time ? "" : " TOO SLOW") << std::endl;
  };

  const auto list = criteria();
  for (const auto& c : list) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check(root / "run1" / ("criterion" + c.id + ".csv"));
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report(c.id, c.name, o.pass, o.detail, secs, c.limit_seconds);
  }

  std::cout << "SKIP  [7] mountain car > 93 within 3M steps -- extended benchmark, run `eniac bench --extended`"
            << std::endl;

  const auto t0 = std::chrono::steady_clock::now();
  std::size_t identical = 0;
  std::string mismatched;
  for (const auto& c : list) {
    const std::string name = "criterion" + c.id + ".csv";
    try {
      c.check(root / "run2" / name);
    } catch (const std::exception&) {
    }
    const std::string a = slurp(root / "run1" / name), b = slurp(root / "run2" / name);
    if (!a.empty() && a == b)
      ++identical;
    else
      mismatched += " " + c.id;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report("8", "reruns of 1-6 give byte-identical CSVs", identical == list.size(),
         std::to_string(identical) + "/" + std::to_string(list.size()) + " identical" +
             (mismatched.empty() ? "" : ", differing:" + mismatched),
         secs, 1200);

  std::cout << (all ? "ALL CRITERIA PASS" : "SOME CRITERIA FAIL") << std::endl;
  return all ? 0 : 1;
}

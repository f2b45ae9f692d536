#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "eniac/dynamic_programming.hpp"
#include "eniac/eluder.hpp"
#include "eniac/environments.hpp"
#include "eniac/estimators.hpp"
#include "eniac/experiment.hpp"
#include "eniac/neural_width.hpp"
#include "eniac/presets.hpp"
#include "eniac/width.hpp"

namespace py = pybind11;
using namespace eniac;

namespace {

using Pairs = std::vector<std::pair<std::size_t, std::size_t>>;

Dataset to_dataset(const Pairs& pairs) {
  Dataset d;
  for (auto [s, a] : pairs) d.append(State::discrete(s), a);
  return d;
}

std::shared_ptr<TabularPolicy> to_policy(const Eigen::MatrixXd& table) {
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(table.rows()));
  for (Eigen::Index s = 0; s < table.rows(); ++s)
    for (Eigen::Index a = 0; a < table.cols(); ++a) rows[static_cast<std::size_t>(s)].push_back(table(s, a));
  return std::make_shared<TabularPolicy>(rows);
}

// features[s] is an |A| x d matrix.
std::shared_ptr<TableFeatures> to_features(const std::vector<Eigen::MatrixXd>& features) {
  std::vector<std::vector<Eigen::VectorXd>> table;
  for (const auto& m : features) {
    std::vector<Eigen::VectorXd> row;
    for (Eigen::Index a = 0; a < m.rows(); ++a) row.push_back(m.row(a).transpose());
    table.push_back(std::move(row));
  }
  return std::make_shared<TableFeatures>(table);
}

py::dict outcome_dict(const RunOutcome& o) {
  py::dict d;
  d["seed"] = o.seed;
  d["reached_threshold"] = o.reached_threshold;
  d["budget_exhausted"] = o.budget_exhausted;
  d["final_return"] = o.final_return;
  d["final_exact"] = o.final_exact;
  d["env_steps"] = o.env_steps;
  py::list rows;
  for (const auto& r : o.rows) rows.append(py::make_tuple(r.episode, r.mean_return, r.epochs_used, r.seed));
  d["rows"] = rows;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "ENIAC exploration toolkit";

  py::class_<TabularMdp, std::shared_ptr<TabularMdp>>(m, "TabularMdp")
      .def(py::init<std::vector<std::vector<std::vector<double>>>, std::vector<std::vector<double>>, double,
                    std::size_t>(),
           py::arg("transitions"), py::arg("rewards"), py::arg("gamma"), py::arg("start") = 0)
      .def_property_readonly("num_states", &TabularMdp::state_count)
      .def_property_readonly("num_actions", &TabularMdp::num_actions)
      .def_property_readonly("gamma", &TabularMdp::gamma)
      .def_property_readonly("start", &TabularMdp::start)
      .def("probability", &TabularMdp::probability)
      .def("reward", &TabularMdp::reward_at);

  m.def("make_combination_lock", &make_combination_lock, py::arg("horizon"), py::arg("delta"),
        py::arg("gamma"), py::arg("num_actions") = 2);
  m.def("make_bandit", &make_bandit, py::arg("means"), py::arg("gamma"));
  m.def("make_gridworld", &make_gridworld, py::arg("width"), py::arg("height"), py::arg("slip"),
        py::arg("gamma"));
  m.def("lock_correct_action", &lock_correct_action);

  m.def(
      "optimal_value", [](const TabularMdp& mdp) { return optimal_value(mdp); }, py::arg("mdp"));
  m.def(
      "exact_q",
      [](const TabularMdp& mdp, const Eigen::MatrixXd& policy) {
        return exact_q_dp(mdp, *to_policy(policy), reward_table(mdp));
      },
      py::arg("mdp"), py::arg("policy"), "Q^pi as an |S| x |A| array for a policy table.");
  m.def(
      "exact_value",
      [](const TabularMdp& mdp, const Eigen::MatrixXd& policy) {
        return exact_value(mdp, *to_policy(policy), reward_table(mdp));
      },
      py::arg("mdp"), py::arg("policy"));
  m.def(
      "estimate_q_mean",
      [](const TabularMdp& mdp, const Eigen::MatrixXd& policy, std::size_t s, std::size_t a, std::size_t draws,
         std::uint64_t seed) {
        auto pi = to_policy(policy);
        Rng rng(seed);
        double total = 0.0;
        for (std::size_t i = 0; i < draws; ++i) total += estimate_q(mdp, *pi, State::discrete(s), a, mdp.reward_fn(), rng);
        return total / static_cast<double>(draws);
      },
      py::arg("mdp"), py::arg("policy"), py::arg("state"), py::arg("action"), py::arg("draws"),
      py::arg("seed") = 0, "Mean of unbiased Monte-Carlo Q estimates.");

  m.def(
      "width_finite",
      [](const std::vector<Eigen::MatrixXd>& tables, const Pairs& data, double radius, std::size_t s,
         std::size_t a) { return width_finite(FiniteClass(tables), to_dataset(data), radius, State::discrete(s), a); },
      py::arg("tables"), py::arg("data"), py::arg("radius"), py::arg("state"), py::arg("action"));
  m.def(
      "width_linear",
      [](const std::vector<Eigen::MatrixXd>& features, double bound, const Pairs& data, double radius,
         double ridge, std::size_t s, std::size_t a) {
        return width_linear(to_features(features), bound, to_dataset(data), radius, ridge, State::discrete(s), a);
      },
      py::arg("features"), py::arg("bound"), py::arg("data"), py::arg("radius"), py::arg("ridge"),
      py::arg("state"), py::arg("action"), "features[s] is an |A| x d array; ridge 0 gives the exact width.");
  m.def(
      "eluder_dimension_finite",
      [](const std::vector<Eigen::MatrixXd>& tables, const Pairs& domain, double eps, bool greedy) {
        std::vector<StateAction> dom;
        for (auto [s, a] : domain) dom.push_back({State::discrete(s), a});
        const auto w = finite_set_width(std::make_shared<FiniteClass>(tables), dom, eps);
        EluderOptions opts;
        if (greedy) opts.mode = EluderMode::greedy;
        return eluder_dimension(w, dom.size(), eps, opts).dimension;
      },
      py::arg("tables"), py::arg("domain"), py::arg("eps"), py::arg("greedy") = false);
  m.def(
      "bonus",
      [](double width, double beta, double gamma, std::size_t num_actions, const std::string& variant,
         double alpha) {
        BonusSpec spec;
        spec.beta = beta;
        spec.gamma = gamma;
        spec.num_actions = num_actions;
        spec.alpha = alpha;
        if (variant == "compute")
          spec.variant = BonusVariant::compute;
        else if (variant != "sample")
          throw std::invalid_argument("variant must be 'sample' or 'compute'");
        return bonus(width, spec);
      },
      py::arg("width"), py::arg("beta"), py::arg("gamma"), py::arg("num_actions") = 1,
      py::arg("variant") = "sample", py::arg("alpha") = 0.1);

  m.def(
      "lock_benchmark", [](const std::string& algo) { return run_config_to_json(lock_benchmark(algo)); },
      py::arg("algorithm") = "eniac", "Run config (JSON text) for the combination-lock benchmark.");
  m.def(
      "bandit_benchmark", [](std::size_t t) { return run_config_to_json(bandit_benchmark(t)); },
      py::arg("iterations"));
  m.def(
      "mountain_car_benchmark",
      [](const std::string& algo, std::size_t layers) { return run_config_to_json(mountain_car_benchmark(algo, layers)); },
      py::arg("algorithm") = "eniac", py::arg("layers") = 2);
  m.def(
      "validate_config", [](const std::string& text) { return run_config_to_json(run_config_from_json(text)); },
      py::arg("config_json"), "Parses, validates and re-serializes a run config.");
  m.def(
      "run_single",
      [](const std::string& text, std::uint64_t seed) {
        const RunConfig cfg = run_config_from_json(text);
        RunOutcome o;
        {
          py::gil_scoped_release release;
          o = run_single(cfg, seed);
        }
        return outcome_dict(o);
      },
      py::arg("config_json"), py::arg("seed"));
  m.def(
      "run_experiment",
      [](const std::string& text, const std::string& out_dir) {
        const RunConfig cfg = run_config_from_json(text);
        std::vector<RunOutcome> outs;
        {
          py::gil_scoped_release release;
          outs = run_experiment(cfg, out_dir);
        }
        py::list result;
        for (const auto& o : outs) result.append(outcome_dict(o));
        return result;
      },
      py::arg("config_json"), py::arg("out_dir") = "",
      "Runs every configured seed; writes metrics.csv and manifest.json when out_dir is set.");

  m.def(
      "ring_width",
      [](std::uint64_t seed, std::size_t outer_iters) {
        double on = 0.0, off = 0.0;
        {
          py::gil_scoped_release release;
          Rng rng(seed);
          RingFixture ring = make_ring_fixture(rng);
          WidthTrainConfig cfg;
          cfg.outer_iters = outer_iters;
          const TrainedWidth tw = train_width(ring.arch, ring.buffer, ring.query_set, cfg, rng);
          for (const auto& z : ring.buffer_probes.items()) on += tw.pair.width(z.state, z.action);
          for (const auto& z : ring.far_probes.items()) off += tw.pair.width(z.state, z.action);
          on /= static_cast<double>(ring.buffer_probes.size());
          off /= static_cast<double>(ring.far_probes.size());
        }
        return py::make_tuple(on, off);
      },
      py::arg("seed") = 0, py::arg("outer_iters") = 200,
      "Trains a width pair on the ring fixture; returns (mean width on the ring, mean width off it).");
}

#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "eniac/function_class.hpp"
#include "eniac/mdp.hpp"

namespace eniac {

/// Ordered multiset Z of state-action pairs (duplicates allowed).
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::vector<StateAction> items) : items_(std::move(items)) {}

  void append(State s, std::size_t a) { items_.push_back(StateAction{std::move(s), a}); }
  void append(const Dataset& other);
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  const StateAction& operator[](std::size_t i) const { return items_[i]; }
  const std::vector<StateAction>& items() const { return items_; }

  /// ||f||_Z = sqrt(sum over Z of f(s, a)^2).
  double norm(const std::function<double(const State&, std::size_t)>& f) const;

  /// One record per line: "<action> <index> <dim> <x_0> ... <x_dim-1>".
  void write(std::ostream& out) const;
  static Dataset read(std::istream& in);

 private:
  std::vector<StateAction> items_;
};

/// w(s, a): an opaque width callable handed to the driver.
using WidthFn = std::function<double(const State&, std::size_t)>;

/// Exact width of Delta F for a finite class: the largest f(s,a) - f'(s,a)
/// over ordered pairs with ||f - f'||_Z <= radius. Feasible pairs are found
/// once at construction; queries are read-only.
class FiniteWidthOracle {
 public:
  FiniteWidthOracle(std::shared_ptr<const FiniteClass> cls, const Dataset& data, double radius);

  double width(const State& s, std::size_t a) const;
  std::size_t feasible_pairs() const { return pairs_.size(); }
  WidthFn as_function() const;

 private:
  std::shared_ptr<const FiniteClass> cls_;
  std::vector<std::pair<std::size_t, std::size_t>> pairs_;
};

double width_finite(const FiniteClass& cls, const Dataset& data, double radius, const State& s,
                    std::size_t a);

/// Width of a linear (or tangent) difference class {u - u' : ||u||, ||u'|| <= B}
/// constrained by ||(u - u') . phi||_Z <= radius.
///
/// The Gram matrix G = sum_Z phi phi^T is updated with rank-one appends and
/// rebuilt from scratch every 512 appends. `freeze()` takes the spectral
/// snapshot that queries read; appending invalidates it.
class LinearWidthOracle {
 public:
  static constexpr std::size_t kRebuildInterval = 512;

  /// ridge: nullopt selects the default radius^2 / (4 B^2).
  LinearWidthOracle(FeatureMapPtr features, double coefficient_bound, double radius,
                    std::optional<double> ridge = std::nullopt);

  void append(const State& s, std::size_t a);
  void append(const Dataset& data);
  void freeze();
  bool frozen() const { return frozen_; }

  double radius() const { return radius_; }
  double ridge() const { return ridge_; }
  double coefficient_bound() const { return bound_; }
  std::size_t size() const { return data_.size(); }
  const Eigen::MatrixXd& gram() const { return gram_; }

  /// Certified value min(2B ||phi||, sqrt(eps^2 + 4 B^2 ridge) ||phi||_{(G + ridge I)^-1});
  /// with ridge 0 the range of G is handled by the pseudo-inverse and the
  /// null-space component of phi contributes 2B ||phi_perp||.
  double width(const State& s, std::size_t a) const;
  /// Tightest member of the ridge family: min over ridge >= 0 of the certified
  /// value. This is the exact width (Lagrangian dual of the two-ellipsoid problem).
  double width_exact(const State& s, std::size_t a) const;

  double width_of(const Eigen::VectorXd& phi) const;
  double width_exact_of(const Eigen::VectorXd& phi) const;

  WidthFn as_function() const;

 private:
  void rebuild();

  FeatureMapPtr features_;
  double bound_, radius_, ridge_;
  Dataset data_;
  Eigen::MatrixXd gram_;
  std::size_t since_rebuild_ = 0;
  bool frozen_ = false;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd eigenvectors_;
  double cutoff_ = 0.0;
};

double width_linear(FeatureMapPtr features, double coefficient_bound, const Dataset& data,
                    double radius, double ridge, const State& s, std::size_t a);

/// Exposes tangent features g_t as a feature map so the linear width applies
/// to Delta G_F; norm bound is the map's gradient bound G.
class TangentFeatureAdapter final : public FeatureMap {
 public:
  explicit TangentFeatureAdapter(std::shared_ptr<const TangentFeatureMap> tangent)
      : tangent_(std::move(tangent)) {}
  std::size_t dim() const override { return tangent_->dim(); }
  std::size_t num_actions() const override { return tangent_->num_actions(); }
  double norm_bound() const override { return 2.0 * tangent_->gradient_bound(); }
  void features(const State& s, std::size_t a, Eigen::Ref<Eigen::VectorXd> out) const override {
    out = tangent_->features(s, a);
  }

 private:
  std::shared_ptr<const TangentFeatureMap> tangent_;
};

enum class BonusVariant { sample, compute };

struct BonusSpec {
  double beta = 0.05;
  BonusVariant variant = BonusVariant::sample;
  double gamma = 0.99;
  std::size_t num_actions = 1;
  /// Uniform-mix weight; only read by the compute variant.
  double alpha = 0.1;

  void validate() const;
  /// Value paid when the threshold fires.
  double magnitude() const;
};

/// 1{w >= beta} / (1 - gamma), or 1{w >= beta} |A| / ((1 - gamma) alpha) for compute.
double bonus(double width_value, const BonusSpec& spec);

/// Default beta = target_accuracy (1 - gamma) / 2.
double default_beta(double target_accuracy, double gamma);

struct KnownStatus {
  bool fully_known = true;
  std::vector<std::size_t> unknown_actions;
};

/// s is fully known iff w(s, a) < beta for every action; otherwise lists the
/// actions at or above the threshold.
KnownStatus known_set_query(const WidthFn& width, double beta, const State& s,
                            std::size_t num_actions);

/// Reward bonus b(s, a) >= 0. Cheap to copy; immutable once built.
/// The known set is {(s, a) : b(s, a) = 0}.
class Bonus {
 public:
  using Fn = std::function<double(const State&, std::size_t)>;

  /// The zero bonus (everything known).
  explicit Bonus(std::size_t num_actions = 1);
  /// Arbitrary nonnegative bonus bounded by `max_value`.
  Bonus(Fn fn, std::size_t num_actions, double max_value);

  static Bonus zero(std::size_t num_actions) { return Bonus(num_actions); }
  static Bonus thresholded(WidthFn width, const BonusSpec& spec);

  double operator()(const State& s, std::size_t a) const;
  std::size_t num_actions() const { return num_actions_; }
  bool is_zero() const { return !fn_; }
  double max_value() const { return max_value_; }

  /// Precomputes values on discrete states 0..num_states-1.
  Bonus tabulated(std::size_t num_states) const;
  bool is_tabulated() const { return table_ != nullptr; }

  KnownStatus known_status(const State& s) const;
  bool state_known(const State& s) const;

 private:
  Fn fn_;
  std::shared_ptr<const std::vector<double>> table_;
  std::size_t num_actions_;
  double max_value_ = 0.0;
};

}  // namespace eniac

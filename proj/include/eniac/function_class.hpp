#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "eniac/mdp.hpp"
#include "eniac/mlp.hpp"

namespace eniac {

using Params = Eigen::VectorXd;

struct CriticSample {
  State state;
  std::size_t action = 0;
  double target = 0.0;
};

struct FitResult {
  Params params;
  /// Mean squared residual on the fitted samples.
  double loss = 0.0;
};

/// A family F of functions S x A -> R with a sup-norm bound W and a
/// least-squares fit.
class FunctionClass {
 public:
  virtual ~FunctionClass() = default;

  virtual std::string kind() const = 0;
  /// Shape descriptor written into parameter checkpoints.
  virtual std::vector<std::size_t> shape() const = 0;
  virtual std::size_t num_actions() const = 0;
  virtual std::size_t num_params() const = 0;
  virtual double sup_bound() const = 0;

  virtual double evaluate(const Params& params, const State& s, std::size_t a) const = 0;
  /// f(s, .) for every action.
  virtual void evaluate_all(const Params& params, const State& s, std::span<double> out) const;

  /// Parameters of a member whose softmax policy is uniform everywhere.
  virtual Params uniform_params() const = 0;

  /// Least-squares fit of the targets; NaN or infinite targets are rejected.
  virtual FitResult fit(std::span<const CriticSample> samples) const = 0;

  /// True when params add like functions: f_{p+q} = f_p + f_q.
  virtual bool is_linear() const { return false; }
};

using FunctionClassPtr = std::shared_ptr<const FunctionClass>;

/// A class smoothly parameterized by theta with gradients d f_theta(s,a) / d theta.
class DifferentiableClass : public FunctionClass {
 public:
  /// Column a holds the gradient of f_theta(s, a).
  virtual Eigen::MatrixXd action_gradients(const Params& theta, const State& s) const = 0;
};

using DifferentiableClassPtr = std::shared_ptr<const DifferentiableClass>;

// ---------------------------------------------------------------------------
// Feature maps for linear classes.

class FeatureMap {
 public:
  virtual ~FeatureMap() = default;
  virtual std::size_t dim() const = 0;
  virtual std::size_t num_actions() const = 0;
  /// Upper bound on ||phi(s, a)||_2.
  virtual double norm_bound() const = 0;
  virtual void features(const State& s, std::size_t a, Eigen::Ref<Eigen::VectorXd> out) const = 0;

  Eigen::VectorXd operator()(const State& s, std::size_t a) const;
};

using FeatureMapPtr = std::shared_ptr<const FeatureMap>;

/// Indicator features over a finite S x A; the tabular class.
class OneHotFeatures final : public FeatureMap {
 public:
  OneHotFeatures(std::size_t num_states, std::size_t num_actions)
      : num_states_(num_states), num_actions_(num_actions) {}
  std::size_t dim() const override { return num_states_ * num_actions_; }
  std::size_t num_actions() const override { return num_actions_; }
  double norm_bound() const override { return 1.0; }
  void features(const State& s, std::size_t a, Eigen::Ref<Eigen::VectorXd> out) const override;

 private:
  std::size_t num_states_, num_actions_;
};

/// Explicit feature vectors table[s][a] over a finite S x A.
class TableFeatures final : public FeatureMap {
 public:
  explicit TableFeatures(std::vector<std::vector<Eigen::VectorXd>> table);
  std::size_t dim() const override { return dim_; }
  std::size_t num_actions() const override { return table_.front().size(); }
  double norm_bound() const override { return norm_bound_; }
  void features(const State& s, std::size_t a, Eigen::Ref<Eigen::VectorXd> out) const override;

 private:
  std::vector<std::vector<Eigen::VectorXd>> table_;
  std::size_t dim_ = 0;
  double norm_bound_ = 0.0;
};

/// Normalized Gaussian radial bins over a box of continuous states, one block
/// per action: phi(s, a) = e_a (x) psi(s) with ||psi(s)||_2 = 1.
class RadialBinFeatures final : public FeatureMap {
 public:
  RadialBinFeatures(Eigen::VectorXd lower, Eigen::VectorXd upper, std::size_t bins_per_dim,
                    std::size_t num_actions);
  std::size_t dim() const override { return centers_.cols() * num_actions_; }
  std::size_t num_actions() const override { return num_actions_; }
  double norm_bound() const override { return 1.0; }
  void features(const State& s, std::size_t a, Eigen::Ref<Eigen::VectorXd> out) const override;

 private:
  Eigen::MatrixXd centers_;  // state_dim x num_centers
  Eigen::VectorXd inv_width_;
  std::size_t num_actions_;
};

// ---------------------------------------------------------------------------

/// Minimizer of ||y - X u||^2 subject to ||u||_2 <= bound, given the normal
/// equations G = X^T X and c = X^T y. Returns the minimum-norm solution when
/// it is feasible, otherwise the exact boundary solution (ridge multiplier
/// found by bisection).
Eigen::VectorXd solve_ball_least_squares(const Eigen::MatrixXd& gram, const Eigen::VectorXd& rhs,
                                         double bound);

/// f_u(s, a) = u . phi(s, a) with ||u||_2 <= B.
class LinearClass final : public DifferentiableClass {
 public:
  LinearClass(FeatureMapPtr features, double coefficient_bound);

  std::string kind() const override { return "linear"; }
  std::vector<std::size_t> shape() const override { return {features_->dim()}; }
  std::size_t num_actions() const override { return features_->num_actions(); }
  std::size_t num_params() const override { return features_->dim(); }
  double sup_bound() const override { return bound_ * features_->norm_bound(); }
  double coefficient_bound() const { return bound_; }
  const FeatureMap& feature_map() const { return *features_; }
  FeatureMapPtr feature_map_ptr() const { return features_; }

  double evaluate(const Params& u, const State& s, std::size_t a) const override;
  Params uniform_params() const override;
  FitResult fit(std::span<const CriticSample> samples) const override;
  bool is_linear() const override { return true; }
  Eigen::MatrixXd action_gradients(const Params& theta, const State& s) const override;

 private:
  FeatureMapPtr features_;
  double bound_;
};

/// Tabular class: one-hot features with coefficient bound B.
std::shared_ptr<LinearClass> make_tabular_class(std::size_t num_states, std::size_t num_actions,
                                                double bound);

/// An explicit finite list of tables over a finite S x A. Params hold the
/// member index as a single entry.
class FiniteClass final : public FunctionClass {
 public:
  explicit FiniteClass(std::vector<Eigen::MatrixXd> tables);

  std::string kind() const override { return "finite"; }
  std::vector<std::size_t> shape() const override;
  std::size_t num_actions() const override { return static_cast<std::size_t>(tables_.front().cols()); }
  std::size_t num_params() const override { return 1; }
  double sup_bound() const override { return sup_; }

  std::size_t size() const { return tables_.size(); }
  std::size_t num_states() const { return static_cast<std::size_t>(tables_.front().rows()); }
  const Eigen::MatrixXd& table(std::size_t i) const { return tables_.at(i); }
  double value(std::size_t i, std::size_t s, std::size_t a) const { return tables_[i](s, a); }

  static Params member(std::size_t i) { return Params::Constant(1, static_cast<double>(i)); }
  static std::size_t member_index(const Params& p) { return static_cast<std::size_t>(p[0]); }

  double evaluate(const Params& p, const State& s, std::size_t a) const override;
  Params uniform_params() const override { return member(uniform_index_); }
  /// Exhaustive search; ties break toward the lowest index.
  FitResult fit(std::span<const CriticSample> samples) const override;

 private:
  std::vector<Eigen::MatrixXd> tables_;
  double sup_ = 0.0;
  std::size_t uniform_index_ = 0;
};

struct MlpFitConfig {
  std::size_t steps = 300;
  double step_size = 0.05;
  std::uint64_t init_seed = 1;
};

/// ReLU network with one output head per action, clamped to [-W, W].
class MlpClass final : public DifferentiableClass {
 public:
  using Encoder = std::function<void(const State&, Eigen::Ref<Eigen::VectorXd>)>;

  MlpClass(std::size_t input_dim, Encoder encoder, std::vector<std::size_t> hidden,
           std::size_t num_actions, double sup_bound, MlpFitConfig fit = {});

  /// One-hot encoding of discrete states.
  static std::shared_ptr<MlpClass> for_discrete(std::size_t num_states,
                                                std::vector<std::size_t> hidden,
                                                std::size_t num_actions, double sup_bound,
                                                MlpFitConfig fit = {});
  /// Affine-normalized continuous states: (x - offset) ./ scale.
  static std::shared_ptr<MlpClass> for_continuous(Eigen::VectorXd offset, Eigen::VectorXd scale,
                                                  std::vector<std::size_t> hidden,
                                                  std::size_t num_actions, double sup_bound,
                                                  MlpFitConfig fit = {});

  std::string kind() const override { return "mlp"; }
  std::vector<std::size_t> shape() const override { return net_.layer_sizes(); }
  std::size_t num_actions() const override { return net_.output_dim(); }
  std::size_t num_params() const override { return net_.num_params(); }
  double sup_bound() const override { return sup_; }
  const Mlp& network() const { return net_; }
  const MlpFitConfig& fit_config() const { return fit_; }

  Eigen::VectorXd encode(const State& s) const;
  Eigen::MatrixXd encode_batch(std::span<const State> states) const;

  double evaluate(const Params& theta, const State& s, std::size_t a) const override;
  void evaluate_all(const Params& theta, const State& s, std::span<double> out) const override;
  /// Zero output layer over seeded hidden weights: f == 0, uniform softmax.
  Params uniform_params() const override;
  FitResult fit(std::span<const CriticSample> samples) const override;
  /// Full-batch gradient descent from `uniform_params()` with an explicit step.
  FitResult fit(std::span<const CriticSample> samples, double step_size) const;
  Eigen::MatrixXd action_gradients(const Params& theta, const State& s) const override;

 private:
  std::size_t input_dim_;
  Encoder encoder_;
  Mlp net_;
  double sup_;
  MlpFitConfig fit_;
};

/// Score features g_t(s, a) = grad_theta log pi_{f_theta}(a|s) at a fixed theta_t.
class TangentFeatureMap {
 public:
  TangentFeatureMap(DifferentiableClassPtr cls, Params theta, double coefficient_bound,
                    double gradient_bound = 1.0, double hessian_bound = 0.0);

  std::size_t dim() const { return cls_->num_params(); }
  std::size_t num_actions() const { return cls_->num_actions(); }
  double coefficient_bound() const { return bound_; }
  /// Assumed sup ||grad log pi|| (G) and Hessian bound (Lambda); metadata for step sizes.
  double gradient_bound() const { return gradient_bound_; }
  double hessian_bound() const { return hessian_bound_; }
  const Params& theta() const { return theta_; }
  const DifferentiableClass& function_class() const { return *cls_; }

  Eigen::VectorXd features(const State& s, std::size_t a) const;
  /// Column a holds g_t(s, a).
  Eigen::MatrixXd all_features(const State& s) const;

 private:
  DifferentiableClassPtr cls_;
  Params theta_;
  double bound_, gradient_bound_, hessian_bound_;
};

/// SPI critic fit: minimizes sum_i (target_i - f(s_i, a_i))^2 over the class.
FitResult fit_critic_spi(const FunctionClass& cls, std::span<const CriticSample> samples);

/// NPG critic fit: minimizes sum_i (target_i - u . g_t(s_i, a_i))^2 with ||u||_2 <= B.
FitResult fit_critic_npg(const TangentFeatureMap& features, std::span<const CriticSample> samples);

/// grad_theta f(s,a) - sum_a' pi(a'|s) grad_theta f(s,a').
Eigen::VectorXd tangent_features(const Params& theta, const DifferentiableClass& cls,
                                 const State& s, std::size_t a);

/// Softmax of f(s, .).
std::vector<double> softmax_policy(const FunctionClass& cls, const Params& params, const State& s);

}  // namespace eniac

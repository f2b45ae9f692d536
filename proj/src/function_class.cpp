#include "eniac/function_class.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace eniac {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

void check_targets(std::span<const CriticSample> samples) {
  if (samples.empty()) throw std::invalid_argument("critic fit: no samples");
  for (const auto& s : samples)
    if (!std::isfinite(s.target)) throw std::invalid_argument("critic fit: non-finite target");
}

// Normal equations of the linear regression target ~ phi(s, a) . u.
void accumulate_normal_equations(const FeatureMap& phi, std::span<const CriticSample> samples,
                                 MatrixXd& gram, VectorXd& rhs) {
  const auto d = static_cast<Index>(phi.dim());
  MatrixXd x(static_cast<Index>(samples.size()), d);
  VectorXd y(static_cast<Index>(samples.size()));
  VectorXd row(d);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    phi.features(samples[i].state, samples[i].action, row);
    x.row(static_cast<Index>(i)) = row.transpose();
    y[static_cast<Index>(i)] = samples[i].target;
  }
  gram = MatrixXd::Zero(d, d);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(x.transpose());
  gram = gram.selfadjointView<Eigen::Lower>();
  rhs = x.transpose() * y;
}

}  // namespace

void FunctionClass::evaluate_all(const Params& params, const State& s,
                                 std::span<double> out) const {
  for (std::size_t a = 0; a < out.size(); ++a) out[a] = evaluate(params, s, a);
}

VectorXd FeatureMap::operator()(const State& s, std::size_t a) const {
  VectorXd out(static_cast<Index>(dim()));
  features(s, a, out);
  return out;
}

void OneHotFeatures::features(const State& s, std::size_t a, Eigen::Ref<VectorXd> out) const {
  out.setZero();
  out[static_cast<Index>(s.index * num_actions_ + a)] = 1.0;
}

TableFeatures::TableFeatures(std::vector<std::vector<VectorXd>> table) : table_(std::move(table)) {
  if (table_.empty() || table_.front().empty())
    throw std::invalid_argument("TableFeatures: empty table");
  dim_ = static_cast<std::size_t>(table_.front().front().size());
  for (const auto& row : table_) {
    if (row.size() != table_.front().size())
      throw std::invalid_argument("TableFeatures: ragged action count");
    for (const auto& v : row) {
      if (static_cast<std::size_t>(v.size()) != dim_)
        throw std::invalid_argument("TableFeatures: inconsistent feature dimension");
      norm_bound_ = std::max(norm_bound_, v.norm());
    }
  }
}

void TableFeatures::features(const State& s, std::size_t a, Eigen::Ref<VectorXd> out) const {
  out = table_.at(s.index).at(a);
}

RadialBinFeatures::RadialBinFeatures(VectorXd lower, VectorXd upper, std::size_t bins_per_dim,
                                     std::size_t num_actions)
    : num_actions_(num_actions) {
  if (lower.size() != upper.size() || lower.size() == 0 || bins_per_dim < 2)
    throw std::invalid_argument("RadialBinFeatures: bad box or bin count");
  const auto dims = lower.size();
  std::size_t count = 1;
  for (Index k = 0; k < dims; ++k) count *= bins_per_dim;
  centers_.resize(dims, static_cast<Index>(count));
  inv_width_ = (static_cast<double>(bins_per_dim - 1) / (upper - lower).array()).matrix();
  for (std::size_t c = 0; c < count; ++c) {
    std::size_t rem = c;
    for (Index k = 0; k < dims; ++k) {
      const auto pos = static_cast<double>(rem % bins_per_dim);
      rem /= bins_per_dim;
      centers_(k, static_cast<Index>(c)) =
          lower[k] + pos * (upper[k] - lower[k]) / static_cast<double>(bins_per_dim - 1);
    }
  }
}

void RadialBinFeatures::features(const State& s, std::size_t a, Eigen::Ref<VectorXd> out) const {
  out.setZero();
  const Index n = centers_.cols();
  VectorXd psi(n);
  for (Index c = 0; c < n; ++c) {
    const VectorXd diff =
        (s.x.head(centers_.rows()) - centers_.col(c)).cwiseProduct(inv_width_);
    psi[c] = std::exp(-0.5 * diff.squaredNorm());
  }
  const double norm = psi.norm();
  if (norm > 0.0) psi /= norm;
  out.segment(static_cast<Index>(a) * n, n) = psi;
}

VectorXd solve_ball_least_squares(const MatrixXd& gram, const VectorXd& rhs, double bound) {
  const Index d = gram.rows();
  if (d == 0) return VectorXd();
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(gram);
  const VectorXd& sigma = eig.eigenvalues();
  const MatrixXd& basis = eig.eigenvectors();
  const VectorXd proj = basis.transpose() * rhs;
  const double cutoff =
      std::max(sigma.cwiseAbs().maxCoeff(), 1.0) * static_cast<double>(d) * 1e-12;

  auto coefficients = [&](double ridge) {
    VectorXd c = VectorXd::Zero(d);
    for (Index i = 0; i < d; ++i) {
      const double denom = sigma[i] + ridge;
      if (ridge == 0.0 ? sigma[i] > cutoff : denom > 0.0) c[i] = proj[i] / denom;
    }
    return c;
  };

  VectorXd c = coefficients(0.0);
  if (c.norm() <= bound) return basis * c;

  // ||u(ridge)|| is decreasing in ridge; ridge = ||rhs|| / bound already meets the ball.
  double lo = 0.0, hi = rhs.norm() / bound;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (coefficients(mid).norm() > bound) lo = mid;
    else hi = mid;
  }
  c = coefficients(hi);
  const double norm = c.norm();
  if (norm > bound) c *= bound / norm;
  return basis * c;
}

LinearClass::LinearClass(FeatureMapPtr features, double coefficient_bound)
    : features_(std::move(features)), bound_(coefficient_bound) {
  if (!features_) throw std::invalid_argument("LinearClass: null feature map");
  if (!(bound_ > 0.0)) throw std::invalid_argument("LinearClass: bound must be positive");
}

double LinearClass::evaluate(const Params& u, const State& s, std::size_t a) const {
  VectorXd phi(static_cast<Index>(features_->dim()));
  features_->features(s, a, phi);
  return u.dot(phi);
}

Params LinearClass::uniform_params() const {
  return VectorXd::Zero(static_cast<Index>(features_->dim()));
}

FitResult LinearClass::fit(std::span<const CriticSample> samples) const {
  check_targets(samples);
  MatrixXd gram;
  VectorXd rhs;
  accumulate_normal_equations(*features_, samples, gram, rhs);
  FitResult result{solve_ball_least_squares(gram, rhs, bound_), 0.0};
  double sq = 0.0;
  for (const auto& s : samples) {
    const double r = s.target - evaluate(result.params, s.state, s.action);
    sq += r * r;
  }
  result.loss = sq / static_cast<double>(samples.size());
  return result;
}

MatrixXd LinearClass::action_gradients(const Params&, const State& s) const {
  const auto na = features_->num_actions();
  MatrixXd g(static_cast<Index>(features_->dim()), static_cast<Index>(na));
  for (std::size_t a = 0; a < na; ++a) features_->features(s, a, g.col(static_cast<Index>(a)));
  return g;
}

std::shared_ptr<LinearClass> make_tabular_class(std::size_t num_states, std::size_t num_actions,
                                                double bound) {
  return std::make_shared<LinearClass>(std::make_shared<OneHotFeatures>(num_states, num_actions),
                                       bound);
}

FiniteClass::FiniteClass(std::vector<MatrixXd> tables) : tables_(std::move(tables)) {
  if (tables_.empty()) throw std::invalid_argument("FiniteClass: empty class");
  bool found_uniform = false;
  for (std::size_t i = 0; i < tables_.size(); ++i) {
    const MatrixXd& t = tables_[i];
    if (t.rows() != tables_.front().rows() || t.cols() != tables_.front().cols())
      throw std::invalid_argument("FiniteClass: tables differ in shape");
    sup_ = std::max(sup_, t.cwiseAbs().maxCoeff());
    if (!found_uniform) {
      // Constant across actions at every state: its softmax is uniform.
      const bool constant_rows =
          ((t.colwise() - t.col(0)).cwiseAbs().array() == 0.0).all();
      if (constant_rows) {
        found_uniform = true;
        uniform_index_ = i;
      }
    }
  }
  if (!found_uniform)
    throw std::invalid_argument("FiniteClass: no member induces the uniform policy");
}

std::vector<std::size_t> FiniteClass::shape() const {
  return {tables_.size(), num_states(), num_actions()};
}

double FiniteClass::evaluate(const Params& p, const State& s, std::size_t a) const {
  return tables_.at(member_index(p))(static_cast<Index>(s.index), static_cast<Index>(a));
}

FitResult FiniteClass::fit(std::span<const CriticSample> samples) const {
  check_targets(samples);
  std::size_t best = 0;
  double best_loss = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < tables_.size(); ++i) {
    double sq = 0.0;
    for (const auto& s : samples) {
      const double r = s.target - tables_[i](static_cast<Index>(s.state.index),
                                             static_cast<Index>(s.action));
      sq += r * r;
    }
    if (sq < best_loss) {
      best_loss = sq;
      best = i;
    }
  }
  return FitResult{member(best), best_loss / static_cast<double>(samples.size())};
}

MlpClass::MlpClass(std::size_t input_dim, Encoder encoder, std::vector<std::size_t> hidden,
                   std::size_t num_actions, double sup_bound, MlpFitConfig fit)
    : input_dim_(input_dim),
      encoder_(std::move(encoder)),
      net_([&] {
        std::vector<std::size_t> sizes{input_dim};
        sizes.insert(sizes.end(), hidden.begin(), hidden.end());
        sizes.push_back(num_actions);
        return sizes;
      }()),
      sup_(sup_bound),
      fit_(fit) {
  if (!(sup_ > 0.0)) throw std::invalid_argument("MlpClass: sup bound must be positive");
}

std::shared_ptr<MlpClass> MlpClass::for_discrete(std::size_t num_states,
                                                 std::vector<std::size_t> hidden,
                                                 std::size_t num_actions, double sup_bound,
                                                 MlpFitConfig fit) {
  auto encoder = [num_states](const State& s, Eigen::Ref<VectorXd> out) {
    out.setZero();
    out[static_cast<Index>(s.index % num_states)] = 1.0;
  };
  return std::make_shared<MlpClass>(num_states, encoder, std::move(hidden), num_actions,
                                    sup_bound, fit);
}

std::shared_ptr<MlpClass> MlpClass::for_continuous(VectorXd offset, VectorXd scale,
                                                   std::vector<std::size_t> hidden,
                                                   std::size_t num_actions, double sup_bound,
                                                   MlpFitConfig fit) {
  const auto dim = static_cast<std::size_t>(offset.size());
  auto encoder = [offset, scale](const State& s, Eigen::Ref<VectorXd> out) {
    out = (s.x.head(offset.size()) - offset).cwiseQuotient(scale);
  };
  return std::make_shared<MlpClass>(dim, encoder, std::move(hidden), num_actions, sup_bound, fit);
}

VectorXd MlpClass::encode(const State& s) const {
  VectorXd x(static_cast<Index>(input_dim_));
  encoder_(s, x);
  return x;
}

MatrixXd MlpClass::encode_batch(std::span<const State> states) const {
  MatrixXd x(static_cast<Index>(input_dim_), static_cast<Index>(states.size()));
  for (std::size_t i = 0; i < states.size(); ++i) encoder_(states[i], x.col(static_cast<Index>(i)));
  return x;
}

double MlpClass::evaluate(const Params& theta, const State& s, std::size_t a) const {
  const MatrixXd out = net_.forward(theta, encode(s));
  return std::clamp(out(static_cast<Index>(a), 0), -sup_, sup_);
}

void MlpClass::evaluate_all(const Params& theta, const State& s, std::span<double> out) const {
  const MatrixXd y = net_.forward(theta, encode(s));
  for (std::size_t a = 0; a < out.size(); ++a)
    out[a] = std::clamp(y(static_cast<Index>(a), 0), -sup_, sup_);
}

Params MlpClass::uniform_params() const {
  Rng rng(fit_.init_seed);
  return net_.init_params(rng, /*zero_output_layer=*/true);
}

FitResult MlpClass::fit(std::span<const CriticSample> samples) const {
  return fit(samples, fit_.step_size);
}

FitResult MlpClass::fit(std::span<const CriticSample> samples, double step_size) const {
  check_targets(samples);
  const auto m = static_cast<Index>(samples.size());
  MatrixXd x(static_cast<Index>(input_dim_), m);
  for (Index i = 0; i < m; ++i) encoder_(samples[static_cast<std::size_t>(i)].state, x.col(i));

  Params theta = uniform_params();
  Mlp::Workspace ws;
  VectorXd grad(theta.size());
  double loss = 0.0;
  // One extra pass evaluates the loss at the final parameters.
  for (std::size_t step = 0; step <= fit_.steps; ++step) {
    const MatrixXd out = net_.forward(theta, x, &ws);
    MatrixXd d_out = MatrixXd::Zero(out.rows(), out.cols());
    double sq = 0.0;
    for (Index i = 0; i < m; ++i) {
      const auto& smp = samples[static_cast<std::size_t>(i)];
      const double raw = out(static_cast<Index>(smp.action), i);
      const double pred = std::clamp(raw, -sup_, sup_);
      const double r = pred - smp.target;
      sq += r * r;
      if (raw > -sup_ && raw < sup_) d_out(static_cast<Index>(smp.action), i) = 2.0 * r / m;
    }
    loss = sq / static_cast<double>(m);
    if (step == fit_.steps || !std::isfinite(loss)) break;
    grad.setZero();
    net_.backward(theta, ws, d_out, grad);
    theta -= step_size * grad;
  }
  return FitResult{std::move(theta), loss};
}

MatrixXd MlpClass::action_gradients(const Params& theta, const State& s) const {
  Mlp::Workspace ws;
  const MatrixXd out = net_.forward(theta, encode(s), &ws);
  const auto na = static_cast<Index>(num_actions());
  MatrixXd g = MatrixXd::Zero(theta.size(), na);
  VectorXd col(theta.size());
  for (Index a = 0; a < na; ++a) {
    const double raw = out(a, 0);
    if (raw <= -sup_ || raw >= sup_) continue;  // clamped: flat in theta
    MatrixXd d_out = MatrixXd::Zero(na, 1);
    d_out(a, 0) = 1.0;
    col.setZero();
    net_.backward(theta, ws, d_out, col);
    g.col(a) = col;
  }
  return g;
}

TangentFeatureMap::TangentFeatureMap(DifferentiableClassPtr cls, Params theta,
                                     double coefficient_bound, double gradient_bound,
                                     double hessian_bound)
    : cls_(std::move(cls)),
      theta_(std::move(theta)),
      bound_(coefficient_bound),
      gradient_bound_(gradient_bound),
      hessian_bound_(hessian_bound) {
  if (!cls_) throw std::invalid_argument("TangentFeatureMap: null class");
  if (static_cast<std::size_t>(theta_.size()) != cls_->num_params())
    throw std::invalid_argument("TangentFeatureMap: theta has wrong dimension");
  if (!(bound_ > 0.0)) throw std::invalid_argument("TangentFeatureMap: bound must be positive");
}

MatrixXd TangentFeatureMap::all_features(const State& s) const {
  const MatrixXd grads = cls_->action_gradients(theta_, s);
  const std::vector<double> pi = softmax_policy(*cls_, theta_, s);
  VectorXd mean = VectorXd::Zero(grads.rows());
  for (std::size_t a = 0; a < pi.size(); ++a) mean += pi[a] * grads.col(static_cast<Index>(a));
  return grads.colwise() - mean;
}

VectorXd TangentFeatureMap::features(const State& s, std::size_t a) const {
  return all_features(s).col(static_cast<Index>(a));
}

FitResult fit_critic_spi(const FunctionClass& cls, std::span<const CriticSample> samples) {
  return cls.fit(samples);
}

FitResult fit_critic_npg(const TangentFeatureMap& features,
                         std::span<const CriticSample> samples) {
  check_targets(samples);
  const auto d = static_cast<Index>(features.dim());
  const auto m = static_cast<Index>(samples.size());
  MatrixXd x(m, d);
  VectorXd y(m);
  for (Index i = 0; i < m; ++i) {
    const auto& smp = samples[static_cast<std::size_t>(i)];
    x.row(i) = features.features(smp.state, smp.action).transpose();
    y[i] = smp.target;
  }
  MatrixXd gram = MatrixXd::Zero(d, d);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(x.transpose());
  gram = gram.selfadjointView<Eigen::Lower>();
  VectorXd u = solve_ball_least_squares(gram, x.transpose() * y, features.coefficient_bound());
  const double loss = (y - x * u).squaredNorm() / static_cast<double>(m);
  return FitResult{std::move(u), loss};
}

VectorXd tangent_features(const Params& theta, const DifferentiableClass& cls, const State& s,
                          std::size_t a) {
  const MatrixXd grads = cls.action_gradients(theta, s);
  const std::vector<double> pi = softmax_policy(cls, theta, s);
  VectorXd out = grads.col(static_cast<Index>(a));
  for (std::size_t b = 0; b < pi.size(); ++b) out -= pi[b] * grads.col(static_cast<Index>(b));
  return out;
}

std::vector<double> softmax_policy(const FunctionClass& cls, const Params& params,
                                   const State& s) {
  std::vector<double> logits(cls.num_actions()), out(cls.num_actions());
  cls.evaluate_all(params, s, logits);
  softmax(logits, out);
  return out;
}

}  // namespace eniac

#include "eniac/width.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace eniac {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

void Dataset::append(const Dataset& other) {
  items_.insert(items_.end(), other.items_.begin(), other.items_.end());
}

double Dataset::norm(const std::function<double(const State&, std::size_t)>& f) const {
  double sq = 0.0;
  for (const auto& z : items_) {
    const double v = f(z.state, z.action);
    sq += v * v;
  }
  return std::sqrt(sq);
}

void Dataset::write(std::ostream& out) const {
  const auto old = out.precision(17);
  for (const auto& z : items_) {
    out << z.action << ' ' << z.state.index << ' ' << z.state.x.size();
    for (Index i = 0; i < z.state.x.size(); ++i) out << ' ' << z.state.x[i];
    out << '\n';
  }
  out.precision(old);
}

Dataset Dataset::read(std::istream& in) {
  Dataset data;
  std::size_t action, index;
  Index dim;
  while (in >> action >> index >> dim) {
    if (dim < 0 || dim > StateVector::MaxRowsAtCompileTime)
      throw std::invalid_argument("Dataset::read: bad state dimension");
    State s;
    s.index = index;
    s.x.resize(dim);
    for (Index i = 0; i < dim; ++i)
      if (!(in >> s.x[i])) throw std::invalid_argument("Dataset::read: truncated record");
    data.append(std::move(s), action);
  }
  if (!in.eof()) throw std::invalid_argument("Dataset::read: malformed record");
  return data;
}

// ---------------------------------------------------------------------------

FiniteWidthOracle::FiniteWidthOracle(std::shared_ptr<const FiniteClass> cls, const Dataset& data,
                                     double radius)
    : cls_(std::move(cls)) {
  if (!(radius >= 0.0)) throw std::invalid_argument("width: radius must be nonnegative");
  const std::size_t m = cls_->size();
  // Squared Z-norms of each difference, computed once per unordered pair.
  for (std::size_t i = 0; i < m; ++i) {
    pairs_.emplace_back(i, i);
    for (std::size_t j = i + 1; j < m; ++j) {
      double sq = 0.0;
      for (const auto& z : data.items()) {
        const double d = cls_->value(i, z.state.index, z.action) -
                         cls_->value(j, z.state.index, z.action);
        sq += d * d;
      }
      if (std::sqrt(sq) <= radius) {
        pairs_.emplace_back(i, j);
        pairs_.emplace_back(j, i);
      }
    }
  }
}

double FiniteWidthOracle::width(const State& s, std::size_t a) const {
  double best = 0.0;  // (f, f) is always feasible
  for (const auto& [i, j] : pairs_)
    best = std::max(best, cls_->value(i, s.index, a) - cls_->value(j, s.index, a));
  return best;
}

WidthFn FiniteWidthOracle::as_function() const {
  auto self = std::make_shared<const FiniteWidthOracle>(*this);
  return [self](const State& s, std::size_t a) { return self->width(s, a); };
}

double width_finite(const FiniteClass& cls, const Dataset& data, double radius, const State& s,
                    std::size_t a) {
  // Non-owning alias; the oracle does not outlive this call.
  std::shared_ptr<const FiniteClass> alias(std::shared_ptr<const FiniteClass>(), &cls);
  return FiniteWidthOracle(alias, data, radius).width(s, a);
}

// ---------------------------------------------------------------------------

LinearWidthOracle::LinearWidthOracle(FeatureMapPtr features, double coefficient_bound,
                                     double radius, std::optional<double> ridge)
    : features_(std::move(features)), bound_(coefficient_bound), radius_(radius) {
  if (!features_) throw std::invalid_argument("LinearWidthOracle: null feature map");
  if (!(bound_ > 0.0)) throw std::invalid_argument("LinearWidthOracle: bound must be positive");
  if (!(radius_ >= 0.0)) throw std::invalid_argument("width: radius must be nonnegative");
  ridge_ = ridge ? *ridge : radius_ * radius_ / (4.0 * bound_ * bound_);
  if (!(ridge_ >= 0.0)) throw std::invalid_argument("LinearWidthOracle: ridge must be >= 0");
  const auto d = static_cast<Index>(features_->dim());
  gram_ = MatrixXd::Zero(d, d);
}

void LinearWidthOracle::append(const State& s, std::size_t a) {
  frozen_ = false;
  data_.append(s, a);
  if (++since_rebuild_ >= kRebuildInterval) {
    rebuild();
    return;
  }
  const VectorXd phi = (*features_)(s, a);
  gram_.selfadjointView<Eigen::Lower>().rankUpdate(phi);
  gram_.triangularView<Eigen::StrictlyUpper>() = gram_.transpose();
}

void LinearWidthOracle::append(const Dataset& data) {
  for (const auto& z : data.items()) append(z.state, z.action);
}

void LinearWidthOracle::rebuild() {
  const auto d = static_cast<Index>(features_->dim());
  MatrixXd x(static_cast<Index>(data_.size()), d);
  VectorXd row(d);
  for (std::size_t i = 0; i < data_.size(); ++i) {
    features_->features(data_[i].state, data_[i].action, row);
    x.row(static_cast<Index>(i)) = row.transpose();
  }
  gram_ = MatrixXd::Zero(d, d);
  gram_.selfadjointView<Eigen::Lower>().rankUpdate(x.transpose());
  gram_.triangularView<Eigen::StrictlyUpper>() = gram_.transpose();
  since_rebuild_ = 0;
}

void LinearWidthOracle::freeze() {
  if (frozen_) return;
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(gram_);
  eigenvalues_ = eig.eigenvalues().cwiseMax(0.0);
  eigenvectors_ = eig.eigenvectors();
  const double top = eigenvalues_.size() ? eigenvalues_.maxCoeff() : 0.0;
  cutoff_ = std::max(top, 1.0) * static_cast<double>(gram_.rows()) * 1e-12;
  frozen_ = true;
}

double LinearWidthOracle::width_of(const VectorXd& phi) const {
  if (!frozen_) throw std::logic_error("LinearWidthOracle: query before freeze()");
  const double cap = 2.0 * bound_ * phi.norm();
  const VectorXd c = eigenvectors_.transpose() * phi;
  double value;
  if (ridge_ > 0.0) {
    double quad = 0.0;
    for (Index i = 0; i < c.size(); ++i) quad += c[i] * c[i] / (eigenvalues_[i] + ridge_);
    value = std::sqrt(radius_ * radius_ + 4.0 * bound_ * bound_ * ridge_) * std::sqrt(quad);
  } else {
    double quad = 0.0, null_sq = 0.0;
    for (Index i = 0; i < c.size(); ++i) {
      if (eigenvalues_[i] > cutoff_) quad += c[i] * c[i] / eigenvalues_[i];
      else null_sq += c[i] * c[i];
    }
    value = radius_ * std::sqrt(quad) + 2.0 * bound_ * std::sqrt(null_sq);
  }
  return std::min(cap, value);
}

double LinearWidthOracle::width_exact_of(const VectorXd& phi) const {
  if (!frozen_) throw std::logic_error("LinearWidthOracle: query before freeze()");
  const double cap = 2.0 * bound_ * phi.norm();
  const VectorXd c = eigenvectors_.transpose() * phi;
  double null_sq = 0.0;
  for (Index i = 0; i < c.size(); ++i)
    if (eigenvalues_[i] <= cutoff_) null_sq += c[i] * c[i];
  if (radius_ == 0.0) return std::min(cap, 2.0 * bound_ * std::sqrt(null_sq));

  // h(t)^2 = c^T (t G / eps^2 + (1 - t) I / (4 B^2))^-1 c is convex in t on [0, 1];
  // t = 0 is the norm cap and t = 1 the pure data constraint.
  const double inv_eps2 = 1.0 / (radius_ * radius_);
  const double inv_cap2 = 1.0 / (4.0 * bound_ * bound_);
  auto h2 = [&](double t) {
    double total = 0.0;
    for (Index i = 0; i < c.size(); ++i) {
      const double m = t * eigenvalues_[i] * inv_eps2 + (1.0 - t) * inv_cap2;
      if (m <= 0.0) {
        if (c[i] != 0.0) return std::numeric_limits<double>::infinity();
        continue;
      }
      total += c[i] * c[i] / m;
    }
    return total;
  };
  const double phi_golden = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = 0.0, hi = 1.0;
  double x1 = hi - phi_golden * (hi - lo), x2 = lo + phi_golden * (hi - lo);
  double f1 = h2(x1), f2 = h2(x2);
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi_golden * (hi - lo);
      f1 = h2(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi_golden * (hi - lo);
      f2 = h2(x2);
    }
  }
  double best = std::min({h2(0.0), h2(1.0), f1, f2});
  return std::min(cap, std::sqrt(best));
}

double LinearWidthOracle::width(const State& s, std::size_t a) const {
  return width_of((*features_)(s, a));
}

double LinearWidthOracle::width_exact(const State& s, std::size_t a) const {
  return width_exact_of((*features_)(s, a));
}

WidthFn LinearWidthOracle::as_function() const {
  auto self = std::make_shared<LinearWidthOracle>(*this);
  self->freeze();
  return [self](const State& s, std::size_t a) { return self->width(s, a); };
}

double width_linear(FeatureMapPtr features, double coefficient_bound, const Dataset& data,
                    double radius, double ridge, const State& s, std::size_t a) {
  LinearWidthOracle oracle(std::move(features), coefficient_bound, radius, ridge);
  oracle.append(data);
  oracle.freeze();
  return oracle.width(s, a);
}

// ---------------------------------------------------------------------------

void BonusSpec::validate() const {
  if (!(beta > 0.0)) throw std::invalid_argument("BonusSpec: beta must be positive");
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("BonusSpec: gamma outside (0, 1)");
  if (num_actions == 0) throw std::invalid_argument("BonusSpec: no actions");
  if (variant == BonusVariant::compute && !(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("BonusSpec: compute variant needs alpha in (0, 1)");
}

double BonusSpec::magnitude() const {
  if (variant == BonusVariant::sample) return 1.0 / (1.0 - gamma);
  return static_cast<double>(num_actions) / ((1.0 - gamma) * alpha);
}

double bonus(double width_value, const BonusSpec& spec) {
  return width_value >= spec.beta ? spec.magnitude() : 0.0;
}

double default_beta(double target_accuracy, double gamma) {
  return target_accuracy * (1.0 - gamma) / 2.0;
}

KnownStatus known_set_query(const WidthFn& width, double beta, const State& s,
                            std::size_t num_actions) {
  KnownStatus status;
  for (std::size_t a = 0; a < num_actions; ++a)
    if (width(s, a) >= beta) status.unknown_actions.push_back(a);
  status.fully_known = status.unknown_actions.empty();
  return status;
}

Bonus::Bonus(std::size_t num_actions) : num_actions_(num_actions) {}

Bonus::Bonus(Fn fn, std::size_t num_actions, double max_value)
    : fn_(std::move(fn)), num_actions_(num_actions), max_value_(max_value) {}

Bonus Bonus::thresholded(WidthFn width, const BonusSpec& spec) {
  spec.validate();
  auto fn = [width = std::move(width), spec](const State& s, std::size_t a) {
    return bonus(width(s, a), spec);
  };
  return Bonus(std::move(fn), spec.num_actions, spec.magnitude());
}

double Bonus::operator()(const State& s, std::size_t a) const {
  if (table_ && s.is_discrete()) return (*table_)[s.index * num_actions_ + a];
  return fn_ ? fn_(s, a) : 0.0;
}

Bonus Bonus::tabulated(std::size_t num_states) const {
  if (!fn_) return *this;
  Bonus out = *this;
  auto table = std::make_shared<std::vector<double>>(num_states * num_actions_);
  for (std::size_t s = 0; s < num_states; ++s)
    for (std::size_t a = 0; a < num_actions_; ++a)
      (*table)[s * num_actions_ + a] = fn_(State::discrete(s), a);
  out.table_ = std::move(table);
  return out;
}

KnownStatus Bonus::known_status(const State& s) const {
  KnownStatus status;
  for (std::size_t a = 0; a < num_actions_; ++a)
    if ((*this)(s, a) != 0.0) status.unknown_actions.push_back(a);
  status.fully_known = status.unknown_actions.empty();
  return status;
}

bool Bonus::state_known(const State& s) const {
  if (!fn_) return true;
  for (std::size_t a = 0; a < num_actions_; ++a)
    if ((*this)(s, a) != 0.0) return false;
  return true;
}

}  // namespace eniac

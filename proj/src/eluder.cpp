#include "eniac/eluder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace eniac {

namespace {

bool exceeds(double width, double eps) { return width > eps + kIndependenceSlack * (1.0 + eps); }

struct ExactSearch {
  const SetWidthFn& width;
  std::size_t n;
  double eps;
  std::uint64_t budget;
  std::uint64_t evaluations = 0;
  bool exhausted = false;
  // mask -> (longest extension length, first point of that extension)
  std::unordered_map<std::uint64_t, std::pair<std::size_t, std::size_t>> memo = {};
  std::vector<std::size_t> members = {};

  std::size_t longest(std::uint64_t mask) {
    if (exhausted) return 0;
    if (auto it = memo.find(mask); it != memo.end()) return it->second.first;
    members.clear();
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1U) members.push_back(i);
    const std::vector<std::size_t> prefix = members;
    std::vector<std::size_t> candidates;
    for (std::size_t j = 0; j < n; ++j) {
      if (mask >> j & 1U) continue;
      if (++evaluations > budget) {
        exhausted = true;
        return 0;
      }
      if (exceeds(width(prefix, j), eps)) candidates.push_back(j);
    }
    std::size_t best = 0, best_next = n;
    for (std::size_t j : candidates) {
      const std::size_t len = 1 + longest(mask | (std::uint64_t{1} << j));
      if (exhausted) return 0;
      if (len > best) {
        best = len;
        best_next = j;
      }
      if (best == n - static_cast<std::size_t>(prefix.size())) break;  // cannot do better
    }
    memo.emplace(mask, std::make_pair(best, best_next));
    return best;
  }
};

}  // namespace

SetWidthFn finite_set_width(std::shared_ptr<const FiniteClass> cls,
                            std::vector<StateAction> domain, double eps) {
  if (!cls) throw std::invalid_argument("finite_set_width: null class");
  if (!(eps >= 0.0)) throw std::invalid_argument("width: radius must be nonnegative");
  // diffs[p][x] = f_i(x) - f_j(x) for the p-th unordered pair; the symmetric
  // width only needs unordered pairs.
  const std::size_t m = cls->size();
  auto diffs = std::make_shared<std::vector<std::vector<double>>>();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      std::vector<double> row(domain.size());
      for (std::size_t x = 0; x < domain.size(); ++x)
        row[x] = cls->value(i, domain[x].state.index, domain[x].action) -
                 cls->value(j, domain[x].state.index, domain[x].action);
      diffs->push_back(std::move(row));
    }
  return [diffs, eps](std::span<const std::size_t> prefix, std::size_t query) {
    double best = 0.0;
    for (const auto& row : *diffs) {
      double sq = 0.0;
      for (std::size_t x : prefix) sq += row[x] * row[x];
      if (std::sqrt(sq) <= eps) best = std::max(best, std::abs(row[query]));
    }
    return best;
  };
}

SetWidthFn linear_set_width(FeatureMapPtr features, double coefficient_bound,
                            std::vector<StateAction> domain, double eps) {
  auto shared = std::make_shared<std::vector<StateAction>>(std::move(domain));
  return [features = std::move(features), coefficient_bound, shared, eps](
             std::span<const std::size_t> prefix, std::size_t query) {
    LinearWidthOracle oracle(features, coefficient_bound, eps, 0.0);
    for (std::size_t i : prefix) oracle.append((*shared)[i].state, (*shared)[i].action);
    oracle.freeze();
    return oracle.width_exact((*shared)[query].state, (*shared)[query].action);
  };
}

bool is_independent(const FiniteClass& cls, const Dataset& data, double eps, const State& s,
                    std::size_t a) {
  return exceeds(width_finite(cls, data, eps, s, a), eps);
}

bool is_independent(FeatureMapPtr features, double coefficient_bound, const Dataset& data,
                    double eps, const State& s, std::size_t a) {
  LinearWidthOracle oracle(std::move(features), coefficient_bound, eps, 0.0);
  oracle.append(data);
  oracle.freeze();
  return exceeds(oracle.width_exact(s, a), eps);
}

EluderResult eluder_dim_greedy(const SetWidthFn& width, std::size_t domain_size, double eps) {
  EluderResult result;
  std::vector<bool> used(domain_size, false);
  for (;;) {
    bool extended = false;
    for (std::size_t j = 0; j < domain_size; ++j) {
      if (used[j]) continue;
      ++result.evaluations;
      if (exceeds(width(result.witness, j), eps)) {
        used[j] = true;
        result.witness.push_back(j);
        extended = true;
        break;
      }
    }
    if (!extended) break;
  }
  result.dimension = result.witness.size();
  return result;
}

EluderResult eluder_dimension(const SetWidthFn& width, std::size_t domain_size, double eps,
                              const EluderOptions& options) {
  if (options.mode == EluderMode::greedy) return eluder_dim_greedy(width, domain_size, eps);

  const std::size_t limit = std::min<std::size_t>(options.max_exact_domain, 63);
  if (domain_size > limit) {
    EluderResult r = eluder_dim_greedy(width, domain_size, eps);
    r.fell_back = true;
    return r;
  }

  ExactSearch search{width, domain_size, eps, options.evaluation_budget};
  const std::size_t best = search.longest(0);
  if (search.exhausted) {
    EluderResult r = eluder_dim_greedy(width, domain_size, eps);
    r.fell_back = true;
    r.evaluations += search.evaluations;
    return r;
  }

  EluderResult result;
  result.dimension = best;
  result.exact = true;
  result.evaluations = search.evaluations;
  std::uint64_t mask = 0;
  while (result.witness.size() < best) {
    const std::size_t next = search.memo.at(mask).second;
    result.witness.push_back(next);
    mask |= std::uint64_t{1} << next;
  }
  return result;
}

}  // namespace eniac

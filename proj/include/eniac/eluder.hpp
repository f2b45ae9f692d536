#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "eniac/function_class.hpp"
#include "eniac/width.hpp"

namespace eniac {

// Independence is decided with a small slack so that a point whose exact
// width equals eps up to rounding still counts as dependent.
inline constexpr double kIndependenceSlack = 1e-9;

/// Symmetric width of the class at domain[query] given the data domain[prefix...].
using SetWidthFn = std::function<double(std::span<const std::size_t> prefix, std::size_t query)>;

/// Finite class: exact max |f - f'| over pairs with ||f - f'||_Z <= eps.
SetWidthFn finite_set_width(std::shared_ptr<const FiniteClass> cls,
                            std::vector<StateAction> domain, double eps);
/// Linear class: exact width (tightest member of the ridge family).
SetWidthFn linear_set_width(FeatureMapPtr features, double coefficient_bound,
                            std::vector<StateAction> domain, double eps);

/// (s, a) is eps-independent of Z iff the symmetric width exceeds eps.
bool is_independent(const FiniteClass& cls, const Dataset& data, double eps, const State& s,
                    std::size_t a);
bool is_independent(FeatureMapPtr features, double coefficient_bound, const Dataset& data,
                    double eps, const State& s, std::size_t a);

enum class EluderMode { exact, greedy };

struct EluderOptions {
  EluderMode mode = EluderMode::exact;
  /// Exact search is refused above this domain size and falls back to greedy.
  std::size_t max_exact_domain = 20;
  /// Width evaluations allowed before exact search gives up.
  std::uint64_t evaluation_budget = 2'000'000;
};

struct EluderResult {
  std::size_t dimension = 0;
  /// True when the value is the exact longest-sequence length.
  bool exact = false;
  /// Exact mode was requested but the budget or domain size forced greedy.
  bool fell_back = false;
  /// Domain indices of one sequence achieving `dimension`, in order.
  std::vector<std::size_t> witness;
  std::uint64_t evaluations = 0;
};

/// Longest sequence over the domain in which each element is eps-independent
/// of its predecessors. Width depends only on the predecessor set, so exact
/// mode memoizes over subsets.
EluderResult eluder_dimension(const SetWidthFn& width, std::size_t domain_size, double eps,
                              const EluderOptions& options = {});

EluderResult eluder_dim_greedy(const SetWidthFn& width, std::size_t domain_size, double eps);

}  // namespace eniac

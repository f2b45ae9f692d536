#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "eniac/function_class.hpp"
#include "eniac/width.hpp"

namespace eniac {

struct WidthTrainConfig {
  double lambda = 0.1;
  double lambda1 = 0.01;
  std::size_t query_set_size = 20000;
  double learning_rate = 0.001;
  std::size_t buffer_batch = 160;
  std::size_t query_batch = 20;
  double gradient_clip = 5.0;
  std::size_t outer_iters = 1000;
  std::size_t inner_iters = 10;

  void validate() const;
};

/// Trainable network f and frozen copy f' sharing the critic's architecture.
/// Outputs are the raw network heads (no clamp), one per action.
class WidthNetPair {
 public:
  /// Fresh random weights for f, then f' := f.
  static WidthNetPair initialize(std::shared_ptr<const MlpClass> arch, Rng& rng);
  WidthNetPair(std::shared_ptr<const MlpClass> arch, Params f, Params f_prime);

  const MlpClass& architecture() const { return *arch_; }
  std::shared_ptr<const MlpClass> architecture_ptr() const { return arch_; }
  const Params& f() const { return f_; }
  const Params& f_prime() const { return f_prime_; }
  void set_f(Params f);

  /// f(s, a) - f'(s, a).
  double difference(const State& s, std::size_t a) const;
  double width(const State& s, std::size_t a) const;
  /// Differences on a batch of pairs.
  Eigen::VectorXd differences(std::span<const StateAction> batch) const;

  WidthFn as_function() const;

 private:
  std::shared_ptr<const MlpClass> arch_;
  Params f_;
  Params f_prime_;
};

/// FNV-1a over the raw bytes of a parameter vector.
std::uint64_t params_hash(const Params& p);

struct WidthLoss {
  double stretch = 0.0;     // lambda * mean_Q (f - f')^2
  double tie = 0.0;         // -mean_j (f - f')^2
  double degeneracy = 0.0;  // -lambda1 * mean_Q (f - f')
  double total() const { return stretch + tie + degeneracy; }
};

/// The loss to maximize; both batches must be nonempty.
WidthLoss width_loss(const WidthNetPair& pair, std::span<const StateAction> query_batch,
                     std::span<const StateAction> buffer_batch, double lambda, double lambda1);

/// Gradient of the total loss with respect to f's parameters.
Eigen::VectorXd width_loss_gradient(const WidthNetPair& pair,
                                    std::span<const StateAction> query_batch,
                                    std::span<const StateAction> buffer_batch, double lambda,
                                    double lambda1);

struct WidthLogRow {
  std::size_t iter = 0;
  double loss = 0.0;
  double mean_buffer_width = 0.0;
  double mean_query_width = 0.0;
};

void write_width_log(std::ostream& out, const std::vector<WidthLogRow>& rows);

struct TrainedWidth {
  WidthNetPair pair;
  Dataset query_set;
  std::vector<WidthLogRow> log;
  /// Largest single update norm; never exceeds learning_rate * gradient_clip.
  double max_update_norm = 0.0;

  WidthFn as_function() const { return pair.as_function(); }
};

using QuerySampler = std::function<StateAction(Rng&)>;

/// Stretches f away from f' on query minibatches while tying them on buffer
/// minibatches: I outer iterations, each with one query batch and J clipped
/// gradient-ascent steps on fresh buffer batches. Throws std::runtime_error
/// if the loss becomes non-finite.
TrainedWidth train_width(std::shared_ptr<const MlpClass> arch, const Dataset& buffer,
                         const Dataset& query_set, const WidthTrainConfig& config, Rng& rng);

/// Draws the query set Z_Q (config.query_set_size pairs) from `sampler` first.
TrainedWidth train_width(std::shared_ptr<const MlpClass> arch, const Dataset& buffer,
                         const QuerySampler& sampler, const WidthTrainConfig& config, Rng& rng);

/// b(s, a) = 0.5 w(s, a) / max over Z_Q of w. A zero maximum yields the zero
/// bonus and a warning on stderr.
Bonus normalized_bonus(const WidthFn& width, const Dataset& query_set, std::size_t num_actions);

}  // namespace eniac

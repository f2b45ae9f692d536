#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "eniac/actor_critic.hpp"
#include "eniac/estimators.hpp"
#include "eniac/function_class.hpp"
#include "eniac/neural_width.hpp"
#include "eniac/width.hpp"

namespace eniac {

/// pi^1 (uniform) followed by one policy per finished epoch.
class PolicyCover {
 public:
  explicit PolicyCover(std::size_t num_actions);

  void add(PolicyPtr policy);
  std::size_t size() const { return policies_.size(); }
  const PolicyPtr& operator[](std::size_t i) const { return policies_[i]; }
  const PolicyPtr& newest() const { return policies_.back(); }
  const std::vector<PolicyPtr>& policies() const { return policies_; }

 private:
  std::vector<PolicyPtr> policies_;
};

/// rho_cov: pick a cover policy uniformly, then one occupancy draw from s0.
PairSampler build_cover_distribution(const Mdp& mdp, const PolicyCover& cover);

/// Appends K occupancy draws of the newest cover policy.
void advance_buffer(Dataset& buffer, const Mdp& mdp, const PolicyCover& cover, std::size_t k,
                    Rng& rng, RolloutCounters* counters = nullptr);

enum class BonusKind {
  /// Thresholded exact width (finite / linear / tangent classes).
  width_threshold,
  /// Trained width-net pair with the normalized bonus (MLP critics).
  neural_normalized,
  /// All-zero bonus: the cover-only baseline.
  zero
};

std::string bonus_kind_name(BonusKind kind);

struct EniacConfig {
  std::size_t epochs = 10;     // N
  std::size_t rollouts = 100;  // K
  double radius = 0.1;         // eps
  /// Threshold beta; unset uses default_beta(target_accuracy, gamma).
  std::optional<double> beta;
  double target_accuracy = 0.1;
  /// Ridge for linear widths; unset uses eps^2 / (4 B^2).
  std::optional<double> ridge;
  UpdateVariant variant;
  PolicyUpdateConfig update;
  /// Overrides the automatic choice (zero selects the baseline).
  std::optional<BonusKind> bonus_kind;
  WidthTrainConfig width_train;
  /// Exploitation is evaluated every this many epochs and after the last; 0 = last only.
  std::size_t evaluate_every = 0;
  std::size_t exploit_rollouts = 500;
  /// Fill the wallclock columns; off by default so outputs are reproducible.
  bool record_wallclock = false;
  std::uint64_t seed = 0;

  void validate() const;
  double resolved_beta(double gamma) const;
};

std::string eniac_config_to_json(const EniacConfig& config);
/// Missing keys keep their defaults; unknown keys are rejected.
EniacConfig eniac_config_from_json(const std::string& text);

struct EpochRecord {
  std::size_t epoch = 0;
  std::size_t buffer_size = 0;
  /// Fraction of buffer pairs with nonzero bonus.
  double unknown_fraction = 0.0;
  /// Monte-Carlo exploitation value at s0 (NaN when not evaluated this epoch).
  double exploit_value = std::numeric_limits<double>::quiet_NaN();
  /// Exact value of the exploitation policy on tabular MDPs (NaN otherwise).
  double exploit_value_exact = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t env_rollouts = 0;
  std::uint64_t env_steps = 0;
  double wallclock = 0.0;
};

struct IterationRecord {
  std::size_t epoch = 0;
  IterationDiagnostics diag;
  double wallclock = 0.0;
};

struct ExploitationResult {
  double value = 0.0;
  double exact_value = std::numeric_limits<double>::quiet_NaN();
  PolicyPtr policy;
  RolloutCounters counters;
};

/// One policy update with b = 0 and rho = rho_cov, then the mean of
/// `exploit_rollouts` value draws at s0 under the raw reward.
ExploitationResult evaluate_exploitation(const Mdp& mdp, const PolicyCover& cover,
                                         FunctionClassPtr cls, const EniacConfig& config,
                                         Rng& rng);

struct EniacResult {
  /// Unif(pi^2, ..., pi^{N+1}).
  std::shared_ptr<const MixturePolicy> policy;
  PolicyCover cover{1};
  Dataset buffer;
  std::vector<EpochRecord> epochs;
  std::vector<IterationRecord> iterations;
  /// Most recent exploitation evaluation.
  std::optional<ExploitationResult> exploitation;
  RolloutCounters counters;
  BonusKind bonus_kind = BonusKind::width_threshold;
};

/// Called after every epoch with the evaluation of that epoch, if any;
/// returning false stops the run early.
using EpochCallback = std::function<bool(const EpochRecord&, const ExploitationResult*)>;

/// Algorithm-1 epoch loop. Failures abort with epoch context; records
/// gathered so far are available through `on_epoch`. The output mixture
/// covers the epochs actually run.
EniacResult run_eniac(const Mdp& mdp, FunctionClassPtr cls, const EniacConfig& config, Rng& rng,
                      const EpochCallback& on_epoch = {});

/// Bonus the driver would build for `buffer` (exposed for tests and demos).
Bonus build_epoch_bonus(const Mdp& mdp, FunctionClassPtr cls, const EniacConfig& config,
                        BonusKind kind, const Dataset& buffer, const PolicyCover& cover, Rng& rng);

BonusKind default_bonus_kind(const FunctionClass& cls, const UpdateVariant& variant);

void write_epoch_csv(std::ostream& out, const std::vector<EpochRecord>& rows);
void write_iteration_csv(std::ostream& out, const std::vector<IterationRecord>& rows);
/// Structured run manifest: full config, seed and bonus backend.
std::string run_manifest(const EniacConfig& config, const std::string& environment,
                         const std::string& function_class, BonusKind kind);

}  // namespace eniac

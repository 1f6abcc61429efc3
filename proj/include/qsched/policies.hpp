#ifndef QSCHED_POLICIES_HPP
#define QSCHED_POLICIES_HPP

#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "qsched/estimator.hpp"
#include "qsched/random.hpp"
#include "qsched/sources.hpp"
#include "qsched/types.hpp"

namespace qsched {

// ---------------------------------------------------------------------------
// Policy parameter kinds

struct DiscountedUcbParams {
  double gamma = 0.999;
  double c1 = 0.01;
};
struct UcbParams {
  double c1 = 0.01;
};
struct OracleParams {};  // schedules with the true service rates
struct EmpiricalMeanParams {
  double default_rate = 1.0;  // rate assumed for pairs with no completed sample
};
struct FrameMaxWeightParams {
  Slot frame = 20000;
  double c1 = 0.01;
};
struct DamUcbParams {
  Slot epoch = 1;
  double c1 = 0.01;
};
struct RandomParams {};

using PolicyKind =
    std::variant<DiscountedUcbParams, UcbParams, OracleParams, EmpiricalMeanParams,
                 FrameMaxWeightParams, DamUcbParams, RandomParams>;

std::string policy_kind_name(const PolicyKind& kind);

/// A named policy instance; the name keys output files and seed streams.
struct PolicySpec {
  std::string name;
  PolicyKind kind;

  static PolicySpec of(PolicyKind kind);  // canonical kind name
};

// ---------------------------------------------------------------------------
// Tie-breaking

enum class TieBreak { kLowestIndex, kRandom };

/// Streaming argmax with configurable tie handling: lowest index by default,
/// or a seeded uniform choice among the exactly-tied maxima.
class ArgmaxPicker {
 public:
  ArgmaxPicker(TieBreak mode, Rng* rng) : mode_(mode), rng_(rng) {}

  void start() {
    best_ = kNoType;
    best_weight_ = 0.0;
    ties_ = 0;
  }
  void offer(TypeId i, double weight);
  TypeId best() const { return best_; }

 private:
  TieBreak mode_;
  Rng* rng_;
  TypeId best_ = kNoType;
  double best_weight_ = 0.0;
  int64_t ties_ = 0;
};

// ---------------------------------------------------------------------------
// Scheduling policies

/// A scheduling policy consumed by the simulation loop. Each slot t >= 1 the
/// runner first calls observe() with the previous slot's events, then pick()
/// with the current state; slot 0 is scheduled uniformly at random by the
/// runner itself. Policies are single-owner per run and freely movable
/// between threads.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual void observe(const SlotEvents& prev) { (void)prev; }
  /// Fill picks[j] for every j in `available` (others stay kNoType).
  virtual void pick(const SystemState& state, std::span<const ServerId> available,
                    std::vector<TypeId>& picks) = 0;
};

/// MaxWeight with (discounted) UCB. For every available server the pick is
/// argmax_i Q_i / max{mean-time estimate - bonus, 1}; gamma = 1 gives the
/// undiscounted variant.
class MaxWeightUcbPolicy : public Policy {
 public:
  MaxWeightUcbPolicy(const SystemConfig& cfg, double gamma, double c1,
                     TieBreak tie_break, uint64_t tie_seed);

  void observe(const SlotEvents& prev) override { estimator_.update(prev); }
  void pick(const SystemState& state, std::span<const ServerId> available,
            std::vector<TypeId>& picks) override;

  const EstimatorState& estimator() const { return estimator_; }

 private:
  EstimatorState estimator_;
  Rng tie_rng_;
  ArgmaxPicker picker_;
};

/// MaxWeight with the true service rates: argmax_i Q_i * mu_{i,j}(t).
class OracleMaxWeightPolicy : public Policy {
 public:
  OracleMaxWeightPolicy(const SystemConfig& cfg, const ServiceSpecSet& services,
                        TieBreak tie_break, uint64_t tie_seed);

  void pick(const SystemState& state, std::span<const ServerId> available,
            std::vector<TypeId>& picks) override;

 private:
  const ServiceSpecSet* services_;
  int num_types_;
  int num_servers_;
  Rng tie_rng_;
  ArgmaxPicker picker_;
  // service rates are piecewise constant; cache the current segment's matrix
  std::vector<double> mu_;
  Slot mu_valid_from_ = -1;
  Slot mu_valid_to_ = -1;
  void refresh_mu(Slot t);
};

/// MaxWeight with plain empirical means and no exploration bonus: the rate
/// estimate is completions/served-slots, or `default_rate` with no data.
/// Unstable by design on adversarial early draws.
class EmpiricalMeanPolicy : public Policy {
 public:
  EmpiricalMeanPolicy(const SystemConfig& cfg, double default_rate,
                      TieBreak tie_break, uint64_t tie_seed);

  void observe(const SlotEvents& prev) override;
  void pick(const SystemState& state, std::span<const ServerId> available,
            std::vector<TypeId>& picks) override;

  double rate_estimate(TypeId i, ServerId j) const;

 private:
  int num_types_;
  int num_servers_;
  double default_rate_;
  std::vector<int64_t> completions_;
  std::vector<int64_t> served_slots_;
  Rng tie_rng_;
  ArgmaxPicker picker_;
};

/// Frame-based MaxWeight reconstruction: queue lengths are frozen at the
/// start of each frame and the (undiscounted) UCB statistics restart there;
/// within a frame picks run against the frozen snapshot, with the bonus
/// clock counting slots since the frame began. In-flight service counters
/// stay physical so a completion still contributes its full service time.
class FrameMaxWeightPolicy : public Policy {
 public:
  FrameMaxWeightPolicy(const SystemConfig& cfg, Slot frame, double c1,
                       TieBreak tie_break, uint64_t tie_seed);

  void observe(const SlotEvents& prev) override { estimator_.update(prev); }
  void pick(const SystemState& state, std::span<const ServerId> available,
            std::vector<TypeId>& picks) override;

  const EstimatorState& estimator() const { return estimator_; }

 private:
  Slot frame_;
  EstimatorState estimator_;  // gamma = 1
  std::vector<int64_t> frozen_queue_;
  Slot frame_start_ = 0;
  Rng tie_rng_;
  ArgmaxPicker picker_;
};

/// Epoch-held UCB reconstruction: at each epoch boundary a full server-to-type
/// assignment is computed from the current queues and cumulative UCB
/// statistics, then held for the epoch; statistics keep updating throughout.
/// The slot-0 random schedule is adopted as epoch 0's assignment.
class DamUcbPolicy : public Policy {
 public:
  DamUcbPolicy(const SystemConfig& cfg, Slot epoch, double c1, TieBreak tie_break,
               uint64_t tie_seed);

  void observe(const SlotEvents& prev) override;
  void pick(const SystemState& state, std::span<const ServerId> available,
            std::vector<TypeId>& picks) override;

 private:
  Slot epoch_;
  EstimatorState estimator_;  // gamma = 1
  std::vector<TypeId> assignment_;
  Rng tie_rng_;
  ArgmaxPicker picker_;
};

/// Uniform random pick each slot.
class RandomPolicy : public Policy {
 public:
  RandomPolicy(const SystemConfig& cfg, uint64_t seed)
      : num_types_(cfg.num_types), rng_(seed) {}

  void pick(const SystemState& state, std::span<const ServerId> available,
            std::vector<TypeId>& picks) override;

 private:
  int num_types_;
  Rng rng_;
};

/// Build a policy instance for one run. Seed streams are derived from the
/// run seed and a stable hash of the policy name, so adding another policy
/// to an experiment never shifts an existing policy's draws.
std::unique_ptr<Policy> make_policy(const PolicySpec& spec, const SystemConfig& cfg,
                                    const ServiceSpecSet& services,
                                    TieBreak tie_break, uint64_t run_seed);

/// Seed for the runner's slot-0 uniform random schedule of this policy.
uint64_t slot0_stream_seed(const PolicySpec& spec, uint64_t run_seed);

}  // namespace qsched

#endif  // QSCHED_POLICIES_HPP

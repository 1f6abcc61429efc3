#ifndef QSCHED_MODEL_HPP
#define QSCHED_MODEL_HPP

#include <span>
#include <string>
#include <vector>

#include "qsched/types.hpp"

namespace qsched {

/// Source of service times. sample(i, j, t) is consulted once per job start
/// and must return a value in [1, service_bound]; the draw is fixed at start
/// time and never revised.
class ServiceSampler {
 public:
  virtual ~ServiceSampler() = default;
  virtual int sample(TypeId type, ServerId server, Slot t) = 0;
};

/// Servers not serving any job at the start of the slot, ascending.
std::vector<ServerId> available_servers(const SystemState& state);

/// Advance the system by one slot.
///
/// Order of operations inside the slot:
///   1. busy servers serve one slot; a job whose remaining time hits zero
///      completes at the end of the slot and frees the server for the next;
///   2. picking servers are processed in ascending server index; a pick of
///      type i is assigned a job when the pool of waiting type-i jobs plus
///      this slot's arrivals (minus jobs already handed out) is positive,
///      otherwise the server idles (its indicator fires with eta = 0);
///   3. newly assigned jobs draw their service time from `sampler` at the
///      current slot; a draw of 1 completes at the end of this same slot;
///   4. queues update as Q_i(t+1) = Q_i(t) + A_i(t) - sum_j 1_{i,j}(t) eta_j(t).
///
/// Arrivals of slot t are visible to the assignment pool but the pick
/// decision itself was made from Q(t) by the caller.
///
/// Throws ContractViolation for a pick by a busy server and ConfigError for
/// arrivals exceeding the arrival bound.
SlotEvents advance_slot(SystemState& state, std::span<const int64_t> arrivals,
                        std::span<const TypeId> picks, ServiceSampler& sampler,
                        const SystemConfig& cfg);

/// Allocation-free variant for hot loops: fills `out` in place.
void advance_slot_into(SystemState& state, std::span<const int64_t> arrivals,
                       std::span<const TypeId> picks, ServiceSampler& sampler,
                       const SystemConfig& cfg, SlotEvents& out);

/// Trajectory invariant checker used by tests and the acceptance suite.
/// Verifies, on every transition: the queue update identity, the one-slot
/// bounds Q_i(t) - J <= Q_i(t+1) <= Q_i(t) + U_A and their multi-slot form
/// against periodic anchors, the envelope Q_i(t+1) <= max{J, Q_i(t) + A_i(t)
/// - sum_j 1_{i,j}(t)}, waiting-queue consistency, non-preemption, and that
/// every started job completes exactly its drawn service time later.
class TrajectoryChecker {
 public:
  explicit TrajectoryChecker(const SystemConfig& cfg);

  /// Call with the states around one advance_slot call and the slot's events.
  void on_slot(const SystemState& before, const SystemState& after,
               const SlotEvents& events);

  int64_t violations() const { return violations_; }
  const std::string& first_violation() const { return first_violation_; }

 private:
  void fail(const std::string& msg);

  SystemConfig cfg_;
  int64_t violations_ = 0;
  std::string first_violation_;
  // pending[j]: expected completion slot and drawn length of the in-flight job
  struct Pending {
    TypeId type = kNoType;
    Slot completes_at = 0;
    int length = 0;
  };
  std::vector<Pending> pending_;
  std::vector<int64_t> anchor_queue_;
  Slot anchor_slot_ = 0;
  static constexpr Slot kAnchorStride = 1024;
};

}  // namespace qsched

#endif  // QSCHED_MODEL_HPP

#ifndef QSCHED_ESTIMATOR_HPP
#define QSCHED_ESTIMATOR_HPP

#include <span>
#include <vector>

#include "qsched/types.hpp"

namespace qsched {

/// log(sum_{tau=0}^{t-1} gamma^tau), computed in closed form:
/// log((1 - gamma^t)/(1 - gamma)) for gamma < 1, log(t) for gamma = 1.
double discounted_horizon_log(double gamma, Slot t);

/// Discounted service statistics, one cell per (type, server) pair.
///
/// n_hat is the discounted completion count, phi_hat the discounted sum of
/// completed service times, and served the slots the in-flight job on each
/// pair has received so far. A completion that started m slots before the
/// current update enters both sums with coefficient gamma^m, i.e. discounted
/// from the job's start slot. gamma = 1 degenerates to plain counts and sums.
///
/// phi_hat >= n_hat always (each completion adds coeff * S with S >= 1), so
/// the estimated mean service time phi_hat/n_hat is >= 1 whenever n_hat > 0.
struct EstimatorState {
  int num_types = 0;
  int num_servers = 0;
  double gamma = 1.0;
  double bonus_scale = 2.0;  // c1
  int service_bound = 1;     // U_S
  std::vector<double> n_hat;    // I x J, row-major
  std::vector<double> phi_hat;  // I x J
  std::vector<int> served;      // I x J; in-flight slots served (M)

  EstimatorState() = default;
  EstimatorState(const SystemConfig& cfg, double gamma, double bonus_scale);

  size_t idx(TypeId i, ServerId j) const {
    return static_cast<size_t>(i) * num_servers + j;
  }

  void reset();

  /// Apply one slot of events (the events of slot t-1, when updating at the
  /// start of slot t). Per pair, in order: the in-flight counter of the pair
  /// the server was scheduled to is incremented; both sums are discounted by
  /// gamma and, on a non-idle completion, receive gamma^(served before this
  /// slot) and that times the full service time respectively; counters of
  /// pairs whose indicator fired are cleared. Idle picks fire the indicator
  /// with eta = 0 and therefore only discount.
  void update(const SlotEvents& prev);

  /// Exploration bonus c1 * U_S * sqrt(discounted_horizon_log / n_hat).
  /// Returns +infinity when the pair has no mass (maximal optimism).
  /// t >= 1 required: slot 0 schedules uniformly at random instead.
  double bonus(TypeId i, ServerId j, Slot t) const;

  /// Denominator of the scheduling weight: the estimated mean service time
  /// minus the bonus, clamped to at least 1. With no mass the convention
  /// 0/0 = 0 applies to the rate estimate and the clamp makes the
  /// denominator exactly 1 (rate optimistically treated as 1).
  double pick_denominator(TypeId i, ServerId j, Slot t) const;

  /// Hot-loop variants taking discounted_horizon_log(gamma, t) once per slot.
  double bonus_with_log(TypeId i, ServerId j, double horizon_log) const;
  double pick_denominator_with_log(TypeId i, ServerId j, double horizon_log) const;

 private:
  std::vector<double> gamma_pow_;  // gamma^k for k in [0, service_bound]
};

/// Start-time-discounted sums over an explicit completed-job log:
///   n_hat(t)  = sum_k gamma^(t - 1 - start_k)
///   phi_hat(t) = sum_k gamma^(t - 1 - start_k) * S_k
/// for jobs completed strictly before slot t. Closed-form counterpart of the
/// incremental update, used as its test oracle.
struct CompletedJob {
  Slot start = 0;
  int service_time = 1;
};

struct DiscountedSums {
  double n_hat = 0.0;
  double phi_hat = 0.0;
};

DiscountedSums closed_form_stats(std::span<const CompletedJob> jobs, Slot t,
                                 double gamma);

/// Same, with gamma powers taken from a precomputed table (power_table[k]
/// must equal gamma^k for every needed exponent).
DiscountedSums closed_form_stats(std::span<const CompletedJob> jobs, Slot t,
                                 std::span<const double> power_table);

}  // namespace qsched

#endif  // QSCHED_ESTIMATOR_HPP

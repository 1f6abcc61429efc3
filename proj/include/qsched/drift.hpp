#ifndef QSCHED_DRIFT_HPP
#define QSCHED_DRIFT_HPP

#include <vector>

#include "qsched/timeline.hpp"
#include "qsched/types.hpp"

namespace qsched {

/// Discount horizon scale g(gamma) = 4/(1-gamma) * log(1/(1-gamma)),
/// the effective memory length of the discounted estimator. gamma in (0, 1).
double discount_memory(double gamma);

/// Result of checking how fast the true service statistics are allowed to
/// drift for the discounted estimator to track them. Three checks run, each
/// by enumerating value changes within its window:
///  - short_range: mean service times may differ by at most
///    (1/g) * (1/gamma)^(|dt|-1) for separations |dt| <= 2 g(gamma);
///  - job_scale: service rates may drift by at most 1/g^p across any
///    separation up to the service bound (one job's possible span);
///  - long_range: mean service times may differ by at most
///    delta/((c2+1) g) * (1/gamma)^(|dt|-1) for separations up to
///    (c2+1) g / delta, where c2 = 5 (I * U_A + J).
struct DriftReport {
  double gamma = 0.0;
  double p = 0.0;
  double delta = 0.0;
  double g = 0.0;   // discount_memory(gamma)
  double c2 = 0.0;  // 5 (I U_A + J)
  double max_job_scale_drift = 0.0;  // largest |mu(ta) - mu(tb)| within a job span
  bool pass_short_range = true;
  bool pass_job_scale = true;
  bool pass_long_range = true;
  /// True when the horizon is shorter than some check's window, so only the
  /// observable separations were enumerated.
  bool partial = false;

  bool all_pass() const { return pass_short_range && pass_job_scale && pass_long_range; }
};

/// Check the drift bounds for every (type, server) pair given the pairs'
/// mean-service-time timelines (row-major I x J). Exploits piecewise
/// constancy: within a segment all differences vanish, so each check
/// reduces to segment pairs at their closest separation, where the
/// exponential bound is tightest. Equivalent to enumerating all slot pairs.
DriftReport validate_drift(const std::vector<Timeline<double>>& mean_times,
                           const SystemConfig& cfg, double gamma, double p,
                           double delta);

}  // namespace qsched

#endif  // QSCHED_DRIFT_HPP

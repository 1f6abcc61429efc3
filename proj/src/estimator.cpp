#include "qsched/estimator.hpp"

#include <cmath>
#include <limits>

namespace qsched {

double discounted_horizon_log(double gamma, Slot t) {
  if (t < 1) throw ContractViolation("discounted_horizon_log needs t >= 1");
  if (gamma == 1.0) return std::log(static_cast<double>(t));
  return std::log((1.0 - std::pow(gamma, static_cast<double>(t))) / (1.0 - gamma));
}

EstimatorState::EstimatorState(const SystemConfig& cfg, double gamma_in,
                               double bonus_scale_in)
    : num_types(cfg.num_types),
      num_servers(cfg.num_servers),
      gamma(gamma_in),
      bonus_scale(bonus_scale_in),
      service_bound(cfg.service_bound) {
  if (!(gamma > 0.0) || !(gamma <= 1.0))
    throw ConfigError("estimator discount must lie in (0, 1]");
  if (!(bonus_scale > 0.0)) throw ConfigError("bonus scale c1 must be positive");
  gamma_pow_.resize(service_bound + 1);
  for (int k = 0; k <= service_bound; ++k)
    gamma_pow_[k] = std::pow(gamma, static_cast<double>(k));
  reset();
}

void EstimatorState::reset() {
  n_hat.assign(static_cast<size_t>(num_types) * num_servers, 0.0);
  phi_hat.assign(n_hat.size(), 0.0);
  served.assign(n_hat.size(), 0);
}

void EstimatorState::update(const SlotEvents& prev) {
  for (TypeId i = 0; i < num_types; ++i) {
    for (ServerId j = 0; j < num_servers; ++j) {
      const size_t k = idx(i, j);
      const int served_before = served[k];
      if (prev.scheduled[j] == i) served[k] = served_before + 1;

      const bool fired = prev.completed[j] == i;
      n_hat[k] *= gamma;
      phi_hat[k] *= gamma;
      if (fired && prev.nonidle[j]) {
        const double coeff = gamma_pow_[served_before];
        n_hat[k] += coeff;
        phi_hat[k] += coeff * static_cast<double>(served[k]);
      }
      if (fired) served[k] = 0;
    }
  }
}

double EstimatorState::bonus(TypeId i, ServerId j, Slot t) const {
  if (t < 1)
    throw ContractViolation("bonus undefined at slot 0 (slot 0 schedules at random)");
  return bonus_with_log(i, j, discounted_horizon_log(gamma, t));
}

double EstimatorState::pick_denominator(TypeId i, ServerId j, Slot t) const {
  if (t < 1)
    throw ContractViolation("pick undefined at slot 0 (slot 0 schedules at random)");
  return pick_denominator_with_log(i, j, discounted_horizon_log(gamma, t));
}

double EstimatorState::bonus_with_log(TypeId i, ServerId j, double horizon_log) const {
  const double n = n_hat[idx(i, j)];
  if (n <= 0.0) return std::numeric_limits<double>::infinity();
  return bonus_scale * service_bound * std::sqrt(horizon_log / n);
}

double EstimatorState::pick_denominator_with_log(TypeId i, ServerId j,
                                                 double horizon_log) const {
  const size_t k = idx(i, j);
  const double n = n_hat[k];
  if (n <= 0.0) return 1.0;
  const double mean_time = phi_hat[k] / n;
  const double lcb = mean_time - bonus_scale * service_bound * std::sqrt(horizon_log / n);
  return lcb > 1.0 ? lcb : 1.0;
}

DiscountedSums closed_form_stats(std::span<const CompletedJob> jobs, Slot t,
                                 double gamma) {
  DiscountedSums out;
  for (const CompletedJob& job : jobs) {
    if (job.start + job.service_time > t)
      throw ContractViolation("closed_form_stats: job not completed before slot t");
    const double coeff = std::pow(gamma, static_cast<double>(t - 1 - job.start));
    out.n_hat += coeff;
    out.phi_hat += coeff * job.service_time;
  }
  return out;
}

DiscountedSums closed_form_stats(std::span<const CompletedJob> jobs, Slot t,
                                 std::span<const double> power_table) {
  DiscountedSums out;
  for (const CompletedJob& job : jobs) {
    if (job.start + job.service_time > t)
      throw ContractViolation("closed_form_stats: job not completed before slot t");
    const double coeff = power_table[t - 1 - job.start];
    out.n_hat += coeff;
    out.phi_hat += coeff * job.service_time;
  }
  return out;
}

}  // namespace qsched

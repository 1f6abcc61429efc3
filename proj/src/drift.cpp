#include "qsched/drift.hpp"

#include <cmath>

namespace qsched {

double discount_memory(double gamma) {
  if (!(gamma > 0.0) || !(gamma < 1.0))
    throw ConfigError("discount_memory needs gamma in (0, 1)");
  return 4.0 / (1.0 - gamma) * std::log(1.0 / (1.0 - gamma));
}

namespace {

// Checks |va - vb| <= scale * (1/gamma)^(d-1) at the closest separation of
// every segment pair whose separation is within `window`. The bound grows
// with separation, so the closest one is binding.
bool check_exponential_bound(const Timeline<double>& tl, double gamma,
                             double scale, double window, bool* partial) {
  if (tl.horizon() - 1 < static_cast<Slot>(window)) *partial = true;
  const double inv_gamma = 1.0 / gamma;
  for (size_t a = 0; a < tl.num_segments(); ++a) {
    for (size_t b = a + 1; b < tl.num_segments(); ++b) {
      const Slot d_min = tl.segment_start(b) - (tl.segment_end(a) - 1);
      if (static_cast<double>(d_min) > window) break;  // later b only farther
      const double diff = std::abs(tl.segment_value(a) - tl.segment_value(b));
      const double bound = scale * std::pow(inv_gamma, static_cast<double>(d_min - 1));
      if (diff > bound) return false;
    }
  }
  return true;
}

}  // namespace

DriftReport validate_drift(const std::vector<Timeline<double>>& mean_times,
                           const SystemConfig& cfg, double gamma, double p,
                           double delta) {
  if (!(p > 0.0)) throw ConfigError("validate_drift needs p > 0");
  if (!(delta > 0.0)) throw ConfigError("validate_drift needs delta > 0");
  if (mean_times.size() != static_cast<size_t>(cfg.num_types) * cfg.num_servers)
    throw ContractViolation("validate_drift: need one timeline per pair");

  DriftReport rep;
  rep.gamma = gamma;
  rep.p = p;
  rep.delta = delta;
  rep.g = discount_memory(gamma);
  rep.c2 = 5.0 * (static_cast<double>(cfg.num_types) * cfg.arrival_bound + cfg.num_servers);

  const double short_window = 2.0 * rep.g;
  const double job_window = static_cast<double>(cfg.service_bound);
  const double long_window = (rep.c2 + 1.0) * rep.g / delta;
  const double job_bound = 1.0 / std::pow(rep.g, p);

  for (const Timeline<double>& tl : mean_times) {
    if (!check_exponential_bound(tl, gamma, 1.0 / rep.g, short_window, &rep.partial))
      rep.pass_short_range = false;
    if (!check_exponential_bound(tl, gamma, delta / ((rep.c2 + 1.0) * rep.g),
                                 long_window, &rep.partial))
      rep.pass_long_range = false;

    // Rate drift within one job's span: constant bound, so every segment
    // pair within the window matters equally.
    if (tl.horizon() - 1 < static_cast<Slot>(job_window)) rep.partial = true;
    for (size_t a = 0; a < tl.num_segments(); ++a) {
      for (size_t b = a + 1; b < tl.num_segments(); ++b) {
        const Slot d_min = tl.segment_start(b) - (tl.segment_end(a) - 1);
        if (static_cast<double>(d_min) > job_window) break;
        const double drift =
            std::abs(1.0 / tl.segment_value(a) - 1.0 / tl.segment_value(b));
        rep.max_job_scale_drift = std::max(rep.max_job_scale_drift, drift);
        if (drift > job_bound) rep.pass_job_scale = false;
      }
    }
  }
  return rep;
}

}  // namespace qsched

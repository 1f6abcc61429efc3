#include "qsched/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qsched {

namespace {

void check_weibull(const WeibullParams& p, int service_bound) {
  if (!(p.iota > 0.0) || !(p.iota < 1.0))
    throw ConfigError("weibull iota must lie in (0, 1), got " + std::to_string(p.iota));
  if (!(p.beta > 0.0) || !(p.beta <= 1.0))
    throw ConfigError("weibull beta must lie in (0, 1], got " + std::to_string(p.beta));
  if (service_bound < 2)
    throw ConfigError("weibull needs service_bound >= 2");
}

double survival(const WeibullParams& p, int k) {
  // iota^(k^beta)
  return std::pow(p.iota, std::pow(static_cast<double>(k), p.beta));
}

}  // namespace

double truncated_weibull_raw_pmf(const WeibullParams& p, int raw, int service_bound) {
  check_weibull(p, service_bound);
  if (raw < 0 || raw >= service_bound) return 0.0;
  const double norm = 1.0 - survival(p, service_bound);
  return (survival(p, raw) - survival(p, raw + 1)) / norm;
}

int sample_truncated_weibull(const WeibullParams& p, int service_bound, Rng& rng) {
  ServiceLawTable table(ServiceLaw{p}, service_bound);
  return table.sample(rng);
}

double exact_weibull_mean(const WeibullParams& p, int service_bound) {
  check_weibull(p, service_bound);
  double mean = 0.0;
  for (int j = 0; j < service_bound; ++j)
    mean += std::max(j, 1) * truncated_weibull_raw_pmf(p, j, service_bound);
  return mean;
}

double mean_service_time(const ServiceLaw& law, int service_bound) {
  if (const auto* w = std::get_if<WeibullParams>(&law))
    return exact_weibull_mean(*w, service_bound);
  if (const auto* t = std::get_if<TwoPointParams>(&law))
    return t->p1 * t->v1 + (1.0 - t->p1) * t->v2;
  return static_cast<double>(std::get<ConstantParams>(law).value);
}

void validate_law(const ServiceLaw& law, int service_bound) {
  if (const auto* w = std::get_if<WeibullParams>(&law)) {
    check_weibull(*w, service_bound);
    return;
  }
  if (const auto* t = std::get_if<TwoPointParams>(&law)) {
    if (t->v1 < 1 || t->v1 > service_bound || t->v2 < 1 || t->v2 > service_bound)
      throw ConfigError("two-point values must lie in [1, service_bound]");
    if (!(t->p1 >= 0.0) || !(t->p1 <= 1.0))
      throw ConfigError("two-point p1 must lie in [0, 1]");
    return;
  }
  const auto& c = std::get<ConstantParams>(law);
  if (c.value < 1 || c.value > service_bound)
    throw ConfigError("constant service time must lie in [1, service_bound]");
}

ServiceLawTable::ServiceLawTable(const ServiceLaw& law, int service_bound) {
  validate_law(law, service_bound);
  mean_ = mean_service_time(law, service_bound);
  if (const auto* c = std::get_if<ConstantParams>(&law)) {
    constant_ = c->value;
    return;
  }
  if (const auto* t = std::get_if<TwoPointParams>(&law)) {
    values_ = {t->v1, t->v2};
    cdf_ = {t->p1, 1.0};
    return;
  }
  const auto& w = std::get<WeibullParams>(law);
  values_.reserve(service_bound);
  cdf_.reserve(service_bound);
  double acc = 0.0;
  for (int j = 0; j < service_bound; ++j) {
    acc += truncated_weibull_raw_pmf(w, j, service_bound);
    values_.push_back(std::max(j, 1));
    cdf_.push_back(acc);
  }
  cdf_.back() = 1.0;
}

int ServiceLawTable::sample(Rng& rng) const {
  if (values_.empty()) return constant_;
  const double u = rng.uniform01();
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  const size_t idx = std::min<size_t>(it - cdf_.begin(), values_.size() - 1);
  return values_[idx];
}

}  // namespace qsched

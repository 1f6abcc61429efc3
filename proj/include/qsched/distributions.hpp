#ifndef QSCHED_DISTRIBUTIONS_HPP
#define QSCHED_DISTRIBUTIONS_HPP

#include <variant>
#include <vector>

#include "qsched/random.hpp"
#include "qsched/types.hpp"

namespace qsched {

/// Discrete heavy-tailed service-time law with survival function
/// P(X >= k) = iota^(k^beta), truncated to the raw support {0, ..., U_S - 1}
/// by the normalizer 1 - iota^(U_S^beta). A raw draw j maps to the service
/// time max(j, 1), so the returned values lie in [1, U_S].
struct WeibullParams {
  double iota = 0.5;  // in (0, 1)
  double beta = 0.5;  // in (0, 1]
};

/// Two-point law: value v1 with probability p1, else v2.
struct TwoPointParams {
  int v1 = 1;
  double p1 = 1.0;
  int v2 = 1;
};

struct ConstantParams {
  int value = 1;
};

using ServiceLaw = std::variant<WeibullParams, TwoPointParams, ConstantParams>;

/// Probability of raw value j (before the max(j, 1) mapping),
/// (iota^(j^beta) - iota^((j+1)^beta)) / (1 - iota^(U_S^beta)).
double truncated_weibull_raw_pmf(const WeibullParams& p, int raw, int service_bound);

/// Inverse-transform draw of a service time in [1, U_S].
int sample_truncated_weibull(const WeibullParams& p, int service_bound, Rng& rng);

/// Exact mean service time, sum_j max(j,1) * pmf(j) over the truncated
/// support. This is the oracle the sampler is tested against and the source
/// of the true service rates mu = 1/mean.
double exact_weibull_mean(const WeibullParams& p, int service_bound);

/// Mean service time of any law, exact to double precision.
double mean_service_time(const ServiceLaw& law, int service_bound);

/// Throws ConfigError unless parameters are valid and the law's support and
/// mean lie in [1, service_bound].
void validate_law(const ServiceLaw& law, int service_bound);

/// Cumulative table for repeated draws from one law. Sampling walks the
/// precomputed cdf with a single uniform variate, so a (law, seed) pair
/// always yields the same sequence.
class ServiceLawTable {
 public:
  ServiceLawTable() = default;
  ServiceLawTable(const ServiceLaw& law, int service_bound);

  int sample(Rng& rng) const;
  double mean() const { return mean_; }

 private:
  // values_[k] drawn when u < cdf_[k]; empty for the constant fast path
  std::vector<double> cdf_;
  std::vector<int> values_;
  int constant_ = 0;
  double mean_ = 0.0;
};

}  // namespace qsched

#endif  // QSCHED_DISTRIBUTIONS_HPP

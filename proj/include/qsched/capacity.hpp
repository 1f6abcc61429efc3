#ifndef QSCHED_CAPACITY_HPP
#define QSCHED_CAPACITY_HPP

#include <span>
#include <vector>

#include "qsched/types.hpp"

namespace qsched {

/// Stationary traffic-slackness problem: the largest delta such that rates
/// lambda + delta (componentwise) are supportable by some allocation alpha
/// with per-server allocation sums at most 1:
///
///   max delta  s.t.  sum_i alpha[i][j] <= 1 for all j,
///                    sum_j alpha[i][j] mu[i][j] >= lambda[i] + delta for all i,
///                    alpha >= 0.
///
/// delta_max is negative for an overloaded instance. Solved by bisection on
/// delta with a phase-1 dense simplex feasibility check per step; the
/// returned allocation is feasible at delta_max and re-verified post-solve.
struct SlacknessSolution {
  double delta_max = 0.0;
  std::vector<double> alpha;  // I x J, row-major
};

SlacknessSolution max_slackness(std::span<const double> lambda,
                                std::span<const double> mu, int num_types,
                                int num_servers);

/// Is some alpha >= 0 with column sums <= 1 able to serve lambda + delta?
bool slackness_feasible(std::span<const double> lambda, std::span<const double> mu,
                        int num_types, int num_servers, double delta,
                        std::vector<double>* alpha_out = nullptr);

/// Scale `direction` to an arrival-rate vector whose maximum slackness under
/// `mu` equals `target_delta` (within 1e-4), via bisection on the scale
/// factor. Throws ConfigError when the target exceeds the slackness at zero
/// load, which is the largest achievable.
std::vector<double> scale_to_slackness(std::span<const double> direction,
                                       std::span<const double> mu, int num_types,
                                       int num_servers, double target_delta);

}  // namespace qsched

#endif  // QSCHED_CAPACITY_HPP

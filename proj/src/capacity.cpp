#include "qsched/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qsched {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kFeasTol = 1e-10;  // phase-1 residual at a feasible point is ~1e-14

/// Phase-1 primal simplex on a dense tableau: minimizes the sum of the
/// artificial variables, starting from the identity basis in `basis`.
/// Bland's entering rule with a lowest-basis-index ratio tie-break; an
/// iteration cap guards the degenerate-cycle corner. Instances here are at
/// most tens of columns.
class Phase1Simplex {
 public:
  // A is m x n row-major, b >= 0; basis[r] is the column basic in row r
  // (artificial columns are indexed n..n+artificials-1).
  Phase1Simplex(std::vector<double> a, std::vector<double> b, int m, int n,
                std::vector<int> basis, int artificials)
      : m_(m), n_(n), total_(n + artificials), tab_(a), rhs_(std::move(b)),
        basis_(std::move(basis)) {
    // Widen the tableau with artificial identity columns.
    std::vector<double> wide(static_cast<size_t>(m_) * total_, 0.0);
    for (int r = 0; r < m_; ++r)
      for (int c = 0; c < n_; ++c) wide[idx(r, c)] = tab_[static_cast<size_t>(r) * n_ + c];
    tab_ = std::move(wide);
    int art = n_;
    for (int r = 0; r < m_; ++r)
      if (basis_[r] >= n_) tab_[idx(r, art++)] = 1.0;

    // Reduced costs for min(sum of artificials): r[c] = c[c] - sum over
    // artificial-basis rows of T[r][c].
    cost_.assign(total_, 0.0);
    for (int c = n_; c < total_; ++c) cost_[c] = 1.0;
    obj_ = 0.0;
    for (int r = 0; r < m_; ++r) {
      if (basis_[r] < n_) continue;
      for (int c = 0; c < total_; ++c) cost_[c] -= tab_[idx(r, c)];
      obj_ -= rhs_[r];
    }
  }

  // Runs to optimality; returns the phase-1 objective (0 when feasible).
  double solve() {
    for (int iter = 0; iter < 10000; ++iter) {
      int entering = -1;
      for (int c = 0; c < total_; ++c) {
        if (cost_[c] < -kPivotTol) {
          entering = c;
          break;  // Bland: lowest eligible index
        }
      }
      if (entering < 0) return -obj_;

      int leaving = -1;
      double best_ratio = 0.0;
      for (int r = 0; r < m_; ++r) {
        const double a = tab_[idx(r, entering)];
        if (a > kPivotTol) {
          const double ratio = rhs_[r] / a;
          if (leaving < 0 || ratio < best_ratio - kPivotTol ||
              (std::abs(ratio - best_ratio) <= kPivotTol &&
               basis_[r] < basis_[leaving])) {
            leaving = r;
            best_ratio = ratio;
          }
        }
      }
      if (leaving < 0)
        throw ContractViolation("phase-1 simplex unbounded; malformed instance");
      pivot(leaving, entering);
    }
    throw ContractViolation("phase-1 simplex exceeded the pivot budget");
  }

  double value(int col) const {
    for (int r = 0; r < m_; ++r)
      if (basis_[r] == col) return rhs_[r];
    return 0.0;
  }

 private:
  size_t idx(int r, int c) const { return static_cast<size_t>(r) * total_ + c; }

  void pivot(int row, int col) {
    const double piv = tab_[idx(row, col)];
    for (int c = 0; c < total_; ++c) tab_[idx(row, c)] /= piv;
    rhs_[row] /= piv;
    for (int r = 0; r < m_; ++r) {
      if (r == row) continue;
      const double f = tab_[idx(r, col)];
      if (f == 0.0) continue;
      for (int c = 0; c < total_; ++c) tab_[idx(r, c)] -= f * tab_[idx(row, c)];
      rhs_[r] -= f * rhs_[row];
      if (rhs_[r] < 0.0 && rhs_[r] > -kPivotTol) rhs_[r] = 0.0;
    }
    const double f = cost_[col];
    if (f != 0.0) {
      for (int c = 0; c < total_; ++c) cost_[c] -= f * tab_[idx(row, c)];
      obj_ -= f * rhs_[row];
    }
    basis_[row] = col;
  }

  int m_, n_, total_;
  std::vector<double> tab_;
  std::vector<double> rhs_;
  std::vector<int> basis_;
  std::vector<double> cost_;
  double obj_ = 0.0;
};

void validate_instance(std::span<const double> lambda, std::span<const double> mu,
                       int num_types, int num_servers) {
  if (num_types < 1 || num_servers < 1)
    throw ConfigError("slackness instance needs at least one type and server");
  if (lambda.size() != static_cast<size_t>(num_types))
    throw ConfigError("lambda length must equal the number of types");
  if (mu.size() != static_cast<size_t>(num_types) * num_servers)
    throw ConfigError("mu must be a num_types x num_servers matrix");
  for (double l : lambda)
    if (!(l >= 0.0)) throw ConfigError("arrival rates must be nonnegative");
  for (double m : mu)
    if (!(m > 0.0) || !(m <= 1.0))
      throw ConfigError("service rates must lie in (0, 1]");
}

}  // namespace

bool slackness_feasible(std::span<const double> lambda, std::span<const double> mu,
                        int num_types, int num_servers, double delta,
                        std::vector<double>* alpha_out) {
  validate_instance(lambda, mu, num_types, num_servers);
  const int I = num_types, J = num_servers;
  const int n_alpha = I * J;
  const int n = n_alpha + J + I;  // alpha, server slacks, demand surpluses
  const int m = J + I;

  std::vector<double> a(static_cast<size_t>(m) * n, 0.0);
  std::vector<double> b(m, 0.0);
  std::vector<int> basis(m, 0);

  for (int j = 0; j < J; ++j) {
    for (int i = 0; i < I; ++i) a[static_cast<size_t>(j) * n + i * J + j] = 1.0;
    a[static_cast<size_t>(j) * n + n_alpha + j] = 1.0;
    b[j] = 1.0;
    basis[j] = n_alpha + j;
  }
  int artificials = 0;
  for (int i = 0; i < I; ++i) {
    const int r = J + i;
    for (int j = 0; j < J; ++j)
      a[static_cast<size_t>(r) * n + i * J + j] = mu[static_cast<size_t>(i) * J + j];
    a[static_cast<size_t>(r) * n + n_alpha + J + i] = -1.0;
    // alpha >= 0 already serves any nonpositive demand
    b[r] = std::max(0.0, lambda[i] + delta);
    basis[r] = n + artificials;
    artificials += 1;
  }

  Phase1Simplex simplex(std::move(a), std::move(b), m, n, std::move(basis),
                        artificials);
  const double residual = simplex.solve();
  if (residual > kFeasTol) return false;
  if (alpha_out) {
    alpha_out->assign(n_alpha, 0.0);
    for (int k = 0; k < n_alpha; ++k) (*alpha_out)[k] = std::max(0.0, simplex.value(k));
  }
  return true;
}

SlacknessSolution max_slackness(std::span<const double> lambda,
                                std::span<const double> mu, int num_types,
                                int num_servers) {
  validate_instance(lambda, mu, num_types, num_servers);
  double max_lambda = 0.0;
  for (double l : lambda) max_lambda = std::max(max_lambda, l);

  double lo = -max_lambda - 1.0;  // alpha = 0 serves lambda + lo
  double hi = static_cast<double>(num_servers) + 1.0;

  SlacknessSolution sol;
  if (!slackness_feasible(lambda, mu, num_types, num_servers, lo, &sol.alpha))
    throw ContractViolation("slackness lower bracket infeasible");

  for (int it = 0; it < 100 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    std::vector<double> alpha;
    if (slackness_feasible(lambda, mu, num_types, num_servers, mid, &alpha)) {
      lo = mid;
      sol.alpha = std::move(alpha);
    } else {
      hi = mid;
    }
  }
  sol.delta_max = lo;

  // Post-solve check: the returned allocation satisfies both families.
  for (int j = 0; j < num_servers; ++j) {
    double col = 0.0;
    for (int i = 0; i < num_types; ++i)
      col += sol.alpha[static_cast<size_t>(i) * num_servers + j];
    if (col > 1.0 + 1e-6)
      throw ContractViolation("slackness allocation violates a server budget");
  }
  for (int i = 0; i < num_types; ++i) {
    double served = 0.0;
    for (int j = 0; j < num_servers; ++j)
      served += sol.alpha[static_cast<size_t>(i) * num_servers + j] *
                mu[static_cast<size_t>(i) * num_servers + j];
    if (served + 1e-6 < lambda[i] + sol.delta_max)
      throw ContractViolation("slackness allocation misses a demand");
  }
  return sol;
}

std::vector<double> scale_to_slackness(std::span<const double> direction,
                                       std::span<const double> mu, int num_types,
                                       int num_servers, double target_delta) {
  validate_instance(direction, mu, num_types, num_servers);
  bool any_positive = false;
  for (double d : direction) any_positive = any_positive || d > 0.0;
  if (!any_positive)
    throw ConfigError("scale_to_slackness needs a direction with a positive entry");

  auto delta_at = [&](double c) {
    std::vector<double> lam(direction.size());
    for (size_t k = 0; k < direction.size(); ++k) lam[k] = c * direction[k];
    return max_slackness(lam, mu, num_types, num_servers).delta_max;
  };

  const double delta0 = delta_at(0.0);
  if (target_delta > delta0 + 1e-9)
    throw ConfigError("target slackness " + std::to_string(target_delta) +
                      " unreachable; zero load attains only " + std::to_string(delta0));

  double lo = 0.0;
  double hi = 1.0;
  int guard = 0;
  while (delta_at(hi) > target_delta) {
    lo = hi;
    hi *= 2.0;
    if (++guard > 60)
      throw ContractViolation("scale_to_slackness bracket search failed");
  }
  for (int it = 0; it < 80 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (delta_at(mid) > target_delta)
      lo = mid;
    else
      hi = mid;
  }

  const double c = 0.5 * (lo + hi);
  std::vector<double> lam(direction.size());
  for (size_t k = 0; k < direction.size(); ++k) lam[k] = c * direction[k];
  const double achieved = max_slackness(lam, mu, num_types, num_servers).delta_max;
  if (std::abs(achieved - target_delta) > 1e-4)
    throw ContractViolation("scale_to_slackness missed the target: " +
                            std::to_string(achieved) + " vs " +
                            std::to_string(target_delta));
  return lam;
}

}  // namespace qsched

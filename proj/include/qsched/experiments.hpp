#ifndef QSCHED_EXPERIMENTS_HPP
#define QSCHED_EXPERIMENTS_HPP

#include <span>
#include <string>
#include <vector>

#include "qsched/policies.hpp"
#include "qsched/sources.hpp"
#include "qsched/types.hpp"

namespace qsched {

/// A complete, seeded experiment description. Everything a run needs is a
/// value here; runs never share mutable state, so they parallelize freely.
struct ExperimentPlan {
  SystemConfig system;
  ArrivalSpecSet arrivals;
  ServiceSpecSet services;
  int num_runs = 1;
  uint64_t root_seed = 0;
  Slot sample_stride = 10;          // record one point every 10 slots
  std::vector<Slot> tail_slots;     // slots at which ||Q||_2 is recorded
  TieBreak tie_break = TieBreak::kLowestIndex;

  void validate() const;
};

/// One run's recorded trajectory. The total queue length is sampled on the
/// grid {0, stride, 2*stride, ...} up to and including the horizon.
struct RunResult {
  std::vector<Slot> record_slots;
  std::vector<double> total_queue;
  std::vector<double> tail_norms;        // ||Q(t)||_2 per plan.tail_slots entry
  double time_avg_total_queue = 0.0;     // (1/T) sum_{tau=1..T} sum_i Q_i(tau)
  int64_t invariant_violations = 0;
  std::string first_violation;
};

struct RunOptions {
  bool check_invariants = false;
  /// When set, receives J entries per slot (kNoType for busy servers),
  /// slots 0..horizon-1 in order.
  std::vector<TypeId>* pick_log = nullptr;
};

/// Simulate one seeded run of one policy. Deterministic in
/// (plan, policy, run_index): slot by slot, the policy observes the previous
/// slot's events, picks for the available servers (slot 0 picks uniformly at
/// random), and the system advances.
RunResult run_simulation(const ExperimentPlan& plan, const PolicySpec& policy,
                         int run_index, const RunOptions& options = {});

/// Worker-thread cap: QSCHED_THREADS when set (minimum 1), else the hardware
/// concurrency.
int worker_threads();

/// Run `plan.num_runs` seeded runs, fanning out across at most `threads`
/// workers (<= 0 means worker_threads()). Results are indexed by run, so the
/// output is identical for every thread count.
std::vector<RunResult> run_many(const ExperimentPlan& plan, const PolicySpec& policy,
                                const RunOptions& options = {}, int threads = 0);

/// Cross-run aggregate: pointwise means with normal-approximation 95%
/// confidence half-widths 1.96 * s / sqrt(R), the mean per-run time-averaged
/// total queue, and the raw tail samples. Runs are folded in ascending run
/// order regardless of completion order.
struct RunAggregate {
  std::vector<Slot> slots;
  std::vector<double> mean_total_queue;
  std::vector<double> ci_half_width;
  double mean_time_avg_queue = 0.0;
  std::vector<std::vector<double>> tail_norms;  // [tail slot][run]
  int64_t invariant_violations = 0;
};

RunAggregate aggregate_runs(std::span<const RunResult> runs);

/// Ordinary least-squares slope of y against x (jobs per slot when x is in
/// slots). Needs at least two distinct x values.
double least_squares_slope(std::span<const Slot> x, std::span<const double> y);

/// Slope of a recorded series restricted to slots in [from, to].
double window_slope(std::span<const Slot> slots, std::span<const double> values,
                    Slot from, Slot to);

/// Mean of a recorded series over slots in [from, to].
double window_mean(std::span<const Slot> slots, std::span<const double> values,
                   Slot from, Slot to);

// ---------------------------------------------------------------------------
// Tail estimation

struct TailFit {
  bool available = false;
  double slope = 0.0;      // of log-survival against the threshold
  double intercept = 0.0;
  double r2 = 0.0;
  int points = 0;
};

struct TailEstimate {
  std::vector<double> thresholds;
  std::vector<double> survival;    // P(sample >= x), empirical
  TailFit fit;
};

/// Empirical survival of `samples` at each threshold plus a weighted
/// least-squares line through (x, log survival), using only thresholds with
/// at least `min_exceedances` exceedances and weighting each point by its
/// exceedance count. The fit is marked unavailable with fewer than two
/// usable points or no spread in x.
TailEstimate tail_estimate(std::span<const double> samples,
                           std::span<const double> thresholds,
                           int min_exceedances = 5);

/// Evenly spaced quantile levels between the 50th and 99th percentiles of
/// the samples, deduplicated; the default fitting grid.
std::vector<double> default_tail_thresholds(std::span<const double> samples,
                                            int count = 12);

// ---------------------------------------------------------------------------
// Instability counterexample

/// The 2x2 instance on which plain empirical-mean MaxWeight locks into cross
/// scheduling: own-type service is 1 slot with probability 0.99 and 100
/// slots otherwise, cross-type service is a constant 10 slots, and one job
/// arrives at every queue on every odd slot. With `force_bad_event` the
/// first two own-pair draws are scripted to 100, which reproduces the
/// lock-in deterministically.
ExperimentPlan counterexample_plan(Slot horizon, bool force_bad_event, uint64_t seed);

struct CounterexampleResult {
  double slope = 0.0;  // total-queue growth, jobs per slot, over the fit window
  Slot fit_from = 0;
  Slot fit_to = 0;
  RunResult run;
};

/// Run the counterexample instance under empirical-mean MaxWeight (default
/// rate 1) and fit the total-queue slope over the last half of the horizon.
CounterexampleResult run_counterexample(Slot horizon, bool force_bad_event,
                                        uint64_t seed);

/// Same instance under any policy; used to contrast with the oracle.
CounterexampleResult run_counterexample_with(Slot horizon, bool force_bad_event,
                                             uint64_t seed, const PolicySpec& policy);

}  // namespace qsched

#endif  // QSCHED_EXPERIMENTS_HPP

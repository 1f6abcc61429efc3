#ifndef QSCHED_CLI_HPP
#define QSCHED_CLI_HPP

#include <optional>
#include <string>
#include <vector>

#include "qsched/types.hpp"

namespace qsched::cli {

/// Locale-independent CSV number formatting: '.' decimal separator, no
/// grouping, "%.10g". Identical doubles always render identically.
std::string format_number(double v);

struct RunFileOpts {
  std::string config_path;
  std::optional<uint64_t> seed;  // overrides the config's seed
  std::optional<int> runs;       // overrides the config's run count
  std::string out_dir = ".";
  int threads = 0;  // 0 = QSCHED_THREADS or hardware concurrency
};

/// Simulate one policy from the config and write
/// `<out>/timeseries_<policy>.csv` with header t,mean_total_q,ci_lo,ci_hi.
/// Returns the path written.
std::string cmd_run(const RunFileOpts& opts, const std::string& policy_name);

/// Simulate two or more policies on common random numbers; writes one
/// timeseries CSV per policy plus `<out>/summary.csv` with header
/// policy,time_avg_q,final_mean_q,stable (stable is the 0/1 outcome of the
/// last-half slope surrogate |slope| < 1e-3 jobs/slot). Returns the paths.
std::vector<std::string> cmd_compare(const RunFileOpts& opts,
                                     const std::vector<std::string>& policy_names);

/// Queue-norm tail at a recorded slot: writes `<out>/tail_<policy>.csv` with
/// header x,survival,log_survival and prints the fitted log-survival slope.
/// The slot must be listed in the config's tail_slots.
std::string cmd_tail(const RunFileOpts& opts, const std::string& policy_name, Slot t,
                     const std::vector<double>& thresholds);

/// Maximum traffic slackness of an explicit (lambda, mu) instance; prints
/// delta_max to six decimals and the allocation. With `out_csv` nonempty
/// also writes type,server,alpha rows.
void cmd_slackness(const std::vector<double>& lambda,
                   const std::vector<std::vector<double>>& mu,
                   const std::string& out_csv);

/// The empirical-mean instability instance. Prints the total-queue growth
/// slope and writes `<out>/counterexample_<policy>.csv` (t,total_q).
/// `policy_name` is "empirical_mean" or "oracle".
std::string cmd_counterexample(Slot horizon, bool forced, uint64_t seed,
                               const std::string& policy_name,
                               const std::string& out_dir);

}  // namespace qsched::cli

#endif  // QSCHED_CLI_HPP

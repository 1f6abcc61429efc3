#include "qsched/cli.hpp"

#include <charconv>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "qsched/capacity.hpp"
#include "qsched/config.hpp"
#include "qsched/experiments.hpp"

namespace qsched::cli {

namespace {

constexpr double kStableSlopeTol = 1e-3;  // jobs per slot

void write_file(const std::string& path, const std::string& content) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write file: " + path);
  out << content;
  if (!out) throw ConfigError("write failed: " + path);
}

struct LoadedRun {
  ParsedConfig config;
  RunAggregate aggregate;
};

LoadedRun run_policy(const RunFileOpts& opts, const std::string& policy_name) {
  LoadedRun out{load_config_file(opts.config_path), {}};
  if (opts.seed) out.config.plan.root_seed = *opts.seed;
  if (opts.runs) out.config.plan.num_runs = *opts.runs;
  const PolicySpec& policy = find_policy(out.config, policy_name);
  const std::vector<RunResult> runs =
      run_many(out.config.plan, policy, RunOptions{}, opts.threads);
  out.aggregate = aggregate_runs(runs);
  return out;
}

std::string timeseries_csv(const RunAggregate& agg) {
  std::string csv = "t,mean_total_q,ci_lo,ci_hi\n";
  for (size_t k = 0; k < agg.slots.size(); ++k) {
    const double mean = agg.mean_total_queue[k];
    const double half = agg.ci_half_width[k];
    csv += std::to_string(agg.slots[k]);
    csv += ',';
    csv += format_number(mean);
    csv += ',';
    csv += format_number(mean - half);
    csv += ',';
    csv += format_number(mean + half);
    csv += '\n';
  }
  return csv;
}

bool stable_by_slope(const RunAggregate& agg, Slot horizon) {
  const double slope =
      window_slope(agg.slots, agg.mean_total_queue, horizon / 2, horizon);
  return std::abs(slope) < kStableSlopeTol;
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

}  // namespace

std::string format_number(double v) {
  // std::to_chars is locale-independent by definition, so output bytes do
  // not depend on the host's LC_NUMERIC.
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v,
                                 std::chars_format::general, 10);
  return std::string(buf, res.ptr);
}

std::string cmd_run(const RunFileOpts& opts, const std::string& policy_name) {
  const LoadedRun result = run_policy(opts, policy_name);
  const std::string path = join_path(opts.out_dir, "timeseries_" + policy_name + ".csv");
  write_file(path, timeseries_csv(result.aggregate));
  return path;
}

std::vector<std::string> cmd_compare(const RunFileOpts& opts,
                                     const std::vector<std::string>& policy_names) {
  if (policy_names.size() < 2)
    throw ConfigError("compare needs at least two policies");

  std::vector<std::string> paths;
  std::string summary = "policy,time_avg_q,final_mean_q,stable\n";
  for (const std::string& name : policy_names) {
    const LoadedRun result = run_policy(opts, name);
    const std::string path = join_path(opts.out_dir, "timeseries_" + name + ".csv");
    write_file(path, timeseries_csv(result.aggregate));
    paths.push_back(path);

    const RunAggregate& agg = result.aggregate;
    summary += name;
    summary += ',';
    summary += format_number(agg.mean_time_avg_queue);
    summary += ',';
    summary += format_number(agg.mean_total_queue.back());
    summary += ',';
    summary += stable_by_slope(agg, result.config.plan.system.horizon) ? '1' : '0';
    summary += '\n';
  }
  const std::string summary_path = join_path(opts.out_dir, "summary.csv");
  write_file(summary_path, summary);
  paths.push_back(summary_path);
  return paths;
}

std::string cmd_tail(const RunFileOpts& opts, const std::string& policy_name, Slot t,
                     const std::vector<double>& thresholds) {
  const LoadedRun result = run_policy(opts, policy_name);
  const ExperimentPlan& plan = result.config.plan;

  size_t slot_index = plan.tail_slots.size();
  for (size_t k = 0; k < plan.tail_slots.size(); ++k)
    if (plan.tail_slots[k] == t) slot_index = k;
  if (slot_index == plan.tail_slots.size())
    throw ConfigError("slot " + std::to_string(t) +
                      " is not recorded; add it to experiment.tail_slots");

  const std::vector<double>& samples = result.aggregate.tail_norms[slot_index];
  const std::vector<double> xs =
      thresholds.empty() ? default_tail_thresholds(samples) : thresholds;
  const TailEstimate est = tail_estimate(samples, xs);

  std::string csv = "x,survival,log_survival\n";
  for (size_t k = 0; k < est.thresholds.size(); ++k) {
    csv += format_number(est.thresholds[k]);
    csv += ',';
    csv += format_number(est.survival[k]);
    csv += ',';
    csv += format_number(std::log(est.survival[k]));
    csv += '\n';
  }
  const std::string path = join_path(opts.out_dir, "tail_" + policy_name + ".csv");
  write_file(path, csv);

  if (est.fit.available)
    std::printf("tail fit: slope %s per unit, r2 %s, points %d\n",
                format_number(est.fit.slope).c_str(), format_number(est.fit.r2).c_str(),
                est.fit.points);
  else
    std::printf("tail fit: unavailable (too few exceedances)\n");
  return path;
}

void cmd_slackness(const std::vector<double>& lambda,
                   const std::vector<std::vector<double>>& mu,
                   const std::string& out_csv) {
  const int I = static_cast<int>(lambda.size());
  if (mu.size() != lambda.size())
    throw ConfigError("mu must have one row per lambda entry");
  const int J = mu.empty() ? 0 : static_cast<int>(mu.front().size());
  std::vector<double> flat;
  for (const auto& row : mu) {
    if (static_cast<int>(row.size()) != J)
      throw ConfigError("mu rows must all have the same length");
    flat.insert(flat.end(), row.begin(), row.end());
  }

  const SlacknessSolution sol = max_slackness(lambda, flat, I, J);
  std::printf("delta_max %.6f\n", sol.delta_max);
  for (int i = 0; i < I; ++i) {
    std::printf("alpha[%d]", i);
    for (int j = 0; j < J; ++j)
      std::printf(" %.6f", sol.alpha[static_cast<size_t>(i) * J + j]);
    std::printf("\n");
  }

  if (!out_csv.empty()) {
    std::string csv = "type,server,alpha\n";
    for (int i = 0; i < I; ++i)
      for (int j = 0; j < J; ++j) {
        csv += std::to_string(i);
        csv += ',';
        csv += std::to_string(j);
        csv += ',';
        csv += format_number(sol.alpha[static_cast<size_t>(i) * J + j]);
        csv += '\n';
      }
    write_file(out_csv, csv);
  }
}

std::string cmd_counterexample(Slot horizon, bool forced, uint64_t seed,
                               const std::string& policy_name,
                               const std::string& out_dir) {
  PolicySpec policy;
  if (policy_name == "empirical_mean")
    policy = PolicySpec::of(EmpiricalMeanParams{1.0});
  else if (policy_name == "oracle")
    policy = PolicySpec::of(OracleParams{});
  else
    throw ConfigError("counterexample policy must be empirical_mean or oracle");

  const CounterexampleResult result =
      run_counterexample_with(horizon, forced, seed, policy);
  std::printf("growth slope %s jobs/slot over slots [%" PRId64 ", %" PRId64 "]\n",
              format_number(result.slope).c_str(), result.fit_from, result.fit_to);

  std::string csv = "t,total_q\n";
  for (size_t k = 0; k < result.run.record_slots.size(); ++k) {
    csv += std::to_string(result.run.record_slots[k]);
    csv += ',';
    csv += format_number(result.run.total_queue[k]);
    csv += '\n';
  }
  const std::string path =
      join_path(out_dir, "counterexample_" + policy_name + ".csv");
  write_file(path, csv);
  return path;
}

}  // namespace qsched::cli

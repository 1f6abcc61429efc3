// Command-line front end for the multi-server scheduling simulator.
//
// Exit codes: 0 success, 2 invalid configuration or flags, 3 runtime
// contract violation. QSCHED_THREADS caps worker parallelism.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qsched/cli.hpp"
#include "qsched/types.hpp"

namespace {

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t next = text.find(',', pos);
    if (next == std::string::npos) next = text.size();
    out.push_back(std::stod(text.substr(pos, next - pos)));
    pos = next + 1;
  }
  return out;
}

std::vector<std::vector<double>> parse_matrix(const std::string& text) {
  std::vector<std::vector<double>> rows;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t next = text.find(';', pos);
    if (next == std::string::npos) next = text.size();
    rows.push_back(parse_number_list(text.substr(pos, next - pos)));
    pos = next + 1;
  }
  return rows;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-server queueing simulator and scheduling-policy runner"};
  app.require_subcommand(1);

  qsched::cli::RunFileOpts opts;
  std::string policy;
  std::vector<std::string> policies;
  int64_t tail_slot = 0;
  std::string xs_text;
  int64_t horizon = 20000;
  bool forced = false;
  uint64_t ce_seed = 0;
  std::string slackness_lambda;
  std::string slackness_mu;
  std::string slackness_out;
  uint64_t seed_value = 0;
  int runs_value = 0;

  auto add_common = [&](CLI::App* cmd, bool needs_policy) {
    cmd->add_option("--config", opts.config_path, "experiment config file")->required();
    auto* seed_opt = cmd->add_option("--seed", seed_value, "override the root seed");
    auto* runs_opt = cmd->add_option("--runs", runs_value, "override the run count");
    cmd->add_option("--out", opts.out_dir, "output directory");
    if (needs_policy)
      cmd->add_option("--policy", policy, "policy name from the config")->required();
    cmd->callback([&, seed_opt, runs_opt]() {
      if (seed_opt->count()) opts.seed = seed_value;
      if (runs_opt->count()) opts.runs = runs_value;
    });
  };

  CLI::App* run_cmd = app.add_subcommand("run", "simulate one policy, write a time series");
  add_common(run_cmd, true);

  CLI::App* compare_cmd =
      app.add_subcommand("compare", "simulate several policies on common randomness");
  add_common(compare_cmd, false);
  compare_cmd->add_option("--policies", policies, "comma-separated policy names")
      ->required()
      ->delimiter(',');

  CLI::App* tail_cmd = app.add_subcommand("tail", "queue-norm tail at a recorded slot");
  add_common(tail_cmd, true);
  tail_cmd->add_option("--t", tail_slot, "slot (must appear in tail_slots)")->required();
  tail_cmd->add_option("--xs", xs_text, "comma-separated thresholds (default: quantile grid)");

  CLI::App* slack_cmd =
      app.add_subcommand("slackness", "maximum traffic slackness of (lambda, mu)");
  slack_cmd->add_option("--lambda", slackness_lambda, "arrival rates, e.g. 0.2,0.3")
      ->required();
  slack_cmd
      ->add_option("--mu", slackness_mu, "service rates, rows ';'-separated, e.g. 0.5,0.6;0.7,0.8")
      ->required();
  slack_cmd->add_option("--out", slackness_out, "optional allocation CSV path");

  CLI::App* ce_cmd = app.add_subcommand(
      "counterexample", "empirical-mean instability instance (2 types, 2 servers)");
  ce_cmd->add_option("--horizon", horizon, "slots to simulate (>= 10000)");
  ce_cmd->add_option("--forced", forced, "script the bad early draws");
  ce_cmd->add_option("--seed", ce_seed, "run seed");
  ce_cmd->add_option("--policy", policy, "empirical_mean (default) or oracle");
  ce_cmd->add_option("--out", opts.out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (run_cmd->parsed()) {
      const std::string path = qsched::cli::cmd_run(opts, policy);
      std::printf("wrote %s\n", path.c_str());
    } else if (compare_cmd->parsed()) {
      for (const std::string& path : qsched::cli::cmd_compare(opts, policies))
        std::printf("wrote %s\n", path.c_str());
    } else if (tail_cmd->parsed()) {
      const std::vector<double> xs =
          xs_text.empty() ? std::vector<double>{} : parse_number_list(xs_text);
      const std::string path = qsched::cli::cmd_tail(opts, policy, tail_slot, xs);
      std::printf("wrote %s\n", path.c_str());
    } else if (slack_cmd->parsed()) {
      qsched::cli::cmd_slackness(parse_number_list(slackness_lambda),
                                 parse_matrix(slackness_mu), slackness_out);
    } else if (ce_cmd->parsed()) {
      if (policy.empty()) policy = "empirical_mean";
      const std::string path =
          qsched::cli::cmd_counterexample(horizon, forced, ce_seed, policy, opts.out_dir);
      std::printf("wrote %s\n", path.c_str());
    }
  } catch (const qsched::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "qsched/cli.hpp"
#include "qsched/config.hpp"
#include "qsched/experiments.hpp"
#include "qsched/sources.hpp"

using namespace qsched;

namespace {

const char* kValidConfig = R"({
  "schema_version": 1,
  "system": {"num_types": 2, "num_servers": 2, "arrival_bound": 1,
             "service_bound": 50, "horizon": 200},
  "arrivals": {"kind": "bernoulli", "rates": [0.1, 0.2]},
  "services": {"kind": "weibull", "beta": 0.5, "iota": [[0.5, 0.7], [0.8, 0.4]]},
  "policies": {
    "ducb": {"kind": "discounted_ucb", "gamma": 0.99, "c1": 0.1},
    "base": {"kind": "oracle"}
  },
  "experiment": {"runs": 2, "seed": 11, "sample_stride": 10, "tail_slots": [100]}
})";

std::string with_replacement(std::string text, const std::string& from,
                             const std::string& to) {
  const size_t pos = text.find(from);
  REQUIRE(pos != std::string::npos);
  return text.replace(pos, from.size(), to);
}

std::filesystem::path temp_dir(const std::string& leaf) {
  const auto dir = std::filesystem::temp_directory_path() / leaf;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int count_lines(const std::string& text) {
  int n = 0;
  for (char c : text)
    if (c == '\n') n += 1;
  return n;
}

}  // namespace

TEST_CASE("a valid config parses into a runnable plan") {
  const ParsedConfig cfg = parse_config(kValidConfig);
  CHECK(cfg.plan.system.num_types == 2);
  CHECK(cfg.plan.system.horizon == 200);
  CHECK(cfg.plan.num_runs == 2);
  CHECK(cfg.plan.root_seed == 11);
  CHECK(cfg.plan.sample_stride == 10);
  REQUIRE(cfg.plan.tail_slots.size() == 1);
  CHECK(cfg.plan.tail_slots[0] == 100);
  REQUIRE(cfg.policies.size() == 2);
  CHECK(cfg.policies[0].name == "ducb");  // file order preserved
  CHECK(cfg.policies[1].name == "base");
  CHECK(find_policy(cfg, "base").name == "base");
  CHECK_THROWS_AS(find_policy(cfg, "missing"), ConfigError);
  // true rates derived from the weibull means
  CHECK(cfg.plan.services.mu_at(0, 0, 0) > 0.0);
  CHECK(cfg.plan.services.mu_at(0, 0, 0) <= 1.0);
}

TEST_CASE("unknown keys are rejected wherever they appear") {
  CHECK_THROWS_WITH_AS(parse_config(with_replacement(
                           kValidConfig, "\"schema_version\": 1",
                           "\"schema_version\": 1, \"extra\": 0")),
                       doctest::Contains("unknown key"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config(with_replacement(
                           kValidConfig, "\"num_types\": 2",
                           "\"num_types\": 2, \"typo\": 3")),
                       doctest::Contains("/system"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config(with_replacement(
                           kValidConfig, "\"kind\": \"oracle\"",
                           "\"kind\": \"oracle\", \"gamma\": 1")),
                       doctest::Contains("/policies/base"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config(with_replacement(
                           kValidConfig, "\"runs\": 2",
                           "\"runs\": 2, \"walltime\": 5")),
                       doctest::Contains("/experiment"), ConfigError);
}

TEST_CASE("invalid values carry their json path") {
  CHECK_THROWS_WITH_AS(parse_config(with_replacement(kValidConfig,
                                                     "\"schema_version\": 1",
                                                     "\"schema_version\": 7")),
                       doctest::Contains("/schema_version"), ConfigError);
  CHECK_THROWS_WITH_AS(
      parse_config(with_replacement(kValidConfig, "[0.1, 0.2]", "[0.1, 1.7]")),
      doctest::Contains("/arrivals"), ConfigError);
  CHECK_THROWS_WITH_AS(
      parse_config(with_replacement(kValidConfig, "\"horizon\": 200", "\"horizon\": 0")),
      doctest::Contains("/system"), ConfigError);
  CHECK_THROWS_WITH_AS(
      parse_config(with_replacement(kValidConfig, "0.8, 0.4", "0.8, 1.4")),
      doctest::Contains("/services"), ConfigError);
  CHECK_THROWS_AS(parse_config("{ not json"), ConfigError);
  // wrong value types also surface as config errors, not raw json exceptions
  CHECK_THROWS_AS(parse_config(with_replacement(kValidConfig, "\"kind\": \"bernoulli\"",
                                                "\"kind\": 7")),
                  ConfigError);
  CHECK_THROWS_AS(
      parse_config(with_replacement(kValidConfig, "\"num_types\": 2", "\"num_types\": \"two\"")),
      ConfigError);
}

TEST_CASE("service timelines parse with ascending segments") {
  const std::string timeline_config = with_replacement(
      kValidConfig, "\"iota\": [[0.5, 0.7], [0.8, 0.4]]",
      "\"timeline\": [{\"from\": 0, \"iota\": 0.5}, {\"from\": 100, \"iota\": 0.7}]");
  const ParsedConfig cfg = parse_config(timeline_config);
  CHECK(cfg.plan.services.mean_time_at(0, 0, 99) ==
        doctest::Approx(cfg.plan.services.mean_time_at(1, 1, 0)));
  CHECK(cfg.plan.services.mean_time_at(0, 0, 100) !=
        doctest::Approx(cfg.plan.services.mean_time_at(0, 0, 99)));

  const std::string bad = with_replacement(
      kValidConfig, "\"iota\": [[0.5, 0.7], [0.8, 0.4]]",
      "\"timeline\": [{\"from\": 0, \"iota\": 0.5}, {\"from\": 500, \"iota\": 0.7}]");
  CHECK_THROWS_AS(parse_config(bad), ConfigError);
}

TEST_CASE("cmd_run writes the documented time series") {
  const auto dir = temp_dir("qsched_cli_run");
  const auto config_path = dir / "exp.json";
  std::ofstream(config_path) << kValidConfig;

  cli::RunFileOpts opts;
  opts.config_path = config_path.string();
  opts.out_dir = dir.string();
  const std::string path = cli::cmd_run(opts, "ducb");
  const std::string csv = slurp(path);
  CHECK(csv.rfind("t,mean_total_q,ci_lo,ci_hi\n", 0) == 0);
  CHECK(count_lines(csv) == 1 + 21);  // header + slots 0,10,...,200
}

TEST_CASE("cmd_run with zero arrivals reports zero queues") {
  const auto dir = temp_dir("qsched_cli_zero");
  const auto config_path = dir / "exp.json";
  std::ofstream(config_path) << with_replacement(kValidConfig, "[0.1, 0.2]", "0.0");

  cli::RunFileOpts opts;
  opts.config_path = config_path.string();
  opts.out_dir = dir.string();
  const std::string csv = slurp(cli::cmd_run(opts, "ducb"));
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);  // header
  while (std::getline(lines, line))
    CHECK(line.find(",0,0,0") != std::string::npos);
}

TEST_CASE("cmd_compare needs two policies and writes a summary") {
  const auto dir = temp_dir("qsched_cli_cmp");
  const auto config_path = dir / "exp.json";
  std::ofstream(config_path) << kValidConfig;

  cli::RunFileOpts opts;
  opts.config_path = config_path.string();
  opts.out_dir = dir.string();
  CHECK_THROWS_AS(cli::cmd_compare(opts, {"ducb"}), ConfigError);

  const auto paths = cli::cmd_compare(opts, {"ducb", "base"});
  REQUIRE(paths.size() == 3);
  const std::string summary = slurp(paths.back());
  CHECK(summary.rfind("policy,time_avg_q,final_mean_q,stable\n", 0) == 0);
  CHECK(count_lines(summary) == 3);
  CHECK(summary.find("ducb,") != std::string::npos);
  CHECK(summary.find("base,") != std::string::npos);
}

TEST_CASE("cmd_tail requires a recorded slot") {
  const auto dir = temp_dir("qsched_cli_tail");
  const auto config_path = dir / "exp.json";
  std::ofstream(config_path) << kValidConfig;

  cli::RunFileOpts opts;
  opts.config_path = config_path.string();
  opts.out_dir = dir.string();
  CHECK_THROWS_AS(cli::cmd_tail(opts, "ducb", 57, {}), ConfigError);
  const std::string csv = slurp(cli::cmd_tail(opts, "ducb", 100, {1.0, 2.0, 4.0}));
  CHECK(csv.rfind("x,survival,log_survival\n", 0) == 0);
  CHECK(count_lines(csv) == 4);
}

TEST_CASE("number formatting is plain and locale-free") {
  CHECK(cli::format_number(0.5) == "0.5");
  CHECK(cli::format_number(1.96) == "1.96");
  CHECK(cli::format_number(-3.0) == "-3");
  CHECK(cli::format_number(12345.678) == "12345.678");
}

TEST_CASE("arrival timelines, patterns and scripts parse from json") {
  const std::string timeline_arrivals = with_replacement(
      kValidConfig, "\"kind\": \"bernoulli\", \"rates\": [0.1, 0.2]",
      "\"kind\": \"bernoulli\", \"timeline\": ["
      "{\"from\": 0, \"rates\": 0.1}, {\"from\": 50, \"rates\": [0.3, 0.4]}]");
  const ParsedConfig cfg = parse_config(timeline_arrivals);
  ArrivalSource src(cfg.plan.arrivals, 1);
  // rates changed at slot 50; draw through it without errors
  std::vector<int64_t> a;
  for (Slot t = 0; t < 60; ++t) {
    src.draw(t, a);
    CHECK(a[0] >= 0);
    CHECK(a[0] <= 1);
  }

  const std::string pattern_arrivals =
      with_replacement(kValidConfig, "\"kind\": \"bernoulli\", \"rates\": [0.1, 0.2]",
                       "\"kind\": \"pattern\", \"pattern\": [0, 1]");
  const ParsedConfig pattern_cfg = parse_config(pattern_arrivals);
  ArrivalSource pat(pattern_cfg.plan.arrivals, 1);
  pat.draw(0, a);
  CHECK(a == std::vector<int64_t>{0, 0});
  pat.draw(1, a);
  CHECK(a == std::vector<int64_t>{1, 1});

  const std::string scripted_arrivals =
      with_replacement(kValidConfig, "\"kind\": \"bernoulli\", \"rates\": [0.1, 0.2]",
                       "\"kind\": \"scripted\", \"values\": [[1, 0], [0, 1]]");
  const ParsedConfig scripted_cfg = parse_config(scripted_arrivals);
  ArrivalSource scr(scripted_cfg.plan.arrivals, 1);
  scr.draw(0, a);
  CHECK(a == std::vector<int64_t>{1, 0});
  scr.draw(1, a);
  CHECK(a == std::vector<int64_t>{0, 1});
  CHECK_THROWS_AS(scr.draw(2, a), ConfigError);
}

TEST_CASE("two-point and constant service kinds parse from json") {
  const std::string two_point = with_replacement(
      kValidConfig, "\"kind\": \"weibull\", \"beta\": 0.5, \"iota\": [[0.5, 0.7], [0.8, 0.4]]",
      "\"kind\": \"two_point\", \"v1\": 1, \"p1\": 0.99, \"v2\": 50");
  const ParsedConfig tp = parse_config(two_point);
  CHECK(tp.plan.services.mean_time_at(0, 0, 0) == doctest::Approx(1.49));

  const std::string constant = with_replacement(
      kValidConfig, "\"kind\": \"weibull\", \"beta\": 0.5, \"iota\": [[0.5, 0.7], [0.8, 0.4]]",
      "\"kind\": \"constant\", \"times\": [[2, 3], [4, 5]]");
  const ParsedConfig ct = parse_config(constant);
  CHECK(ct.plan.services.mu_at(1, 0, 0) == doctest::Approx(0.25));

  // all seven policy kinds parse
  const std::string all_kinds = with_replacement(
      kValidConfig,
      "\"ducb\": {\"kind\": \"discounted_ucb\", \"gamma\": 0.99, \"c1\": 0.1},\n    "
      "\"base\": {\"kind\": \"oracle\"}",
      "\"a\": {\"kind\": \"discounted_ucb\", \"gamma\": 0.99, \"c1\": 0.1},\n    "
      "\"b\": {\"kind\": \"ucb\", \"c1\": 2},\n    "
      "\"c\": {\"kind\": \"oracle\"},\n    "
      "\"d\": {\"kind\": \"empirical_mean\", \"default_rate\": 1.0},\n    "
      "\"e\": {\"kind\": \"frame_maxweight\", \"frame\": 100, \"c1\": 2},\n    "
      "\"f\": {\"kind\": \"dam_ucb\", \"epoch\": 5, \"c1\": 2},\n    "
      "\"g\": {\"kind\": \"random\"}");
  CHECK(parse_config(all_kinds).policies.size() == 7);
}

TEST_CASE("slackness command writes the allocation csv") {
  const auto dir = temp_dir("qsched_cli_slack");
  const std::string out = (dir / "alpha.csv").string();
  cli::cmd_slackness({0.2}, {{0.5}}, out);
  const std::string csv = slurp(out);
  CHECK(csv == "type,server,alpha\n0,0,1\n");
}

TEST_CASE("full-scale config produces the documented row count") {
  ParsedConfig cfg = load_config_file(std::string(QSCHED_SOURCE_DIR) +
                                      "/configs/stationary_10x10.json");
  CHECK(cfg.plan.system.horizon == 300000);
  CHECK(cfg.plan.sample_stride == 10);
  cfg.plan.num_runs = 1;
  const RunResult run =
      run_simulation(cfg.plan, find_policy(cfg, "discounted_ucb"), 0);
  CHECK(run.record_slots.size() == 30001);
}

TEST_CASE("shipped experiment files parse and run") {
  for (const char* name : {"stationary_4x4.json", "nonstationary_4x4.json",
                           "stationary_10x10.json", "nonstationary_10x10.json"}) {
    ParsedConfig cfg = load_config_file(std::string(QSCHED_SOURCE_DIR) +
                                        "/configs/" + name);
    CHECK(cfg.policies.size() == 5);
    CHECK(find_policy(cfg, "discounted_ucb").name == "discounted_ucb");
  }

  // Short replay of the full-scale instance: queues stay bounded and every
  // transition passes the invariant checker.
  ParsedConfig cfg = load_config_file(std::string(QSCHED_SOURCE_DIR) +
                                      "/configs/stationary_10x10.json");
  cfg.plan.system.horizon = 20000;  // the timelines cover more than we use
  cfg.plan.num_runs = 2;
  cfg.plan.tail_slots.clear();
  RunOptions opt;
  opt.check_invariants = true;
  const auto runs = run_many(cfg.plan, find_policy(cfg, "discounted_ucb"), opt);
  for (const RunResult& r : runs) {
    CHECK(r.invariant_violations == 0);
    CHECK(r.time_avg_total_queue < 100.0);
    CHECK(r.total_queue.back() < 200.0);
  }
}

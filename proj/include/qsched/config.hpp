#ifndef QSCHED_CONFIG_HPP
#define QSCHED_CONFIG_HPP

#include <string>
#include <vector>

#include "qsched/experiments.hpp"
#include "qsched/policies.hpp"

namespace qsched {

/// A parsed and validated experiment file: the plan plus the named policies
/// it defines, in file order.
struct ParsedConfig {
  ExperimentPlan plan;
  std::vector<PolicySpec> policies;
};

/// Parse a JSON experiment description. The document has five sections —
/// system, arrivals, services, policies and experiment — plus a
/// schema_version field. Unknown keys anywhere are rejected, so every
/// accepted file maps onto a runnable plan. Errors carry the JSON path or
/// parse line of the offending value and are reported as ConfigError.
ParsedConfig parse_config(const std::string& text);

/// Load and parse a config file from disk.
ParsedConfig load_config_file(const std::string& path);

const PolicySpec& find_policy(const ParsedConfig& config, const std::string& name);

}  // namespace qsched

#endif  // QSCHED_CONFIG_HPP

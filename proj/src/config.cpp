#include "qsched/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace qsched {

namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void config_fail(const std::string& where, const std::string& what) {
  throw ConfigError("config error at " + where + ": " + what);
}

const Json& member(const Json& obj, const std::string& where, const std::string& key) {
  if (!obj.contains(key)) config_fail(where, "missing key '" + key + "'");
  return obj.at(key);
}

void check_keys(const Json& obj, const std::string& where,
                const std::set<std::string>& allowed) {
  if (!obj.is_object()) config_fail(where, "expected an object");
  for (const auto& item : obj.items())
    if (!allowed.count(item.key()))
      config_fail(where, "unknown key '" + item.key() + "'");
}

int64_t get_int(const Json& v, const std::string& where) {
  if (!v.is_number_integer()) config_fail(where, "expected an integer");
  return v.get<int64_t>();
}

double get_num(const Json& v, const std::string& where) {
  if (!v.is_number()) config_fail(where, "expected a number");
  return v.get<double>();
}

bool get_bool(const Json& v, const std::string& where) {
  if (!v.is_boolean()) config_fail(where, "expected a boolean");
  return v.get<bool>();
}

std::string get_string(const Json& v, const std::string& where) {
  if (!v.is_string()) config_fail(where, "expected a string");
  return v.get<std::string>();
}

/// Scalar broadcast or length-n array of numbers.
std::vector<double> num_vector(const Json& v, const std::string& where, size_t n) {
  std::vector<double> out;
  if (v.is_number()) {
    out.assign(n, v.get<double>());
    return out;
  }
  if (!v.is_array() || v.size() != n)
    config_fail(where, "expected a number or an array of length " + std::to_string(n));
  for (size_t k = 0; k < n; ++k) out.push_back(get_num(v.at(k), where));
  return out;
}

/// Scalar broadcast or I x J array-of-arrays, flattened row-major.
std::vector<double> num_matrix(const Json& v, const std::string& where, int rows,
                               int cols) {
  std::vector<double> out;
  if (v.is_number()) {
    out.assign(static_cast<size_t>(rows) * cols, v.get<double>());
    return out;
  }
  if (!v.is_array() || static_cast<int>(v.size()) != rows)
    config_fail(where, "expected a number or " + std::to_string(rows) + " rows");
  for (int r = 0; r < rows; ++r) {
    const Json& row = v.at(r);
    if (!row.is_array() || static_cast<int>(row.size()) != cols)
      config_fail(where, "row " + std::to_string(r) + " must have " +
                             std::to_string(cols) + " entries");
    for (int c = 0; c < cols; ++c) out.push_back(get_num(row.at(c), where));
  }
  return out;
}

SystemConfig parse_system(const Json& sys) {
  check_keys(sys, "/system",
             {"num_types", "num_servers", "arrival_bound", "service_bound", "horizon"});
  SystemConfig cfg;
  cfg.num_types = static_cast<int>(get_int(member(sys, "/system", "num_types"), "/system/num_types"));
  cfg.num_servers =
      static_cast<int>(get_int(member(sys, "/system", "num_servers"), "/system/num_servers"));
  cfg.arrival_bound = static_cast<int>(
      get_int(member(sys, "/system", "arrival_bound"), "/system/arrival_bound"));
  cfg.service_bound = static_cast<int>(
      get_int(member(sys, "/system", "service_bound"), "/system/service_bound"));
  cfg.horizon = get_int(member(sys, "/system", "horizon"), "/system/horizon");
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    config_fail("/system", e.what());
  }
  return cfg;
}

ArrivalSpecSet parse_arrivals(const Json& arr, const SystemConfig& cfg) {
  const std::string where = "/arrivals";
  const std::string kind = get_string(member(arr, where, "kind"), where + "/kind");
  const size_t I = cfg.num_types;
  std::vector<ArrivalSpec> specs;

  if (kind == "bernoulli") {
    check_keys(arr, where, {"kind", "rates", "timeline"});
    std::vector<Slot> starts;
    std::vector<std::vector<double>> segment_rates;
    if (arr.contains("timeline")) {
      const Json& tl = arr.at("timeline");
      if (!tl.is_array() || tl.empty()) config_fail(where + "/timeline", "expected segments");
      for (size_t k = 0; k < tl.size(); ++k) {
        const std::string seg_where = where + "/timeline/" + std::to_string(k);
        check_keys(tl.at(k), seg_where, {"from", "rates"});
        starts.push_back(get_int(member(tl.at(k), seg_where, "from"), seg_where + "/from"));
        segment_rates.push_back(
            num_vector(member(tl.at(k), seg_where, "rates"), seg_where + "/rates", I));
      }
    } else {
      starts.push_back(0);
      segment_rates.push_back(num_vector(member(arr, where, "rates"), where + "/rates", I));
    }
    for (size_t i = 0; i < I; ++i) {
      std::vector<double> per_type;
      for (const auto& seg : segment_rates) per_type.push_back(seg[i]);
      specs.push_back(BernoulliArrivals{Timeline<double>(starts, per_type, cfg.horizon)});
    }
  } else if (kind == "pattern") {
    check_keys(arr, where, {"kind", "pattern", "patterns"});
    if (arr.contains("pattern")) {
      const Json& p = arr.at("pattern");
      if (!p.is_array() || p.empty()) config_fail(where + "/pattern", "expected an array");
      std::vector<int64_t> pat;
      for (const auto& v : p) pat.push_back(get_int(v, where + "/pattern"));
      for (size_t i = 0; i < I; ++i) specs.push_back(PatternArrivals{pat});
    } else {
      const Json& ps = member(arr, where, "patterns");
      if (!ps.is_array() || ps.size() != I)
        config_fail(where + "/patterns", "expected one pattern per type");
      for (size_t i = 0; i < I; ++i) {
        std::vector<int64_t> pat;
        for (const auto& v : ps.at(i)) pat.push_back(get_int(v, where + "/patterns"));
        specs.push_back(PatternArrivals{std::move(pat)});
      }
    }
  } else if (kind == "scripted") {
    check_keys(arr, where, {"kind", "values", "repeat"});
    const Json& vals = member(arr, where, "values");
    if (!vals.is_array() || vals.size() != I)
      config_fail(where + "/values", "expected one value list per type");
    const bool repeat =
        arr.contains("repeat") && get_bool(arr.at("repeat"), where + "/repeat");
    for (size_t i = 0; i < I; ++i) {
      std::vector<int64_t> vs;
      for (const auto& v : vals.at(i)) vs.push_back(get_int(v, where + "/values"));
      specs.push_back(ScriptedArrivals{std::move(vs), repeat});
    }
  } else {
    config_fail(where + "/kind", "unknown arrival kind '" + kind + "'");
  }
  try {
    return ArrivalSpecSet(std::move(specs), cfg);
  } catch (const ConfigError& e) {
    config_fail(where, e.what());
  }
}

ServiceSpecSet parse_services(const Json& svc, const SystemConfig& cfg) {
  const std::string where = "/services";
  const std::string kind = get_string(member(svc, where, "kind"), where + "/kind");
  const int I = cfg.num_types, J = cfg.num_servers;

  // Collect (from, law-matrix) segments for the uniform kinds.
  std::vector<Slot> starts;
  std::vector<std::vector<ServiceLaw>> segments;  // flattened I x J per segment

  auto parse_segment_laws = [&](const Json& seg, const std::string& seg_where) {
    std::vector<ServiceLaw> laws;
    if (kind == "weibull") {
      const double beta = get_num(member(svc, where, "beta"), where + "/beta");
      const auto iota = num_matrix(member(seg, seg_where, "iota"), seg_where + "/iota", I, J);
      for (double x : iota) laws.push_back(WeibullParams{x, beta});
    } else if (kind == "constant") {
      const auto times =
          num_matrix(member(seg, seg_where, "times"), seg_where + "/times", I, J);
      for (double x : times) laws.push_back(ConstantParams{static_cast<int>(x)});
    } else {
      const auto v1 = num_matrix(member(seg, seg_where, "v1"), seg_where + "/v1", I, J);
      const auto p1 = num_matrix(member(seg, seg_where, "p1"), seg_where + "/p1", I, J);
      const auto v2 = num_matrix(member(seg, seg_where, "v2"), seg_where + "/v2", I, J);
      for (size_t k = 0; k < v1.size(); ++k)
        laws.push_back(TwoPointParams{static_cast<int>(v1[k]), p1[k],
                                      static_cast<int>(v2[k])});
    }
    return laws;
  };

  if (kind != "weibull" && kind != "constant" && kind != "two_point")
    config_fail(where + "/kind", "unknown service kind '" + kind + "'");

  const std::set<std::string> base_keys =
      kind == "weibull"
          ? std::set<std::string>{"kind", "beta", "iota", "timeline"}
          : (kind == "constant" ? std::set<std::string>{"kind", "times", "timeline"}
                                : std::set<std::string>{"kind", "v1", "p1", "v2", "timeline"});
  check_keys(svc, where, base_keys);

  if (svc.contains("timeline")) {
    const Json& tl = svc.at("timeline");
    if (!tl.is_array() || tl.empty()) config_fail(where + "/timeline", "expected segments");
    for (size_t k = 0; k < tl.size(); ++k) {
      const std::string seg_where = where + "/timeline/" + std::to_string(k);
      std::set<std::string> seg_keys{"from"};
      if (kind == "weibull") seg_keys.insert("iota");
      if (kind == "constant") seg_keys.insert("times");
      if (kind == "two_point") seg_keys.insert({"v1", "p1", "v2"});
      check_keys(tl.at(k), seg_where, seg_keys);
      starts.push_back(get_int(member(tl.at(k), seg_where, "from"), seg_where + "/from"));
      segments.push_back(parse_segment_laws(tl.at(k), seg_where));
    }
  } else {
    starts.push_back(0);
    segments.push_back(parse_segment_laws(svc, where));
  }

  std::vector<ServicePairSpec> pairs;
  pairs.reserve(static_cast<size_t>(I) * J);
  for (int i = 0; i < I; ++i) {
    for (int j = 0; j < J; ++j) {
      std::vector<ServiceLaw> per_pair;
      for (const auto& seg : segments) per_pair.push_back(seg[static_cast<size_t>(i) * J + j]);
      ServicePairSpec ps;
      ps.laws = Timeline<ServiceLaw>(starts, std::move(per_pair), cfg.horizon);
      pairs.push_back(std::move(ps));
    }
  }
  try {
    return ServiceSpecSet(std::move(pairs), cfg);
  } catch (const ConfigError& e) {
    config_fail(where, e.what());
  }
}

PolicyKind parse_policy_kind(const Json& pol, const std::string& where) {
  const std::string kind = get_string(member(pol, where, "kind"), where + "/kind");
  if (kind == "discounted_ucb") {
    check_keys(pol, where, {"kind", "gamma", "c1"});
    DiscountedUcbParams p;
    p.gamma = get_num(member(pol, where, "gamma"), where + "/gamma");
    p.c1 = get_num(member(pol, where, "c1"), where + "/c1");
    if (!(p.gamma > 0.0) || !(p.gamma <= 1.0))
      config_fail(where + "/gamma", "discount must lie in (0, 1]");
    if (!(p.c1 > 0.0)) config_fail(where + "/c1", "c1 must be positive");
    return p;
  }
  if (kind == "ucb") {
    check_keys(pol, where, {"kind", "c1"});
    UcbParams p;
    p.c1 = get_num(member(pol, where, "c1"), where + "/c1");
    if (!(p.c1 > 0.0)) config_fail(where + "/c1", "c1 must be positive");
    return p;
  }
  if (kind == "oracle") {
    check_keys(pol, where, {"kind"});
    return OracleParams{};
  }
  if (kind == "empirical_mean") {
    check_keys(pol, where, {"kind", "default_rate"});
    EmpiricalMeanParams p;
    if (pol.contains("default_rate"))
      p.default_rate = get_num(pol.at("default_rate"), where + "/default_rate");
    if (!(p.default_rate > 0.0) || !(p.default_rate <= 1.0))
      config_fail(where + "/default_rate", "default rate must lie in (0, 1]");
    return p;
  }
  if (kind == "frame_maxweight") {
    check_keys(pol, where, {"kind", "frame", "c1"});
    FrameMaxWeightParams p;
    p.frame = get_int(member(pol, where, "frame"), where + "/frame");
    p.c1 = get_num(member(pol, where, "c1"), where + "/c1");
    if (p.frame < 1) config_fail(where + "/frame", "frame must be >= 1");
    if (!(p.c1 > 0.0)) config_fail(where + "/c1", "c1 must be positive");
    return p;
  }
  if (kind == "dam_ucb") {
    check_keys(pol, where, {"kind", "epoch", "c1"});
    DamUcbParams p;
    p.epoch = get_int(member(pol, where, "epoch"), where + "/epoch");
    p.c1 = get_num(member(pol, where, "c1"), where + "/c1");
    if (p.epoch < 1) config_fail(where + "/epoch", "epoch must be >= 1");
    if (!(p.c1 > 0.0)) config_fail(where + "/c1", "c1 must be positive");
    return p;
  }
  if (kind == "random") {
    check_keys(pol, where, {"kind"});
    return RandomParams{};
  }
  config_fail(where + "/kind", "unknown policy kind '" + kind + "'");
}

}  // namespace

namespace {

ParsedConfig parse_config_impl(const Json& doc);

}  // namespace

ParsedConfig parse_config(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  try {
    return parse_config_impl(doc);
  } catch (const nlohmann::json::exception& e) {
    // Typed getters catch shape errors first; this net catches the rest.
    throw ConfigError(std::string("config error: ") + e.what());
  }
}

namespace {

ParsedConfig parse_config_impl(const Json& doc) {
  check_keys(doc, "/",
             {"schema_version", "system", "arrivals", "services", "policies", "experiment"});
  const int64_t version = get_int(member(doc, "/", "schema_version"), "/schema_version");
  if (version != 1) config_fail("/schema_version", "unsupported schema version");

  ParsedConfig out;
  out.plan.system = parse_system(member(doc, "/", "system"));
  out.plan.arrivals = parse_arrivals(member(doc, "/", "arrivals"), out.plan.system);
  out.plan.services = parse_services(member(doc, "/", "services"), out.plan.system);

  const Json& pols = member(doc, "/", "policies");
  if (!pols.is_object() || pols.empty())
    config_fail("/policies", "expected at least one named policy");
  for (const auto& item : pols.items()) {
    const std::string where = "/policies/" + item.key();
    out.policies.push_back(PolicySpec{item.key(), parse_policy_kind(item.value(), where)});
  }

  const Json& exp = member(doc, "/", "experiment");
  check_keys(exp, "/experiment",
             {"runs", "seed", "sample_stride", "tail_slots", "random_tie_break"});
  out.plan.num_runs =
      static_cast<int>(get_int(member(exp, "/experiment", "runs"), "/experiment/runs"));
  out.plan.root_seed =
      static_cast<uint64_t>(get_int(member(exp, "/experiment", "seed"), "/experiment/seed"));
  if (exp.contains("sample_stride"))
    out.plan.sample_stride = get_int(exp.at("sample_stride"), "/experiment/sample_stride");
  if (exp.contains("tail_slots"))
    for (const auto& v : exp.at("tail_slots"))
      out.plan.tail_slots.push_back(get_int(v, "/experiment/tail_slots"));
  if (exp.contains("random_tie_break") &&
      get_bool(exp.at("random_tie_break"), "/experiment/random_tie_break"))
    out.plan.tie_break = TieBreak::kRandom;

  try {
    out.plan.validate();
  } catch (const ConfigError& e) {
    config_fail("/experiment", e.what());
  }
  return out;
}

}  // namespace

ParsedConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

const PolicySpec& find_policy(const ParsedConfig& config, const std::string& name) {
  for (const PolicySpec& p : config.policies)
    if (p.name == name) return p;
  throw ConfigError("policy '" + name + "' not defined in the config");
}

}  // namespace qsched

#ifndef QSCHED_SOURCES_HPP
#define QSCHED_SOURCES_HPP

#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "qsched/distributions.hpp"
#include "qsched/model.hpp"
#include "qsched/random.hpp"
#include "qsched/timeline.hpp"
#include "qsched/types.hpp"

namespace qsched {

// ---------------------------------------------------------------------------
// Arrivals

/// Bernoulli arrivals with a (possibly time-varying) success probability.
struct BernoulliArrivals {
  Timeline<double> rate;
};

/// Deterministic repeating pattern: A(t) = pattern[t % pattern.size()].
struct PatternArrivals {
  std::vector<int64_t> pattern;
};

/// Explicit per-slot values, consumed in order. Exhaustion throws unless
/// `repeat` wraps around.
struct ScriptedArrivals {
  std::vector<int64_t> values;
  bool repeat = false;
};

using ArrivalSpec = std::variant<BernoulliArrivals, PatternArrivals, ScriptedArrivals>;

/// Immutable per-type arrival description, shared across runs and threads.
class ArrivalSpecSet {
 public:
  ArrivalSpecSet() = default;
  ArrivalSpecSet(std::vector<ArrivalSpec> specs, const SystemConfig& cfg);

  int num_types() const { return static_cast<int>(specs_.size()); }
  const ArrivalSpec& spec(TypeId i) const { return specs_[i]; }

 private:
  std::vector<ArrivalSpec> specs_;
};

/// Per-run arrival source: owns one seeded stream per type. Holds a view of
/// the spec set, which must outlive the source.
class ArrivalSource {
 public:
  ArrivalSource(const ArrivalSpecSet& specs, uint64_t run_seed);

  /// Draw A_i(t) for every type i into `out`.
  void draw(Slot t, std::vector<int64_t>& out);

 private:
  const ArrivalSpecSet* specs_;
  std::vector<Rng> rngs_;
  std::vector<size_t> cursors_;
};

// ---------------------------------------------------------------------------
// Services

/// One (type, server) pair's service-time description: a piecewise-constant
/// timeline of laws, optionally preceded by a scripted prefix of draws.
/// A scripted spec with no base law errors on exhaustion unless `repeat`.
struct ServicePairSpec {
  std::optional<Timeline<ServiceLaw>> laws;  // absent for a pure script
  std::vector<int> script;                   // consumed before the laws
  bool repeat_script = false;
};

/// Immutable I x J service description. Sampling tables and exact means are
/// precomputed per (pair, segment), so per-run sources are cheap to make.
class ServiceSpecSet {
 public:
  ServiceSpecSet() = default;
  ServiceSpecSet(std::vector<ServicePairSpec> pair_specs, const SystemConfig& cfg);

  int num_types() const { return num_types_; }
  int num_servers() const { return num_servers_; }
  const ServicePairSpec& pair(TypeId i, ServerId j) const {
    return pair_specs_[idx(i, j)];
  }
  const ServiceLawTable& table(TypeId i, ServerId j, Slot t) const;

  /// True mean service time of pair (i, j) at slot t. Scripted prefixes are
  /// transient and excluded; a pure script has no stationary mean and throws.
  double mean_time_at(TypeId i, ServerId j, Slot t) const;
  double mu_at(TypeId i, ServerId j, Slot t) const { return 1.0 / mean_time_at(i, j, t); }

  /// Service-rate matrix at slot t, row-major I x J.
  std::vector<double> mu_matrix_at(Slot t) const;

  /// Mean-service-time timelines for every pair, row-major, as consumed by
  /// the drift validator.
  std::vector<Timeline<double>> mean_time_timelines() const;

 private:
  size_t idx(TypeId i, ServerId j) const {
    return static_cast<size_t>(i) * num_servers_ + j;
  }

  int num_types_ = 0;
  int num_servers_ = 0;
  int service_bound_ = 1;
  std::vector<ServicePairSpec> pair_specs_;
  std::vector<std::vector<ServiceLawTable>> tables_;  // [pair][segment]
};

/// Per-run service-time source: one seeded stream and script cursor per
/// pair. Holds a view of the spec set, which must outlive the source.
class ServiceSource : public ServiceSampler {
 public:
  ServiceSource(const ServiceSpecSet& specs, uint64_t run_seed);

  int sample(TypeId i, ServerId j, Slot t) override;

 private:
  const ServiceSpecSet* specs_;
  std::vector<Rng> rngs_;
  std::vector<size_t> cursors_;
};

/// Standalone scripted source for single-stream tests: replays `values`,
/// then throws on exhaustion or wraps around when `repeat` is set.
class ScriptedSequence {
 public:
  ScriptedSequence(std::vector<int> values, bool repeat);
  int next();

 private:
  std::vector<int> values_;
  bool repeat_;
  size_t cursor_ = 0;
};

}  // namespace qsched

#endif  // QSCHED_SOURCES_HPP

#include "qsched/policies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qsched {

namespace {

uint32_t fnv1a(const std::string& s) {
  uint32_t h = 2166136261u;
  for (unsigned char c : s) {
    h ^= c;
    h *= 16777619u;
  }
  return h;
}

// Sub-stream purposes within a policy's seed space.
constexpr uint32_t kSlot0Purpose = 0;
constexpr uint32_t kTiePurpose = 1;
constexpr uint32_t kPickPurpose = 2;

uint64_t policy_stream_seed(const PolicySpec& spec, uint64_t run_seed, uint32_t purpose) {
  return stream_seed(run_seed, StreamRole::kPolicy, fnv1a(spec.name), purpose);
}

}  // namespace

std::string policy_kind_name(const PolicyKind& kind) {
  if (std::holds_alternative<DiscountedUcbParams>(kind)) return "discounted_ucb";
  if (std::holds_alternative<UcbParams>(kind)) return "ucb";
  if (std::holds_alternative<OracleParams>(kind)) return "oracle";
  if (std::holds_alternative<EmpiricalMeanParams>(kind)) return "empirical_mean";
  if (std::holds_alternative<FrameMaxWeightParams>(kind)) return "frame_maxweight";
  if (std::holds_alternative<DamUcbParams>(kind)) return "dam_ucb";
  return "random";
}

PolicySpec PolicySpec::of(PolicyKind kind) {
  return PolicySpec{policy_kind_name(kind), std::move(kind)};
}

void ArgmaxPicker::offer(TypeId i, double weight) {
  if (best_ == kNoType || weight > best_weight_) {
    best_ = i;
    best_weight_ = weight;
    ties_ = 1;
    return;
  }
  if (weight == best_weight_ && mode_ == TieBreak::kRandom) {
    // Reservoir step: the k-th tied candidate wins with probability 1/k.
    ties_ += 1;
    if (rng_->uniform_int(ties_) == 0) best_ = i;
  }
}

// ---------------------------------------------------------------------------
// MaxWeight with (discounted) UCB

MaxWeightUcbPolicy::MaxWeightUcbPolicy(const SystemConfig& cfg, double gamma,
                                       double c1, TieBreak tie_break,
                                       uint64_t tie_seed)
    : estimator_(cfg, gamma, c1),
      tie_rng_(tie_seed),
      picker_(tie_break, &tie_rng_) {}

void MaxWeightUcbPolicy::pick(const SystemState& state,
                              std::span<const ServerId> available,
                              std::vector<TypeId>& picks) {
  if (available.empty()) return;
  const double horizon_log = discounted_horizon_log(estimator_.gamma, state.t);
  for (ServerId j : available) {
    picker_.start();
    for (TypeId i = 0; i < estimator_.num_types; ++i) {
      const double denom = estimator_.pick_denominator_with_log(i, j, horizon_log);
      picker_.offer(i, static_cast<double>(state.queue[i]) / denom);
    }
    picks[j] = picker_.best();
  }
}

// ---------------------------------------------------------------------------
// Oracle MaxWeight

OracleMaxWeightPolicy::OracleMaxWeightPolicy(const SystemConfig& cfg,
                                             const ServiceSpecSet& services,
                                             TieBreak tie_break, uint64_t tie_seed)
    : services_(&services),
      num_types_(cfg.num_types),
      num_servers_(cfg.num_servers),
      tie_rng_(tie_seed),
      picker_(tie_break, &tie_rng_) {}

void OracleMaxWeightPolicy::refresh_mu(Slot t) {
  if (t >= mu_valid_from_ && t < mu_valid_to_) return;
  mu_ = services_->mu_matrix_at(t);
  // Find the widest window around t on which every pair's law is constant.
  Slot lo = 0;
  Slot hi = std::numeric_limits<Slot>::max();
  for (TypeId i = 0; i < num_types_; ++i) {
    for (ServerId j = 0; j < num_servers_; ++j) {
      const auto& tl = *services_->pair(i, j).laws;
      const size_t k = tl.segment_index(t);
      lo = std::max(lo, tl.segment_start(k));
      hi = std::min(hi, tl.segment_end(k));
    }
  }
  mu_valid_from_ = lo;
  mu_valid_to_ = hi;
}

void OracleMaxWeightPolicy::pick(const SystemState& state,
                                 std::span<const ServerId> available,
                                 std::vector<TypeId>& picks) {
  refresh_mu(state.t);
  for (ServerId j : available) {
    picker_.start();
    for (TypeId i = 0; i < num_types_; ++i) {
      picker_.offer(i, static_cast<double>(state.queue[i]) *
                           mu_[static_cast<size_t>(i) * num_servers_ + j]);
    }
    picks[j] = picker_.best();
  }
}

// ---------------------------------------------------------------------------
// MaxWeight with empirical means

EmpiricalMeanPolicy::EmpiricalMeanPolicy(const SystemConfig& cfg, double default_rate,
                                         TieBreak tie_break, uint64_t tie_seed)
    : num_types_(cfg.num_types),
      num_servers_(cfg.num_servers),
      default_rate_(default_rate),
      completions_(static_cast<size_t>(cfg.num_types) * cfg.num_servers, 0),
      served_slots_(completions_.size(), 0),
      tie_rng_(tie_seed),
      picker_(tie_break, &tie_rng_) {
  if (!(default_rate > 0.0) || !(default_rate <= 1.0))
    throw ConfigError("empirical-mean default rate must lie in (0, 1]");
}

void EmpiricalMeanPolicy::observe(const SlotEvents& prev) {
  for (ServerId j = 0; j < num_servers_; ++j) {
    const TypeId i = prev.completed[j];
    if (i == kNoType || !prev.nonidle[j]) continue;
    const size_t k = static_cast<size_t>(i) * num_servers_ + j;
    completions_[k] += 1;
    served_slots_[k] += prev.completed_len[j];
  }
}

double EmpiricalMeanPolicy::rate_estimate(TypeId i, ServerId j) const {
  const size_t k = static_cast<size_t>(i) * num_servers_ + j;
  if (completions_[k] == 0) return default_rate_;
  return static_cast<double>(completions_[k]) / static_cast<double>(served_slots_[k]);
}

void EmpiricalMeanPolicy::pick(const SystemState& state,
                               std::span<const ServerId> available,
                               std::vector<TypeId>& picks) {
  for (ServerId j : available) {
    picker_.start();
    for (TypeId i = 0; i < num_types_; ++i)
      picker_.offer(i, static_cast<double>(state.queue[i]) * rate_estimate(i, j));
    picks[j] = picker_.best();
  }
}

// ---------------------------------------------------------------------------
// Frame-based MaxWeight

FrameMaxWeightPolicy::FrameMaxWeightPolicy(const SystemConfig& cfg, Slot frame,
                                           double c1, TieBreak tie_break,
                                           uint64_t tie_seed)
    : frame_(frame),
      estimator_(cfg, 1.0, c1),
      frozen_queue_(cfg.num_types, 0),
      tie_rng_(tie_seed),
      picker_(tie_break, &tie_rng_) {
  if (frame < 1) throw ConfigError("frame length must be >= 1");
}

void FrameMaxWeightPolicy::pick(const SystemState& state,
                                std::span<const ServerId> available,
                                std::vector<TypeId>& picks) {
  const Slot t = state.t;
  if (t % frame_ == 0) {
    frozen_queue_ = state.queue;
    frame_start_ = t;
    // Restart the statistics but keep the in-flight counters physical, so a
    // job straddling the boundary still contributes its full service time.
    std::fill(estimator_.n_hat.begin(), estimator_.n_hat.end(), 0.0);
    std::fill(estimator_.phi_hat.begin(), estimator_.phi_hat.end(), 0.0);
  }
  if (available.empty()) return;
  const Slot frame_clock = t - frame_start_ + 1;
  const double frame_log = discounted_horizon_log(1.0, frame_clock);
  for (ServerId j : available) {
    picker_.start();
    for (TypeId i = 0; i < estimator_.num_types; ++i) {
      const double denom = estimator_.pick_denominator_with_log(i, j, frame_log);
      picker_.offer(i, static_cast<double>(frozen_queue_[i]) / denom);
    }
    picks[j] = picker_.best();
  }
}

// ---------------------------------------------------------------------------
// Epoch-held UCB

DamUcbPolicy::DamUcbPolicy(const SystemConfig& cfg, Slot epoch, double c1,
                           TieBreak tie_break, uint64_t tie_seed)
    : epoch_(epoch),
      estimator_(cfg, 1.0, c1),
      tie_rng_(tie_seed),
      picker_(tie_break, &tie_rng_) {
  if (epoch < 1) throw ConfigError("epoch length must be >= 1");
}

void DamUcbPolicy::observe(const SlotEvents& prev) {
  estimator_.update(prev);
  if (assignment_.empty())
    assignment_.assign(prev.scheduled.begin(), prev.scheduled.end());
}

void DamUcbPolicy::pick(const SystemState& state, std::span<const ServerId> available,
                        std::vector<TypeId>& picks) {
  const Slot t = state.t;
  if (t % epoch_ == 0 || assignment_.empty()) {
    const double horizon_log = discounted_horizon_log(1.0, t);
    assignment_.assign(estimator_.num_servers, 0);
    for (ServerId j = 0; j < estimator_.num_servers; ++j) {
      picker_.start();
      for (TypeId i = 0; i < estimator_.num_types; ++i) {
        const double denom = estimator_.pick_denominator_with_log(i, j, horizon_log);
        picker_.offer(i, static_cast<double>(state.queue[i]) / denom);
      }
      assignment_[j] = picker_.best();
    }
  }
  for (ServerId j : available) picks[j] = assignment_[j];
}

// ---------------------------------------------------------------------------

void RandomPolicy::pick(const SystemState& state, std::span<const ServerId> available,
                        std::vector<TypeId>& picks) {
  (void)state;
  for (ServerId j : available)
    picks[j] = static_cast<TypeId>(rng_.uniform_int(num_types_));
}

std::unique_ptr<Policy> make_policy(const PolicySpec& spec, const SystemConfig& cfg,
                                    const ServiceSpecSet& services,
                                    TieBreak tie_break, uint64_t run_seed) {
  const uint64_t tie_seed = policy_stream_seed(spec, run_seed, kTiePurpose);
  if (const auto* d = std::get_if<DiscountedUcbParams>(&spec.kind))
    return std::make_unique<MaxWeightUcbPolicy>(cfg, d->gamma, d->c1, tie_break, tie_seed);
  if (const auto* u = std::get_if<UcbParams>(&spec.kind))
    return std::make_unique<MaxWeightUcbPolicy>(cfg, 1.0, u->c1, tie_break, tie_seed);
  if (std::holds_alternative<OracleParams>(spec.kind))
    return std::make_unique<OracleMaxWeightPolicy>(cfg, services, tie_break, tie_seed);
  if (const auto* e = std::get_if<EmpiricalMeanParams>(&spec.kind))
    return std::make_unique<EmpiricalMeanPolicy>(cfg, e->default_rate, tie_break, tie_seed);
  if (const auto* f = std::get_if<FrameMaxWeightParams>(&spec.kind))
    return std::make_unique<FrameMaxWeightPolicy>(cfg, f->frame, f->c1, tie_break, tie_seed);
  if (const auto* m = std::get_if<DamUcbParams>(&spec.kind))
    return std::make_unique<DamUcbPolicy>(cfg, m->epoch, m->c1, tie_break, tie_seed);
  return std::make_unique<RandomPolicy>(cfg, policy_stream_seed(spec, run_seed, kPickPurpose));
}

uint64_t slot0_stream_seed(const PolicySpec& spec, uint64_t run_seed) {
  return policy_stream_seed(spec, run_seed, kSlot0Purpose);
}

}  // namespace qsched

#include "qsched/sources.hpp"

#include <string>

namespace qsched {

// ---------------------------------------------------------------------------
// Arrivals

ArrivalSpecSet::ArrivalSpecSet(std::vector<ArrivalSpec> specs, const SystemConfig& cfg)
    : specs_(std::move(specs)) {
  if (static_cast<int>(specs_.size()) != cfg.num_types)
    throw ConfigError("need one arrival spec per job type");
  for (const ArrivalSpec& spec : specs_) {
    if (const auto* b = std::get_if<BernoulliArrivals>(&spec)) {
      if (b->rate.horizon() < cfg.horizon)
        throw ConfigError("arrival-rate timeline shorter than the horizon");
      for (size_t k = 0; k < b->rate.num_segments(); ++k) {
        const double lambda = b->rate.segment_value(k);
        if (!(lambda >= 0.0) || !(lambda <= 1.0))
          throw ConfigError("bernoulli arrival rate must lie in [0, 1]");
      }
    } else if (const auto* p = std::get_if<PatternArrivals>(&spec)) {
      if (p->pattern.empty()) throw ConfigError("arrival pattern must be nonempty");
      for (int64_t v : p->pattern)
        if (v < 0 || v > cfg.arrival_bound)
          throw ConfigError("arrival pattern value outside [0, arrival_bound]");
    } else {
      const auto& s = std::get<ScriptedArrivals>(spec);
      if (s.values.empty()) throw ConfigError("scripted arrivals must be nonempty");
      for (int64_t v : s.values)
        if (v < 0 || v > cfg.arrival_bound)
          throw ConfigError("scripted arrival value outside [0, arrival_bound]");
    }
  }
}

ArrivalSource::ArrivalSource(const ArrivalSpecSet& specs, uint64_t run_seed)
    : specs_(&specs), cursors_(specs.num_types(), 0) {
  rngs_.reserve(specs.num_types());
  for (int i = 0; i < specs.num_types(); ++i)
    rngs_.emplace_back(stream_seed(run_seed, StreamRole::kArrival, i, 0));
}

void ArrivalSource::draw(Slot t, std::vector<int64_t>& out) {
  const int n = specs_->num_types();
  out.resize(n);
  for (int i = 0; i < n; ++i) {
    const ArrivalSpec& spec = specs_->spec(i);
    if (const auto* b = std::get_if<BernoulliArrivals>(&spec)) {
      out[i] = rngs_[i].bernoulli(b->rate.at(t)) ? 1 : 0;
    } else if (const auto* p = std::get_if<PatternArrivals>(&spec)) {
      out[i] = p->pattern[static_cast<size_t>(t) % p->pattern.size()];
    } else {
      const auto& s = std::get<ScriptedArrivals>(spec);
      size_t& c = cursors_[i];
      if (c >= s.values.size()) {
        if (!s.repeat)
          throw ConfigError("scripted arrivals exhausted for type " + std::to_string(i));
        c = 0;
      }
      out[i] = s.values[c++];
    }
  }
}

// ---------------------------------------------------------------------------
// Services

ServiceSpecSet::ServiceSpecSet(std::vector<ServicePairSpec> pair_specs,
                               const SystemConfig& cfg)
    : num_types_(cfg.num_types),
      num_servers_(cfg.num_servers),
      service_bound_(cfg.service_bound),
      pair_specs_(std::move(pair_specs)) {
  if (pair_specs_.size() != static_cast<size_t>(num_types_) * num_servers_)
    throw ConfigError("need one service spec per (type, server) pair");
  tables_.resize(pair_specs_.size());
  for (size_t k = 0; k < pair_specs_.size(); ++k) {
    const ServicePairSpec& ps = pair_specs_[k];
    for (int v : ps.script)
      if (v < 1 || v > service_bound_)
        throw ConfigError("scripted service time outside [1, service_bound]");
    if (ps.laws) {
      if (ps.laws->horizon() < cfg.horizon)
        throw ConfigError("service-law timeline shorter than the horizon");
      tables_[k].reserve(ps.laws->num_segments());
      for (size_t s = 0; s < ps.laws->num_segments(); ++s)
        tables_[k].emplace_back(ps.laws->segment_value(s), service_bound_);
    } else if (ps.script.empty()) {
      throw ConfigError("service spec needs a law timeline or a script");
    }
  }
}

const ServiceLawTable& ServiceSpecSet::table(TypeId i, ServerId j, Slot t) const {
  const ServicePairSpec& ps = pair_specs_[idx(i, j)];
  if (!ps.laws)
    throw ContractViolation("pair has no service law, only a script");
  return tables_[idx(i, j)][ps.laws->segment_index(t)];
}

double ServiceSpecSet::mean_time_at(TypeId i, ServerId j, Slot t) const {
  return table(i, j, t).mean();
}

std::vector<double> ServiceSpecSet::mu_matrix_at(Slot t) const {
  std::vector<double> mu(pair_specs_.size());
  for (TypeId i = 0; i < num_types_; ++i)
    for (ServerId j = 0; j < num_servers_; ++j)
      mu[idx(i, j)] = mu_at(i, j, t);
  return mu;
}

std::vector<Timeline<double>> ServiceSpecSet::mean_time_timelines() const {
  std::vector<Timeline<double>> out;
  out.reserve(pair_specs_.size());
  for (size_t k = 0; k < pair_specs_.size(); ++k) {
    const ServicePairSpec& ps = pair_specs_[k];
    if (!ps.laws)
      throw ContractViolation("pair has no service law, only a script");
    std::vector<Slot> starts;
    std::vector<double> means;
    for (size_t s = 0; s < ps.laws->num_segments(); ++s) {
      starts.push_back(ps.laws->segment_start(s));
      means.push_back(tables_[k][s].mean());
    }
    out.emplace_back(std::move(starts), std::move(means), ps.laws->horizon());
  }
  return out;
}

ServiceSource::ServiceSource(const ServiceSpecSet& specs, uint64_t run_seed)
    : specs_(&specs),
      cursors_(static_cast<size_t>(specs.num_types()) * specs.num_servers(), 0) {
  rngs_.reserve(cursors_.size());
  for (int i = 0; i < specs.num_types(); ++i)
    for (int j = 0; j < specs.num_servers(); ++j)
      rngs_.emplace_back(stream_seed(run_seed, StreamRole::kService, i, j));
}

int ServiceSource::sample(TypeId i, ServerId j, Slot t) {
  const size_t k = static_cast<size_t>(i) * specs_->num_servers() + j;
  const ServicePairSpec& ps = specs_->pair(i, j);
  size_t& c = cursors_[k];
  if (c < ps.script.size()) return ps.script[c++];
  if (!ps.laws) {
    if (ps.repeat_script && !ps.script.empty()) {
      c = 1;
      return ps.script[0];
    }
    throw ConfigError("scripted service times exhausted for pair (" +
                      std::to_string(i) + ", " + std::to_string(j) + ")");
  }
  return specs_->table(i, j, t).sample(rngs_[k]);
}

ScriptedSequence::ScriptedSequence(std::vector<int> values, bool repeat)
    : values_(std::move(values)), repeat_(repeat) {
  if (values_.empty()) throw ConfigError("scripted sequence must be nonempty");
}

int ScriptedSequence::next() {
  if (cursor_ >= values_.size()) {
    if (!repeat_) throw ConfigError("scripted sequence exhausted");
    cursor_ = 0;
  }
  return values_[cursor_++];
}

}  // namespace qsched

#include "qsched/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <thread>

#include "qsched/model.hpp"

namespace qsched {

void ExperimentPlan::validate() const {
  system.validate();
  if (num_runs < 1) throw ConfigError("num_runs must be >= 1");
  if (sample_stride < 1) throw ConfigError("sample_stride must be >= 1");
  for (Slot t : tail_slots)
    if (t < 0 || t > system.horizon)
      throw ConfigError("tail slot outside [0, horizon]");
}

RunResult run_simulation(const ExperimentPlan& plan, const PolicySpec& policy,
                         int run_index, const RunOptions& options) {
  plan.validate();
  const SystemConfig& cfg = plan.system;
  const uint64_t seed = run_seed(plan.root_seed, static_cast<uint32_t>(run_index));

  ArrivalSource arrivals(plan.arrivals, seed);
  ServiceSource services(plan.services, seed);
  std::unique_ptr<Policy> pol =
      make_policy(policy, cfg, plan.services, plan.tie_break, seed);
  Rng slot0_rng(slot0_stream_seed(policy, seed));

  SystemState state = make_initial_state(cfg);
  TrajectoryChecker checker(cfg);
  RunResult result;
  result.tail_norms.resize(plan.tail_slots.size(), 0.0);

  std::vector<int64_t> slot_arrivals(cfg.num_types, 0);
  std::vector<TypeId> picks(cfg.num_servers, kNoType);
  SlotEvents prev_events;
  SystemState before;
  double queue_slot_sum = 0.0;

  auto record_at = [&](Slot t) {
    if (t % plan.sample_stride == 0) {
      result.record_slots.push_back(t);
      result.total_queue.push_back(static_cast<double>(state.total_queue()));
    }
    for (size_t k = 0; k < plan.tail_slots.size(); ++k) {
      if (plan.tail_slots[k] == t) {
        double sq = 0.0;
        for (int64_t q : state.queue) sq += static_cast<double>(q) * q;
        result.tail_norms[k] = std::sqrt(sq);
      }
    }
  };

  for (Slot t = 0; t < cfg.horizon; ++t) {
    record_at(t);

    std::fill(picks.begin(), picks.end(), kNoType);
    const std::vector<ServerId> avail = available_servers(state);
    if (t == 0) {
      for (ServerId j : avail)
        picks[j] = static_cast<TypeId>(slot0_rng.uniform_int(cfg.num_types));
    } else {
      pol->observe(prev_events);
      pol->pick(state, avail, picks);
    }
    if (options.pick_log)
      options.pick_log->insert(options.pick_log->end(), picks.begin(), picks.end());

    arrivals.draw(t, slot_arrivals);
    if (options.check_invariants) before = state;
    advance_slot_into(state, slot_arrivals, picks, services, cfg, prev_events);
    if (options.check_invariants) checker.on_slot(before, state, prev_events);

    queue_slot_sum += static_cast<double>(state.total_queue());
  }
  record_at(cfg.horizon);

  result.time_avg_total_queue = queue_slot_sum / static_cast<double>(cfg.horizon);
  result.invariant_violations = checker.violations();
  result.first_violation = checker.first_violation();
  return result;
}

int worker_threads() {
  if (const char* env = std::getenv("QSCHED_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<int>(v);
    return 1;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::vector<RunResult> run_many(const ExperimentPlan& plan, const PolicySpec& policy,
                                const RunOptions& options, int threads) {
  plan.validate();
  if (options.pick_log && plan.num_runs > 1)
    throw ContractViolation("pick_log is only meaningful for a single run");
  if (threads <= 0) threads = worker_threads();
  threads = std::min<int>(threads, plan.num_runs);

  std::vector<RunResult> results(plan.num_runs);
  if (threads <= 1) {
    for (int r = 0; r < plan.num_runs; ++r)
      results[r] = run_simulation(plan, policy, r, options);
    return results;
  }

  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&]() {
    for (;;) {
      const int r = next.fetch_add(1);
      if (r >= plan.num_runs) return;
      try {
        results[r] = run_simulation(plan, policy, r, options);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int w = 0; w < threads; ++w) pool.emplace_back(work);
  for (std::thread& th : pool) th.join();
  if (error) std::rethrow_exception(error);
  return results;
}

RunAggregate aggregate_runs(std::span<const RunResult> runs) {
  if (runs.empty()) throw ContractViolation("aggregate_runs needs at least one run");
  const size_t n_points = runs.front().record_slots.size();
  const size_t n_tails = runs.front().tail_norms.size();
  for (const RunResult& r : runs) {
    if (r.record_slots != runs.front().record_slots)
      throw ContractViolation("aggregate_runs: mismatched recording grids");
    if (r.tail_norms.size() != n_tails)
      throw ContractViolation("aggregate_runs: mismatched tail grids");
  }

  RunAggregate agg;
  agg.slots = runs.front().record_slots;
  agg.mean_total_queue.assign(n_points, 0.0);
  agg.ci_half_width.assign(n_points, 0.0);
  const double R = static_cast<double>(runs.size());

  for (size_t p = 0; p < n_points; ++p) {
    double mean = 0.0;
    for (const RunResult& r : runs) mean += r.total_queue[p];
    mean /= R;
    double ssq = 0.0;
    for (const RunResult& r : runs) {
      const double d = r.total_queue[p] - mean;
      ssq += d * d;
    }
    agg.mean_total_queue[p] = mean;
    if (runs.size() > 1) {
      const double sample_std = std::sqrt(ssq / (R - 1.0));
      agg.ci_half_width[p] = 1.96 * sample_std / std::sqrt(R);
    }
  }

  for (const RunResult& r : runs) {
    agg.mean_time_avg_queue += r.time_avg_total_queue;
    agg.invariant_violations += r.invariant_violations;
  }
  agg.mean_time_avg_queue /= R;

  agg.tail_norms.resize(n_tails);
  for (size_t k = 0; k < n_tails; ++k) {
    agg.tail_norms[k].reserve(runs.size());
    for (const RunResult& r : runs) agg.tail_norms[k].push_back(r.tail_norms[k]);
  }
  return agg;
}

double least_squares_slope(std::span<const Slot> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw ContractViolation("least_squares_slope needs >= 2 points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (size_t k = 0; k < x.size(); ++k) {
    mx += static_cast<double>(x[k]);
    my += y[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (size_t k = 0; k < x.size(); ++k) {
    const double dx = static_cast<double>(x[k]) - mx;
    sxx += dx * dx;
    sxy += dx * (y[k] - my);
  }
  if (sxx == 0.0) throw ContractViolation("least_squares_slope: no spread in x");
  return sxy / sxx;
}

namespace {

std::pair<std::vector<Slot>, std::vector<double>> window_points(
    std::span<const Slot> slots, std::span<const double> values, Slot from, Slot to) {
  std::vector<Slot> xs;
  std::vector<double> ys;
  for (size_t k = 0; k < slots.size(); ++k) {
    if (slots[k] >= from && slots[k] <= to) {
      xs.push_back(slots[k]);
      ys.push_back(values[k]);
    }
  }
  return {std::move(xs), std::move(ys)};
}

}  // namespace

double window_slope(std::span<const Slot> slots, std::span<const double> values,
                    Slot from, Slot to) {
  auto [xs, ys] = window_points(slots, values, from, to);
  return least_squares_slope(xs, ys);
}

double window_mean(std::span<const Slot> slots, std::span<const double> values,
                   Slot from, Slot to) {
  auto [xs, ys] = window_points(slots, values, from, to);
  if (ys.empty()) throw ContractViolation("window_mean: empty window");
  double s = 0.0;
  for (double v : ys) s += v;
  return s / static_cast<double>(ys.size());
}

TailEstimate tail_estimate(std::span<const double> samples,
                           std::span<const double> thresholds,
                           int min_exceedances) {
  if (samples.empty()) throw ContractViolation("tail_estimate needs samples");
  TailEstimate est;
  est.thresholds.assign(thresholds.begin(), thresholds.end());
  est.survival.resize(thresholds.size());

  std::vector<double> fit_x, fit_y, fit_w;
  for (size_t k = 0; k < thresholds.size(); ++k) {
    int64_t exceed = 0;
    for (double s : samples)
      if (s >= thresholds[k]) exceed += 1;
    const double p = static_cast<double>(exceed) / static_cast<double>(samples.size());
    est.survival[k] = p;
    if (exceed >= min_exceedances) {
      fit_x.push_back(thresholds[k]);
      fit_y.push_back(std::log(p));
      fit_w.push_back(static_cast<double>(exceed));
    }
  }

  if (fit_x.size() < 2) return est;
  double sw = 0.0, swx = 0.0, swy = 0.0;
  for (size_t k = 0; k < fit_x.size(); ++k) {
    sw += fit_w[k];
    swx += fit_w[k] * fit_x[k];
    swy += fit_w[k] * fit_y[k];
  }
  const double mx = swx / sw, my = swy / sw;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (size_t k = 0; k < fit_x.size(); ++k) {
    const double dx = fit_x[k] - mx, dy = fit_y[k] - my;
    sxx += fit_w[k] * dx * dx;
    sxy += fit_w[k] * dx * dy;
    syy += fit_w[k] * dy * dy;
  }
  if (sxx == 0.0) return est;
  est.fit.available = true;
  est.fit.slope = sxy / sxx;
  est.fit.intercept = my - est.fit.slope * mx;
  est.fit.points = static_cast<int>(fit_x.size());
  // Weighted R^2; a vertical-spread-free fit is a perfect line.
  est.fit.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return est;
}

std::vector<double> default_tail_thresholds(std::span<const double> samples, int count) {
  if (samples.empty() || count < 2)
    throw ContractViolation("default_tail_thresholds needs samples and count >= 2");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> out;
  for (int k = 0; k < count; ++k) {
    const double level = 0.50 + (0.99 - 0.50) * k / (count - 1);
    const size_t idx = std::min<size_t>(
        static_cast<size_t>(level * (sorted.size() - 1)), sorted.size() - 1);
    const double x = sorted[idx];
    if (out.empty() || x > out.back()) out.push_back(x);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Counterexample

ExperimentPlan counterexample_plan(Slot horizon, bool force_bad_event, uint64_t seed) {
  if (horizon < 10000) throw ConfigError("counterexample horizon must be >= 10000");
  ExperimentPlan plan;
  plan.system = SystemConfig{2, 2, 1, 100, horizon};
  plan.num_runs = 1;
  plan.root_seed = seed;
  plan.sample_stride = 10;

  // One arrival per queue on every odd slot.
  std::vector<ArrivalSpec> arr(2, ArrivalSpec{PatternArrivals{{0, 1}}});
  plan.arrivals = ArrivalSpecSet(std::move(arr), plan.system);

  std::vector<ServicePairSpec> pairs;
  for (TypeId i = 0; i < 2; ++i) {
    for (ServerId j = 0; j < 2; ++j) {
      ServicePairSpec ps;
      if (i == j) {
        ps.laws = Timeline<ServiceLaw>::constant(TwoPointParams{1, 0.99, 100}, horizon);
        if (force_bad_event) ps.script = {100, 100};
      } else {
        ps.laws = Timeline<ServiceLaw>::constant(ConstantParams{10}, horizon);
      }
      pairs.push_back(std::move(ps));
    }
  }
  plan.services = ServiceSpecSet(std::move(pairs), plan.system);
  return plan;
}

CounterexampleResult run_counterexample_with(Slot horizon, bool force_bad_event,
                                             uint64_t seed, const PolicySpec& policy) {
  const ExperimentPlan plan = counterexample_plan(horizon, force_bad_event, seed);
  CounterexampleResult out;
  out.run = run_simulation(plan, policy, 0);
  out.fit_from = horizon / 2;
  out.fit_to = horizon;
  out.slope = window_slope(out.run.record_slots, out.run.total_queue, out.fit_from,
                           out.fit_to);
  return out;
}

CounterexampleResult run_counterexample(Slot horizon, bool force_bad_event,
                                        uint64_t seed) {
  return run_counterexample_with(horizon, force_bad_event, seed,
                                 PolicySpec::of(EmpiricalMeanParams{1.0}));
}

}  // namespace qsched

#include "qsched/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qsched {

SystemState make_initial_state(const SystemConfig& cfg) {
  cfg.validate();
  SystemState s;
  s.t = 0;
  s.queue.assign(cfg.num_types, 0);
  s.waiting.assign(cfg.num_types, 0);
  s.servers.assign(cfg.num_servers, ServerRecord{});
  return s;
}

std::vector<ServerId> available_servers(const SystemState& state) {
  std::vector<ServerId> out;
  for (ServerId j = 0; j < static_cast<ServerId>(state.servers.size()); ++j) {
    if (!state.servers[j].busy()) out.push_back(j);
  }
  return out;
}

SlotEvents advance_slot(SystemState& state, std::span<const int64_t> arrivals,
                        std::span<const TypeId> picks, ServiceSampler& sampler,
                        const SystemConfig& cfg) {
  SlotEvents ev;
  advance_slot_into(state, arrivals, picks, sampler, cfg, ev);
  return ev;
}

void advance_slot_into(SystemState& state, std::span<const int64_t> arrivals,
                       std::span<const TypeId> picks, ServiceSampler& sampler,
                       const SystemConfig& cfg, SlotEvents& ev) {
  const int num_types = cfg.num_types;
  const int num_servers = cfg.num_servers;
  if (static_cast<int>(arrivals.size()) != num_types)
    throw ContractViolation("advance_slot: arrivals size mismatch");
  if (static_cast<int>(picks.size()) != num_servers)
    throw ContractViolation("advance_slot: picks size mismatch");
  for (int i = 0; i < num_types; ++i) {
    if (arrivals[i] < 0 || arrivals[i] > cfg.arrival_bound) {
      std::ostringstream os;
      os << "arrivals[" << i << "]=" << arrivals[i] << " outside [0, "
         << cfg.arrival_bound << "]";
      throw ConfigError(os.str());
    }
  }

  ev.t = state.t;
  ev.arrivals.assign(arrivals.begin(), arrivals.end());
  ev.scheduled.assign(num_servers, kNoType);
  ev.completed.assign(num_servers, kNoType);
  ev.completed_len.assign(num_servers, 0);
  ev.nonidle.assign(num_servers, 0);
  ev.started.clear();

  // Busy servers serve one slot of their current job.
  for (ServerId j = 0; j < num_servers; ++j) {
    ServerRecord& rec = state.servers[j];
    if (!rec.busy()) continue;
    if (picks[j] != kNoType)
      throw ContractViolation("advance_slot: pick issued for busy server " +
                              std::to_string(j));
    ev.scheduled[j] = rec.assigned_type;
    ev.nonidle[j] = 1;
    rec.elapsed += 1;
    rec.remaining -= 1;
    if (rec.remaining == 0) {
      ev.completed[j] = rec.assigned_type;
      ev.completed_len[j] = rec.elapsed;
      rec = ServerRecord{};
    }
  }

  // Assignment pool: waiting jobs plus this slot's arrivals.
  thread_local std::vector<int64_t> pool;
  pool = state.waiting;
  for (int i = 0; i < num_types; ++i) pool[i] += arrivals[i];

  // Picking servers, ascending index; losers of a contended pool idle.
  for (ServerId j = 0; j < num_servers; ++j) {
    const TypeId i = picks[j];
    if (i == kNoType) continue;
    if (i < 0 || i >= num_types)
      throw ContractViolation("advance_slot: pick type out of range");
    ev.scheduled[j] = i;
    if (pool[i] > 0) {
      pool[i] -= 1;
      const int s = sampler.sample(i, j, state.t);
      if (s < 1 || s > cfg.service_bound)
        throw ConfigError("service sampler returned " + std::to_string(s) +
                          " outside [1, " + std::to_string(cfg.service_bound) + "]");
      ev.started.push_back(StartedJob{j, i, s});
      ev.nonidle[j] = 1;
      if (s == 1) {
        ev.completed[j] = i;
        ev.completed_len[j] = 1;
      } else {
        state.servers[j] = ServerRecord{i, 1, s - 1};
      }
    } else {
      // Idling: the indicator fires with eta = 0 and the server stays free.
      ev.completed[j] = i;
      ev.nonidle[j] = 0;
    }
  }

  // Queue update.
  state.waiting = pool;
  for (int i = 0; i < num_types; ++i) {
    int64_t served = 0;
    for (ServerId j = 0; j < num_servers; ++j) {
      if (ev.completed[j] == i && ev.nonidle[j]) served += 1;
    }
    state.queue[i] += arrivals[i] - served;
  }
  state.t += 1;
}

TrajectoryChecker::TrajectoryChecker(const SystemConfig& cfg)
    : cfg_(cfg), pending_(cfg.num_servers) {}

void TrajectoryChecker::fail(const std::string& msg) {
  if (violations_ == 0) first_violation_ = msg;
  violations_ += 1;
}

void TrajectoryChecker::on_slot(const SystemState& before,
                                const SystemState& after,
                                const SlotEvents& ev) {
  const int num_types = cfg_.num_types;
  const int num_servers = cfg_.num_servers;
  const Slot t = ev.t;

  if (anchor_queue_.empty() || t - anchor_slot_ >= kAnchorStride) {
    anchor_queue_ = before.queue;
    anchor_slot_ = t;
  }

  for (int i = 0; i < num_types; ++i) {
    int64_t indicator_sum = 0;  // sum_j 1_{i,j}(t)
    int64_t served = 0;         // sum_j 1_{i,j}(t) eta_j(t)
    for (ServerId j = 0; j < num_servers; ++j) {
      if (ev.completed[j] == i) {
        indicator_sum += 1;
        if (ev.nonidle[j]) served += 1;
      }
    }
    const int64_t expected = before.queue[i] + ev.arrivals[i] - served;
    if (after.queue[i] != expected)
      fail("queue update identity broken at t=" + std::to_string(t));
    const int64_t envelope =
        std::max<int64_t>(num_servers, before.queue[i] + ev.arrivals[i] - indicator_sum);
    if (after.queue[i] > envelope)
      fail("queue envelope bound broken at t=" + std::to_string(t));
    if (after.queue[i] < before.queue[i] - num_servers ||
        after.queue[i] > before.queue[i] + cfg_.arrival_bound)
      fail("one-slot queue change bound broken at t=" + std::to_string(t));
    const Slot tau = t + 1 - anchor_slot_;
    if (after.queue[i] < anchor_queue_[i] - static_cast<int64_t>(num_servers) * tau ||
        after.queue[i] > anchor_queue_[i] + static_cast<int64_t>(cfg_.arrival_bound) * tau)
      fail("multi-slot queue drift bound broken at t=" + std::to_string(t));
  }

  // Waiting-queue consistency: Q - waiting equals the number of in-service
  // jobs per type, between 0 and J.
  std::vector<int64_t> in_service(num_types, 0);
  for (const ServerRecord& rec : after.servers) {
    if (rec.busy()) in_service[rec.assigned_type] += 1;
    if (rec.busy()) {
      if (rec.elapsed <= 0 || rec.remaining <= 0 ||
          rec.elapsed + rec.remaining > cfg_.service_bound)
        fail("server record out of range at t=" + std::to_string(t));
    } else if (rec.elapsed != 0 || rec.remaining != 0) {
      fail("idle server record not cleared at t=" + std::to_string(t));
    }
  }
  for (int i = 0; i < num_types; ++i) {
    const int64_t diff = after.queue[i] - after.waiting[i];
    if (diff != in_service[i] || diff < 0 || diff > num_servers)
      fail("waiting queue inconsistent at t=" + std::to_string(t));
    if (in_service[i] > after.queue[i])
      fail("more in-service jobs than queued at t=" + std::to_string(t));
    if (after.waiting[i] < 0) fail("negative waiting queue at t=" + std::to_string(t));
  }

  // Non-preemption and work conservation via the per-server job ledger.
  for (ServerId j = 0; j < num_servers; ++j) {
    Pending& p = pending_[j];
    const bool completed_now = ev.completed[j] != kNoType && ev.nonidle[j];
    if (p.type != kNoType) {
      if (!ev.started.empty()) {
        for (const StartedJob& s : ev.started)
          if (s.server == j) fail("busy server restarted at t=" + std::to_string(t));
      }
      if (ev.scheduled[j] != p.type)
        fail("in-flight job changed type at t=" + std::to_string(t));
      if (completed_now) {
        if (t != p.completes_at)
          fail("completion not exactly S slots after start at t=" + std::to_string(t));
        if (ev.completed_len[j] != p.length)
          fail("completed length mismatch at t=" + std::to_string(t));
        p = Pending{};
      } else if (t >= p.completes_at) {
        fail("job overdue at t=" + std::to_string(t));
      }
    }
  }
  for (const StartedJob& s : ev.started) {
    Pending& p = pending_[s.server];
    if (s.service_time == 1) {
      if (ev.completed[s.server] != s.type || ev.completed_len[s.server] != 1)
        fail("unit job did not complete in its start slot at t=" + std::to_string(t));
    } else {
      p.type = s.type;
      p.completes_at = t + s.service_time - 1;
      p.length = s.service_time;
    }
  }
}

}  // namespace qsched

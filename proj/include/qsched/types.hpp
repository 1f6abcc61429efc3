#ifndef QSCHED_TYPES_HPP
#define QSCHED_TYPES_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qsched {

using Slot = int64_t;
using TypeId = int32_t;
using ServerId = int32_t;

inline constexpr TypeId kNoType = -1;

/// Invalid user input: bad config file, bad parameters, bad CLI values.
/// Mapped to exit code 2 by the command-line front end.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A caller broke an API precondition (e.g. scheduling a busy server).
/// Mapped to exit code 3 by the command-line front end.
class ContractViolation : public std::logic_error {
 public:
  explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

/// Static description of a simulated instance: job types, servers, the
/// per-slot arrival bound, the service-time bound and the run length.
struct SystemConfig {
  int num_types = 1;       // I
  int num_servers = 1;     // J
  int arrival_bound = 1;   // U_A, jobs per slot per type
  int service_bound = 1;   // U_S, slots; every service time lies in [1, U_S]
  Slot horizon = 1;

  void validate() const {
    if (num_types < 1) throw ConfigError("num_types must be >= 1");
    if (num_servers < 1) throw ConfigError("num_servers must be >= 1");
    if (arrival_bound < 1) throw ConfigError("arrival_bound must be >= 1");
    if (service_bound < 1) throw ConfigError("service_bound must be >= 1");
    if (horizon < 1) throw ConfigError("horizon must be >= 1");
  }
};

/// One server's in-service job, if any. `elapsed` counts the slots the
/// current job has already been served; `remaining` the slots left until
/// completion. An idle record is all-zero with assigned_type == kNoType.
struct ServerRecord {
  TypeId assigned_type = kNoType;
  int elapsed = 0;
  int remaining = 0;

  bool busy() const { return assigned_type != kNoType; }
};

/// Dynamic state at the start of a slot. `queue[i]` counts every type-i job
/// in the system; `waiting[i]` counts those not yet assigned to a server.
struct SystemState {
  Slot t = 0;
  std::vector<int64_t> queue;    // Q_i
  std::vector<int64_t> waiting;  // waiting queue (Q minus in-service jobs)
  std::vector<ServerRecord> servers;

  int64_t total_queue() const {
    int64_t s = 0;
    for (int64_t q : queue) s += q;
    return s;
  }
};

SystemState make_initial_state(const SystemConfig& cfg);

struct StartedJob {
  ServerId server = 0;
  TypeId type = 0;
  int service_time = 0;
};

/// Everything observable about one slot. At most one completion indicator can
/// fire per server (for its scheduled type), so the indicator matrix is stored
/// as one entry per server. `completed[j]` is the type whose indicator fired
/// at server j (a real completion or an idle pick), and `nonidle[j]` is 0
/// exactly when server j idled. `completed_len[j]` carries the full service
/// time of a job that actually finished at server j this slot (0 otherwise);
/// schedulers may observe it since the job visibly occupied the server.
struct SlotEvents {
  Slot t = 0;
  std::vector<int64_t> arrivals;    // A_i(t)
  std::vector<TypeId> scheduled;    // type each server is scheduled to, per slot
  std::vector<StartedJob> started;
  std::vector<TypeId> completed;    // kNoType when no indicator fired
  std::vector<int32_t> completed_len;
  std::vector<uint8_t> nonidle;     // eta_j(t)

  bool indicator(TypeId i, ServerId j) const { return completed[j] == i; }
};

}  // namespace qsched

#endif  // QSCHED_TYPES_HPP

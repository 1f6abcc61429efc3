#ifndef QSCHED_RANDOM_HPP
#define QSCHED_RANDOM_HPP

#include <cstdint>
#include <random>

namespace qsched {

/// Stream roles for counter-based seed derivation. Every consumer of
/// randomness in a run gets its own child stream keyed by (role, a, b), so
/// adding or removing one consumer never perturbs the draws seen by another.
enum class StreamRole : uint32_t {
  kArrival = 1,   // (role, type, 0)
  kService = 2,   // (role, type, server)
  kPolicy = 3,    // (role, policy slot-0 picks / random policy / tie-breaks)
  kMisc = 4,
};

uint64_t splitmix64(uint64_t& state);

/// Child seed for stream (role, a, b) under a run seed. The key is packed
/// into one 64-bit word and whitened through two SplitMix64 steps.
uint64_t stream_seed(uint64_t run_seed, StreamRole role, uint32_t a, uint32_t b);

/// Root seed of run `run_index` within an experiment seeded by `root_seed`.
uint64_t run_seed(uint64_t root_seed, uint32_t run_index);

/// mt19937_64 wrapper with hand-rolled variate mappings. std::*_distribution
/// adapters are implementation-defined; these mappings are pinned so seeded
/// sequences are reproducible bit-for-bit.
class Rng {
 public:
  Rng() : engine_(0) {}
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n), n >= 1. Rejection-free; the modulo bias is
  /// below 2^-32 for the small n used here.
  int64_t uniform_int(int64_t n) { return static_cast<int64_t>(engine_() % static_cast<uint64_t>(n)); }

  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace qsched

#endif  // QSCHED_RANDOM_HPP

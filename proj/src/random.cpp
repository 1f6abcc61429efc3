#include "qsched/random.hpp"

namespace qsched {

uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

uint64_t stream_seed(uint64_t run_seed, StreamRole role, uint32_t a, uint32_t b) {
  uint64_t key = (static_cast<uint64_t>(role) << 48) |
                 (static_cast<uint64_t>(a & 0xFFFFFFu) << 24) |
                 static_cast<uint64_t>(b & 0xFFFFFFu);
  uint64_t s = run_seed;
  uint64_t mixed = splitmix64(s) ^ key;
  return splitmix64(mixed);
}

uint64_t run_seed(uint64_t root_seed, uint32_t run_index) {
  uint64_t s = root_seed;
  uint64_t first = splitmix64(s);
  uint64_t mixed = first ^ (0xA5A5A5A500000000ULL | run_index);
  return splitmix64(mixed);
}

}  // namespace qsched

#pragma once

#include <cstdint>

namespace consecrm {

// splitmix64 finalizer. Used both as the step function of RandomStream and as
// the mixing primitive for derived per-(episode, period, resource) streams,
// so every draw is a pure function of its key and replays bit-identically.
inline std::uint64_t hash64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  return hash64(a ^ (0x632be59bd9b4e019ULL + (b << 1)));
}

inline double to_unit(std::uint64_t u) {
  // 53 mantissa bits -> [0, 1)
  return static_cast<double>(u >> 11) * 0x1.0p-53;
}

// Sequential splitmix64 stream for bulk draws (instance generation).
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  double uniform01() { return to_unit(next_u64()); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer in [lo, hi], inclusive. Rejection keeps it unbiased.
  long uniform_int(long lo, long hi) {
    const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
    if (range == 0) return lo + static_cast<long>(next_u64());  // full 64-bit span
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % range + 1) % range;
    std::uint64_t draw = next_u64();
    while (draw > limit) draw = next_u64();
    return lo + static_cast<long>(draw % range);
  }

 private:
  std::uint64_t state_;
};

// Purpose tags for the per-episode derived streams. Each (episode, period,
// resource, purpose) key owns an independent draw, which keeps resource-level
// randomness structurally independent and episodes replayable.
enum class Draw : std::uint64_t {
  arrival = 1,     // per (episode, period)
  proposal = 2,    // per (episode, period, resource)
  downdate = 3,    // per (episode, period, resource)
  assortment = 4,  // per (episode, period, resource)
  customer = 5,    // per (episode, period)
  coupler = 6,     // per (episode, period, resource)
};

struct EpisodeRng {
  std::uint64_t episode_seed = 0;

  double uniform(int period, int resource, Draw purpose) const {
    std::uint64_t key = mix(episode_seed, static_cast<std::uint64_t>(period));
    key = mix(key, static_cast<std::uint64_t>(resource));
    key = mix(key, static_cast<std::uint64_t>(purpose));
    return to_unit(hash64(key));
  }
};

inline std::uint64_t episode_seed(std::uint64_t base_seed, long episode_index) {
  return mix(base_seed, static_cast<std::uint64_t>(episode_index));
}

}  // namespace consecrm

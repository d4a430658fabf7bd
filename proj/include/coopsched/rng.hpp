#pragma once

#include <cstdint>
#include <random>

namespace coopsched {

using Rng = std::mt19937_64;

// Independent random streams of one trace. Environment streams never depend on the policy,
// so different policies see identical context/channel paths for the same trace index.
enum class StreamTag : std::uint64_t {
  kContext = 1,
  kChannel = 2,
  kGain = 3,
  kPolicy = 4,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t trace_index,
                                    StreamTag tag) noexcept {
  std::uint64_t h = splitmix64(base_seed);
  h = splitmix64(h ^ trace_index);
  return splitmix64(h ^ static_cast<std::uint64_t>(tag));
}

/// Seed identity of one Monte Carlo trace.
struct TraceSeed {
  std::uint64_t base_seed = 0;
  std::uint64_t trace_index = 0;

  Rng stream(StreamTag tag) const { return Rng(derive_seed(base_seed, trace_index, tag)); }
};

}  // namespace coopsched

#pragma once

#include <cstdint>
#include <random>

namespace phaseret {

/// SplitMix64 finalizer. Used only to derive stream seeds; never as a generator.
constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Named stream tags. Every random draw in the library comes from
/// `stream(seed, tag, index)`, so parallel work units never share a generator
/// and results do not depend on scheduling.
enum class Stream : std::uint64_t {
  Complement = 1,
  OnbRotation = 2,
  Projections = 3,
  SpanningRestart = 4,
  PrRestart = 5,
  HermitianRestart = 6,
  SpotCheck = 7,
  Survey = 8,
  RandomFrame = 9,
  TestData = 99,
};

/// Generator for work unit `index` of stream `tag` under the master `seed`.
inline std::mt19937_64 stream(std::uint64_t seed, Stream tag, std::uint64_t index = 0) {
  const std::uint64_t s =
      splitmix64(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(tag))) + index);
  return std::mt19937_64(s);
}

/// Child seed for a nested operation that takes its own seed argument.
inline std::uint64_t derive_seed(std::uint64_t seed, Stream tag, std::uint64_t index = 0) {
  return splitmix64(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(tag))) + index) ^
         0xa5a5a5a5a5a5a5a5ULL;
}

}  // namespace phaseret

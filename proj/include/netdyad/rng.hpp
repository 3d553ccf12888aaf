#pragma once

#include <cstdint>
#include <random>

namespace netdyad {

// Seedable generator with a fixed, platform-independent output stream.
//
// The engine is std::mt19937_64, whose sequence is pinned by the standard.
// Distributions are implemented here rather than taken from <random>, since
// the standard library distributions are not required to produce the same
// values across implementations.
//
// Stream splitting: substream(base, stream, phase) seeds a fresh engine from
// splitmix64(base ^ mix(stream) ^ mix(phase)). Each structural phase of a
// replication (graph, covariates, errors) uses its own phase tag so adding
// draws to one phase never perturbs another.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  static Rng substream(std::uint64_t base_seed, std::uint64_t stream,
                       std::uint64_t phase = 0);

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform();

  // Uniform on (0, 1]; safe as a log() argument.
  double uniform_open_low();

  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n);

  // Standard normal draw (Marsaglia polar method).
  double normal();

 private:
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace netdyad

#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "factest/types.hpp"

namespace factest {

/// Identifies one independent random stream. Equal keys always produce
/// the same sequence; the stream does not depend on how many other streams
/// were created before it or on which thread consumes it.
struct StreamKey {
  std::uint64_t seed = 0;
  std::string domain;
  std::uint64_t index = 0;
};

inline constexpr std::uint64_t kDefaultSeed = 42;

/// xoshiro256** generator whose state is derived from a StreamKey by
/// SplitMix64 mixing of (seed, FNV-1a(domain), index).
///
/// Normal deviates use the Box-Muller transform on 53-bit uniforms, both
/// outputs of each pair consumed in order (cos branch first). This choice
/// fixes every downstream number for a given seed.
class Stream {
 public:
  explicit Stream(const StreamKey& key);

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 bits of resolution.
  double next_uniform();
  double next_normal();

 private:
  std::array<std::uint64_t, 4> state_{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// `length` i.i.d. N(0, 1) deviates fully determined by `key`.
Vector standard_normal_vector(const StreamKey& key, Index length);

/// `length` i.i.d. U[lo, hi) deviates fully determined by `key`.
Vector uniform_vector(const StreamKey& key, Index length, double lo, double hi);

/// A 64-bit seed derived from `key`, used to hand a fresh seed to nested
/// procedures (e.g. the bootstrap inside one Monte Carlo replication).
std::uint64_t derive_seed(const StreamKey& key);

}  // namespace factest

#include "factest/random.hpp"

#include <cmath>
#include <numbers>

#include "factest/errors.hpp"

namespace factest {
namespace {

constexpr std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

std::uint64_t key_hash(const StreamKey& key) {
  std::uint64_t x = key.seed;
  std::uint64_t h = splitmix64(x);
  x = h ^ fnv1a(key.domain);
  h = splitmix64(x);
  x = h ^ key.index;
  return splitmix64(x);
}

}  // namespace

Stream::Stream(const StreamKey& key) {
  std::uint64_t x = key_hash(key);
  for (auto& s : state_) s = splitmix64(x);
  // xoshiro must not start from the all-zero state
  if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
}

std::uint64_t Stream::next_u64() {
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double Stream::next_uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Stream::next_normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // u1 in (0, 1] keeps the logarithm finite
  const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  const double u2 = next_uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

Vector standard_normal_vector(const StreamKey& key, Index length) {
  if (length <= 0) throw InvalidArgument("standard_normal_vector: length must be positive");
  Stream stream(key);
  Vector out(length);
  for (Index i = 0; i < length; ++i) out[i] = stream.next_normal();
  return out;
}

Vector uniform_vector(const StreamKey& key, Index length, double lo, double hi) {
  if (length <= 0) throw InvalidArgument("uniform_vector: length must be positive");
  if (!(lo < hi)) throw InvalidArgument("uniform_vector: requires lo < hi");
  Stream stream(key);
  Vector out(length);
  const double width = hi - lo;
  for (Index i = 0; i < length; ++i) out[i] = lo + width * stream.next_uniform();
  return out;
}

std::uint64_t derive_seed(const StreamKey& key) {
  Stream stream(key);
  return stream.next_u64();
}

}  // namespace factest

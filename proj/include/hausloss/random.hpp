#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace hausloss {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t hash_tag(std::string_view tag) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Counter-based stream keyed by (seed, index, purpose tag). Streams with
/// different keys are independent, so any corpus item can be regenerated
/// alone. Distributions are computed here rather than through <random> so
/// the draws are identical across standard libraries.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t index, std::string_view tag)
      : key_(splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL) ^ hash_tag(tag))) {}

  std::uint64_t next() { return splitmix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [lo, hi].
  long long integer(long long lo, long long hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<long long>(next() % span);
  }
  double normal() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace hausloss

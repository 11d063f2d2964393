#pragma once

#include <cstdint>

// Counter-based deterministic randomness. Every random quantity in the
// library is a pure function of a 64-bit key, so experiments reproduce
// bit-for-bit regardless of scheduling.

namespace fpp::rng {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  return splitmix64(a ^ (b * kGolden + 0x7f4a7c159e3779b9ULL));
}

inline std::uint64_t mix(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return mix(mix(a, b), c);
}

// Uniform on (0,1); never returns 0 or 1 so inverse-CDF transforms are safe.
inline double to_unit(std::uint64_t bits) {
  double u = static_cast<double>(bits >> 11) * 0x1.0p-53;
  if (u <= 0.0) u = 0x1.0p-53;
  if (u >= 1.0) u = 1.0 - 0x1.0p-53;
  return u;
}

// Stateful stream for the places that want a sequence of draws.
class Stream {
 public:
  explicit Stream(std::uint64_t key) : key_(key) {}

  std::uint64_t next_bits() { return splitmix64(key_ + (counter_++) * kGolden); }
  double next_unit() { return to_unit(next_bits()); }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

inline std::uint64_t hash_string(const char* s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (; *s; ++s) h = (h ^ static_cast<unsigned char>(*s)) * 0x100000001b3ULL;
  return h;
}

}  // namespace fpp::rng

#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace dda {

// All randomness in a run derives from one master seed split into named
// streams ("network", "data", "noise", ...). Streams with distinct names are
// statistically independent and stable across runs.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::mt19937_64 make_stream(std::uint64_t master_seed, std::string_view name) {
  return std::mt19937_64(splitmix64(master_seed ^ fnv1a(name)));
}

}  // namespace dda

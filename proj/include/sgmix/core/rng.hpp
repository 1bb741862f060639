#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace sgmix {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 0xCBF29CE484222325ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

// Seed of the substream `name`/`index` under `master`. Names follow the
// "stage:component:shard" convention, e.g. derive_seed(s, "refine:F", 3).
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view name, std::uint64_t index = 0) {
  std::uint64_t h = splitmix64(master ^ fnv1a(name));
  return splitmix64(h + splitmix64(index + 0x632BE59BD9B4E019ULL));
}

inline std::uint64_t derive_seed(std::uint64_t master, std::string_view name, std::uint64_t i,
                                 std::uint64_t j) {
  return derive_seed(derive_seed(master, name, i), "sub", j);
}

using Rng = std::mt19937_64;

}  // namespace sgmix

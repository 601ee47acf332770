#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace qbands {

/// All stochastic paths draw from a 64-bit Mersenne Twister.
using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for an independent stream: folds each label into the master seed with
/// splitmix64, so streams depend only on (master, labels) and never on how
/// many other streams exist.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> labels) {
  std::uint64_t s = splitmix64(master);
  for (std::uint64_t l : labels) s = splitmix64(s ^ splitmix64(l + 0x632be59bd9b4e019ULL));
  return s;
}

}  // namespace qbands

#pragma once

#include <cstdint>
#include <random>

namespace magnav {

/// splitmix64 mixing step; used to derive independent stream seeds from a
/// master seed so that every stochastic draw is pinned by one number.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for sub-stream `stream` of `master`. Re-deriving with the same
/// arguments always yields the same seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(splitmix64(master) ^ splitmix64(stream));
}

using Rng = std::mt19937_64;

}  // namespace magnav

#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

namespace weakot {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent stream for trial `k` of a run seeded with `seed`; does not depend on execution order.
inline std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t k, std::uint64_t salt = 0) {
  return std::mt19937_64(splitmix64(splitmix64(seed ^ (salt * 0xd1b54a32d192ed03ULL)) + k));
}

// Dirichlet(a, ..., a) on n points.
template <class Rng>
std::vector<double> dirichlet(Rng& rng, std::size_t n, double a = 1.0) {
  std::gamma_distribution<double> g(a, 1.0);
  std::vector<double> w(n);
  double s = 0.0;
  for (double& v : w) s += (v = g(rng));
  if (s <= 0.0) {
    std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(n));
    return w;
  }
  for (double& v : w) v /= s;
  return w;
}

template <class Rng>
double uniform(Rng& rng, double a, double b) {
  return std::uniform_real_distribution<double>(a, b)(rng);
}

template <class Rng>
std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

} // namespace weakot

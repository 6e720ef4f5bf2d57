#pragma once

#include <cstdint>
#include <random>

#include "core.hpp"

namespace semideg {

// independent stream per (seed, draw) so threaded runs stay reproducible
inline std::mt19937_64 draw_rng(std::uint64_t seed, std::uint64_t draw) {
  std::seed_seq s{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                  static_cast<std::uint32_t>(draw), static_cast<std::uint32_t>(draw >> 32)};
  return std::mt19937_64(s);
}

template <class Rng>
double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// traceless, Re in [-re, re], Im in [-im, im] before centering
template <class Rng>
ThetaVector random_theta(int N, Rng& rng, double re = 0.3, double im = 0.1) {
  Vec v(N);
  for (int i = 0; i < N; ++i) v(i) = cplx(uniform(rng, -re, re), uniform(rng, -im, im));
  return traceless(v);
}

template <class Rng>
cplx random_charge(Rng& rng) {
  return {uniform(rng, 0.15, 0.85), uniform(rng, -0.1, 0.1)};
}

}  // namespace semideg

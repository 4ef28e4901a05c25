#pragma once

#include <cmath>
#include <random>

#include "holo/field.hpp"

namespace testutil {

inline holo::ComplexField random_field(std::size_t w, std::size_t h, unsigned seed,
                                       double pitch = 8e-6) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  holo::ComplexField f(w, h, pitch);
  for (auto& v : f.values()) v = {n(rng), n(rng)};
  return f;
}

inline holo::RealGrid random_grid(std::size_t w, std::size_t h, unsigned seed, double lo = -1.0,
                                  double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  holo::RealGrid g(w, h);
  for (auto& v : g.values()) v = u(rng);
  return g;
}

inline double max_abs_diff(std::span<const holo::Complex> a, std::span<const holo::Complex> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double norm(std::span<const holo::Complex> a) {
  double s = 0.0;
  for (auto v : a) s += std::norm(v);
  return std::sqrt(s);
}

}  // namespace testutil

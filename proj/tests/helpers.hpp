#pragma once

#include <cmath>

#include "lagpot/lagalg.hpp"

namespace testutil {

using namespace lagpot;

inline RealMatrix random_symmetric(std::size_t d, SplitMix64& rng, double scale = 1.0) {
  RealMatrix m(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) m(i, j) = m(j, i) = scale * rng.gaussian();
  return m;
}

inline SymForm random_form(std::size_t n, SplitMix64& rng, double scale = 1.0) {
  return SymForm(random_symmetric(2 * n, rng, scale));
}

inline RealMatrix random_psd(std::size_t d, SplitMix64& rng) {
  RealMatrix g(d, d);
  for (double& v : g.data()) v = rng.gaussian();
  return g * g.transpose();
}

/// Random traceless J-commuting form: realification of a traceless hermitian.
inline SymForm random_edge(std::size_t n, SplitMix64& rng) {
  ComplexMatrix h(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const Complex v(rng.gaussian(), i == j ? 0.0 : rng.gaussian());
      h(i, j) = v;
      h(j, i) = std::conj(v);
    }
  Complex tr{};
  for (std::size_t i = 0; i < n; ++i) tr += h(i, i);
  for (std::size_t i = 0; i < n; ++i) h(i, i) -= tr / static_cast<double>(n);
  return SymForm(realify(h));
}

inline double rel_gap(double a, double b, double abs_floor = 1e-9) {
  const double d = std::abs(a - b);
  if (d <= abs_floor) return 0.0;
  return d / std::max(std::abs(a), std::abs(b));
}

inline double max_diff(const RealMatrix& a, const RealMatrix& b) { return max_abs(a - b); }

}  // namespace testutil

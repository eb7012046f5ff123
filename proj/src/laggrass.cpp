#include "lagpot/laggrass.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lagpot {

LagFrame::LagFrame(RealMatrix columns, double tol) : cols_(std::move(columns)) {
  const std::size_t n = cols_.cols();
  if (n == 0 || cols_.rows() != 2 * n)
    throw Error(ErrorCode::InvalidArgument, "LagFrame needs n columns in R^{2n}");
  for (std::size_t i = 0; i < n; ++i) {
    const Vector ui = cols_.column(i);
    const Vector jui = apply_j(ui);
    for (std::size_t j = 0; j < n; ++j) {
      const Vector uj = cols_.column(j);
      if (std::abs(dot(ui, uj) - (i == j ? 1.0 : 0.0)) > tol)
        throw Error(ErrorCode::InvalidArgument, "LagFrame columns are not orthonormal");
      if (std::abs(dot(jui, uj)) > tol)
        throw Error(ErrorCode::InvalidArgument, "LagFrame is not isotropic");
    }
  }
}

RealMatrix LagFrame::projection() const { return cols_ * cols_.transpose(); }

std::vector<int> sign_vector(std::size_t bits, std::size_t n) {
  std::vector<int> eps(n);
  for (std::size_t j = 0; j < n; ++j) eps[j] = (bits >> j) & 1U ? -1 : 1;
  return eps;
}

LagFrame random_lag_frame(std::size_t n, SplitMix64& rng) {
  const RealMatrix g = haar_symplectic_orthogonal(n, rng);
  RealMatrix cols(2 * n, n);
  for (std::size_t j = 0; j < n; ++j) cols.set_column(j, g.column(2 * j));
  return LagFrame(std::move(cols));
}

LagFrame random_lag_frame(std::size_t n, std::uint64_t seed) {
  SplitMix64 rng(seed);
  return random_lag_frame(n, rng);
}

LagFrame axis_frame(const RealMatrix& unitary_frame, std::span<const int> eps) {
  const std::size_t n = eps.size();
  RealMatrix cols(2 * n, n);
  for (std::size_t j = 0; j < n; ++j) cols.set_column(j, unitary_frame.column(eps[j] > 0 ? 2 * j : 2 * j + 1));
  return LagFrame(std::move(cols), 1e-8);
}

LagFrame standard_axis_frame(std::span<const int> eps) {
  const std::size_t n = eps.size();
  RealMatrix cols(2 * n, n);
  for (std::size_t j = 0; j < n; ++j) cols(eps[j] > 0 ? 2 * j : 2 * j + 1, j) = 1.0;
  return LagFrame(std::move(cols));
}

double trace_on_plane(const SymForm& a, const LagFrame& w) {
  if (a.n() != w.n()) throw Error(ErrorCode::InvalidArgument, "trace_on_plane: dimension mismatch");
  double s = 0.0;
  for (std::size_t j = 0; j < w.n(); ++j) {
    const Vector u = w.column(j);
    s += dot(a.matrix() * u, u);
  }
  return s;
}

double projected_norm2(std::span<const double> g, const LagFrame& w) {
  double s = 0.0;
  for (std::size_t j = 0; j < w.n(); ++j) {
    const double c = dot(g, w.column(j));
    s += c * c;
  }
  return s;
}

SampledMin sampled_min_trace_random(const SymForm& a, std::size_t count, std::uint64_t seed) {
  if (count == 0) throw Error(ErrorCode::InvalidArgument, "sampled_min_trace: count must be >= 1");
  const SplitMix64 root(seed);
  SampledMin best{std::numeric_limits<double>::infinity(), {}};
  for (std::size_t i = 0; i < count; ++i) {
    SplitMix64 stream = root.split(i);
    LagFrame w = random_lag_frame(a.n(), stream);
    const double v = trace_on_plane(a, w);
    if (v < best.min) best = {v, std::move(w)};
  }
  return best;
}

SampledMin sampled_min_trace(const SymForm& a, std::size_t count, std::uint64_t seed, std::size_t cap) {
  if (a.n() > cap) throw Error(ErrorCode::DimensionTooLarge, "sampled_min_trace: 2^n exceeds the cap");
  SampledMin best = sampled_min_trace_random(a, count, seed);
  const LagSpectrum s = lag_spectrum(a);
  for (std::size_t bits = 0; bits < (std::size_t{1} << a.n()); ++bits) {
    LagFrame w = axis_frame(s.frame, sign_vector(bits, a.n()));
    const double v = trace_on_plane(a, w);
    if (v < best.min) best = {v, std::move(w)};
  }
  return best;
}

SymForm axis_plane_projection(std::span<const int> eps) {
  const std::size_t n = eps.size();
  RealMatrix p(2 * n, 2 * n);
  for (std::size_t j = 0; j < n; ++j) {
    if (eps[j] != 1 && eps[j] != -1) throw Error(ErrorCode::InvalidArgument, "sign entries must be +-1");
    p(2 * j, 2 * j) = 0.5 + 0.5 * eps[j];
    p(2 * j + 1, 2 * j + 1) = 0.5 - 0.5 * eps[j];
  }
  return SymForm(std::move(p));
}

SymForm diag_matrix(const DiagPoint& p) {
  const std::size_t n = p.lambda.size();
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "DiagPoint needs n >= 1");
  RealMatrix h(2 * n, 2 * n);
  const double base = p.t / (2.0 * static_cast<double>(n));
  for (std::size_t j = 0; j < n; ++j) {
    h(2 * j, 2 * j) = base + p.lambda[j];
    h(2 * j + 1, 2 * j + 1) = base - p.lambda[j];
  }
  return SymForm(std::move(h));
}

DiagFlags diag_membership(const DiagPoint& p, double tol) {
  const std::size_t n = p.lambda.size();
  const SymForm h = diag_matrix(p);
  DiagFlags f;
  double sup = 0.0;
  double sum = 0.0;
  for (double l : p.lambda) {
    sup = std::max(sup, std::abs(l));
    sum += std::abs(l);
  }
  f.in_P_plus_D = sup <= p.t / (2.0 * static_cast<double>(n)) + tol;
  f.in_P_sup_D = sum <= 0.5 * p.t + tol;
  f.pairings.resize(std::size_t{1} << n);
  for (std::size_t bits = 0; bits < f.pairings.size(); ++bits)
    f.pairings[bits] = frobenius_inner(h.matrix(), axis_plane_projection(sign_vector(bits, n)).matrix());
  return f;
}

}  // namespace lagpot

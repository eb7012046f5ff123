#include "lagpot/pluriharm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lagpot {

void HermQuadratic::validate() const {
  const std::size_t m = b.size();
  if (m == 0 || a.rows() != m || a.cols() != m)
    throw Error(ErrorCode::InvalidArgument, "HermQuadratic: A must be n x n with n = len(b) >= 1");
  double scale = 1.0;
  for (const Complex& v : a.data()) scale = std::max(scale, std::abs(v));
  Complex tr{};
  for (std::size_t i = 0; i < m; ++i) {
    tr += a(i, i);
    for (std::size_t j = 0; j < m; ++j)
      if (std::abs(a(i, j) - std::conj(a(j, i))) > 1e-12 * scale)
        throw Error(ErrorCode::InvalidArgument, "HermQuadratic: A is not hermitian");
  }
  if (std::abs(tr) > 1e-12 * scale) throw Error(ErrorCode::InvalidArgument, "HermQuadratic: A is not traceless");
}

namespace {

std::vector<Complex> to_complex(std::span<const double> z) {
  std::vector<Complex> w(z.size() / 2);
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = Complex(z[2 * k], z[2 * k + 1]);
  return w;
}

double quadratic_part(const ComplexMatrix& a, std::span<const double> z) {
  const std::vector<Complex> w = to_complex(z);
  Complex s{};
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = 0; j < w.size(); ++j) s += a(i, j) * w[i] * std::conj(w[j]);
  return 0.5 * s.real();
}

}  // namespace

double eval_quadratic(const HermQuadratic& h, std::span<const double> z) {
  if (z.size() != 2 * h.n()) throw Error(ErrorCode::InvalidArgument, "eval_quadratic: dimension mismatch");
  const std::vector<Complex> w = to_complex(z);
  double v = h.c;
  for (std::size_t k = 0; k < w.size(); ++k) v += 2.0 * (h.b[k] * w[k]).real();
  return v + quadratic_part(h.a, z);
}

SymForm real_hessian(const HermQuadratic& h) {
  const std::size_t d = 2 * h.n();
  // Polarization of the quadratic part q(v) = (1/2) v^t M v.
  auto q = [&](std::size_t p, std::size_t r) {
    Vector v(d, 0.0);
    v[p] += 1.0;
    if (r < d) v[r] += 1.0;
    return quadratic_part(h.a, v);
  };
  RealMatrix m(d, d);
  for (std::size_t p = 0; p < d; ++p) {
    m(p, p) = 2.0 * q(p, d);
    for (std::size_t r = p + 1; r < d; ++r) m(p, r) = m(r, p) = q(p, r) - q(p, d) - q(r, d);
  }
  return SymForm(std::move(m));
}

HermQuadratic quadratic_from_edge(const SymForm& edge, double tol) {
  const Decomposition dec = decompose(edge);
  const double scale = 1.0 + edge.norm();
  if (dec.skew.norm() > tol * scale || std::abs(edge.trace()) > tol * scale)
    throw Error(ErrorCode::InvalidArgument, "quadratic_from_edge: form is not in the edge");
  const std::size_t n = edge.n();
  HermQuadratic h{0.0, std::vector<Complex>(n), ComplexMatrix(n, n)};
  // B is the realification of a complex hermitian H; the quadratic
  // coefficients are a_ij = H_ji.
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) {
      const Complex hjk(0.5 * (edge(2 * j, 2 * k) + edge(2 * j + 1, 2 * k + 1)),
                        0.5 * (edge(2 * j + 1, 2 * k) - edge(2 * j, 2 * k + 1)));
      h.a(k, j) = hjk;
    }
  return h;
}

std::vector<Complex> linear_coefficients(std::span<const double> l) {
  std::vector<Complex> b(l.size() / 2);
  for (std::size_t k = 0; k < b.size(); ++k) b[k] = Complex(0.5 * l[2 * k], -0.5 * l[2 * k + 1]);
  return b;
}

ViolationCertificate dual_violation_certificate(const SymForm& phi_hessian, std::span<const double> z0,
                                                double phi_value, std::span<const double> phi_gradient) {
  const std::size_t d = phi_hessian.dim();
  if (z0.size() != d || (!phi_gradient.empty() && phi_gradient.size() != d))
    throw Error(ErrorCode::InvalidArgument, "dual_violation_certificate: dimension mismatch");
  const SymForm neg = -phi_hessian;
  if (!(lambda_min(neg) > 0.0))
    throw Error(ErrorCode::NotAViolation, "test jet does not violate the dual cone");
  IntDecomposition dec = int_decompose(neg);

  // h(z) = phi0 + <g, z - z0> - (1/2)<B (z - z0), z - z0>.
  const Vector bz0 = dec.edge.matrix() * Vector(z0.begin(), z0.end());
  Vector lin(d, 0.0);
  double c = phi_value - 0.5 * dot(bz0, z0);
  for (std::size_t i = 0; i < d; ++i) {
    const double g = phi_gradient.empty() ? 0.0 : phi_gradient[i];
    lin[i] = g + bz0[i];
    c -= g * z0[i];
  }
  HermQuadratic h = quadratic_from_edge(-dec.edge);
  h.c = c;
  h.b = linear_coefficients(lin);
  return ViolationCertificate{std::move(h), std::move(dec.edge), std::move(dec.positive), dec.margin};
}

double eval_hull_witness(const HullWitness& w, std::span<const double> z) {
  Vector dz(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) dz[i] = z[i] - w.center[i];
  return 0.5 * dot(w.hessian.matrix() * dz, dz);
}

HullResult sampled_hull_test(const std::vector<Vector>& k, std::span<const double> x, std::size_t samples,
                             std::uint64_t seed) {
  if (k.empty()) throw Error(ErrorCode::InvalidArgument, "sampled_hull_test: K must be nonempty");
  const std::size_t d = x.size();
  if (d == 0 || d % 2 != 0) throw Error(ErrorCode::InvalidArgument, "sampled_hull_test: point must lie in R^{2n}");
  for (const Vector& p : k)
    if (p.size() != d) throw Error(ErrorCode::InvalidArgument, "sampled_hull_test: dimension mismatch");
  const std::size_t n = d / 2;

  double spread = 0.0;
  for (const Vector& p : k)
    for (std::size_t i = 0; i < d; ++i) spread = std::max(spread, std::abs(p[i] - x[i]));
  spread = std::max(spread, 1e-6);

  const SplitMix64 root(seed);
  for (std::size_t s = 0; s < samples; ++s) {
    SplitMix64 rng = root.split(s);
    // Edge part: realification of a random traceless hermitian matrix.
    ComplexMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        const Complex v(rng.gaussian(), i == j ? 0.0 : rng.gaussian());
        a(i, j) = v;
        a(j, i) = std::conj(v);
      }
    Complex tr{};
    for (std::size_t i = 0; i < n; ++i) tr += a(i, i);
    for (std::size_t i = 0; i < n; ++i) a(i, i) -= tr / static_cast<double>(n);
    HermQuadratic eq{0.0, std::vector<Complex>(n), a};
    const double edge_weight = (s % 2 == 0) ? 0.0 : rng.uniform();
    RealMatrix hm = edge_weight * real_hessian(eq).matrix();
    RealMatrix g(d, d);
    for (double& v : g.data()) v = rng.gaussian();
    hm += g * g.transpose() * (1.0 / static_cast<double>(d));
    const double nh = frobenius_norm(hm);
    hm *= 1.0 / nh;

    HullWitness w{SymForm(std::move(hm)), Vector(d), 0.0, 0.0};
    for (std::size_t i = 0; i < d; ++i) w.center[i] = x[i] + spread * rng.gaussian();
    w.value_at_x = eval_hull_witness(w, x);
    double mk = -std::numeric_limits<double>::infinity();
    for (const Vector& p : k) mk = std::max(mk, eval_hull_witness(w, p));
    w.max_on_k = mk;
    if (w.value_at_x > mk + 1e-9) return w;
  }
  return HullUndecided{};
}

FreenessResult freeness(const RealMatrix& basis, double tol) {
  if (basis.rows() == 0 || basis.rows() % 2 != 0 || basis.cols() > basis.rows())
    throw Error(ErrorCode::InvalidArgument, "freeness: basis must be 2n x k with k <= 2n");
  RealMatrix perp = RealMatrix::identity(basis.rows());
  if (basis.cols() > 0) {
    const RealMatrix q = orthonormalize_columns(basis);
    perp -= q * q.transpose();
  }
  const double l1 = lambda_min(SymForm(std::move(perp)));
  return FreenessResult{l1, l1 > tol};
}

}  // namespace lagpot

#include "lagpot/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "lagpot/laggrass.hpp"

namespace lagpot {

namespace {

void combinations(std::size_t dim, std::size_t p, std::size_t start, std::vector<std::size_t>& cur,
                  std::vector<std::vector<std::size_t>>& out) {
  if (cur.size() == p) {
    out.push_back(cur);
    return;
  }
  for (std::size_t i = start; i + (p - cur.size()) <= dim; ++i) {
    cur.push_back(i);
    combinations(dim, p, i + 1, cur, out);
    cur.pop_back();
  }
}

void check_exterior_cap(std::size_t n, std::size_t cap) {
  if (n > cap)
    throw Error(ErrorCode::DimensionTooLarge,
                "exterior power too large for n = " + std::to_string(n) + " (cap " + std::to_string(cap) + ")");
}

}  // namespace

ExteriorBasis::ExteriorBasis(std::size_t dim, std::size_t p) : dim_(dim), p_(p) {
  if (p > dim) throw Error(ErrorCode::InvalidArgument, "exterior degree exceeds dimension");
  std::vector<std::size_t> cur;
  combinations(dim, p, 0, cur, sets_);
}

std::size_t ExteriorBasis::index_of(const std::vector<std::size_t>& sorted) const {
  const auto it = std::lower_bound(sets_.begin(), sets_.end(), sorted);
  if (it == sets_.end() || *it != sorted) return sets_.size();
  return static_cast<std::size_t>(it - sets_.begin());
}

Vector ExteriorBasis::wedge(const RealMatrix& vectors) const {
  if (vectors.rows() != dim_ || vectors.cols() != p_)
    throw Error(ErrorCode::InvalidArgument, "wedge: shape mismatch");
  Vector xi(sets_.size());
  RealMatrix minor(p_, p_);
  for (std::size_t s = 0; s < sets_.size(); ++s) {
    for (std::size_t r = 0; r < p_; ++r)
      for (std::size_t c = 0; c < p_; ++c) minor(r, c) = vectors(sets_[s][r], c);
    xi[s] = real_det(minor);
  }
  return xi;
}

int sort_with_sign(std::vector<std::size_t>& idx) {
  int sign = 1;
  // Insertion sort counting transpositions; tiny inputs.
  for (std::size_t i = 1; i < idx.size(); ++i)
    for (std::size_t j = i; j > 0 && idx[j - 1] >= idx[j]; --j) {
      if (idx[j - 1] == idx[j]) return 0;
      std::swap(idx[j - 1], idx[j]);
      sign = -sign;
    }
  return sign;
}

RealMatrix derivation_matrix(const SymForm& h, const ExteriorBasis& basis, std::size_t cap) {
  check_exterior_cap(h.n(), cap);
  if (basis.dim() != h.dim()) throw Error(ErrorCode::InvalidArgument, "derivation_matrix: dimension mismatch");
  RealMatrix d(basis.size(), basis.size());
  std::vector<std::size_t> work;
  for (std::size_t col = 0; col < basis.size(); ++col) {
    const auto& set = basis.subset(col);
    for (std::size_t pos = 0; pos < set.size(); ++pos) {
      for (std::size_t k = 0; k < h.dim(); ++k) {
        const double coeff = h(k, set[pos]);
        if (coeff == 0.0) continue;
        work = set;
        work[pos] = k;
        const int sign = sort_with_sign(work);
        if (sign == 0) continue;
        d(basis.index_of(work), col) += sign * coeff;
      }
    }
  }
  return d;
}

double axis_restricted_det(const SymForm& a, std::size_t cap) {
  check_exterior_cap(a.n(), cap);
  const std::size_t n = a.n();
  const SymForm h = lag_part(a);
  const ExteriorBasis basis(2 * n, n);
  const RealMatrix d = derivation_matrix(h, basis, cap);
  const LagSpectrum s = lag_spectrum(a);
  const double scale = 1.0 + h.norm();
  double product = 1.0;
  for (std::size_t bits = 0; bits < (std::size_t{1} << n); ++bits) {
    const LagFrame w = axis_frame(s.frame, sign_vector(bits, n));
    const Vector xi = basis.wedge(w.columns());
    const Vector dxi = d * xi;
    const double eig = dot(dxi, xi) / dot(xi, xi);
    double res = 0.0;
    for (std::size_t i = 0; i < xi.size(); ++i) res += std::pow(dxi[i] - eig * xi[i], 2);
    if (std::sqrt(res) > 1e-6 * scale)
      throw Error(ErrorCode::FramePairingFailed, "axis wedge is not an eigenvector of the derivation");
    product *= eig;
  }
  return product;
}

PrimitiveReport primitive_check(const SymForm& a, std::size_t cap) {
  check_exterior_cap(a.n(), cap);
  const std::size_t n = a.n();
  const std::size_t dim = 2 * n;
  const ExteriorBasis basis(dim, n);
  const std::size_t N = basis.size();

  // Null space of omega ^ . : Lambda^n -> Lambda^{n+2}.
  RealMatrix nullbasis;
  if (n + 2 > dim) {
    nullbasis = RealMatrix::identity(N);
  } else {
    const ExteriorBasis target(dim, n + 2);
    RealMatrix w(target.size(), N);
    std::vector<std::size_t> work;
    for (std::size_t col = 0; col < N; ++col)
      for (std::size_t k = 0; k < n; ++k) {
        work = basis.subset(col);
        work.push_back(2 * k);
        work.push_back(2 * k + 1);
        // e_{x_k} ^ e_{y_k} ^ e_I: move the pair behind e_I (even shift, no sign).
        const int sign = sort_with_sign(work);
        if (sign == 0) continue;
        w(target.index_of(work), col) += sign;
      }
    const SymEigen g = sym_eigen(w.transpose() * w, 1e-9);
    const double top = g.values.empty() ? 0.0 : std::max(g.values.front(), 1.0);
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < N; ++i)
      if (g.values[i] <= 1e-9 * top) keep.push_back(i);
    nullbasis = RealMatrix(N, keep.size());
    for (std::size_t c = 0; c < keep.size(); ++c) nullbasis.set_column(c, g.vectors.column(keep[c]));
  }

  const RealMatrix d = derivation_matrix(lag_part(a), basis, cap);
  const RealMatrix dn = d * nullbasis;
  const RealMatrix nt = nullbasis.transpose();
  RealMatrix restricted = nt * dn;
  const RealMatrix leak = dn - nullbasis * restricted;

  PrimitiveReport r;
  r.primitive_dim = nullbasis.cols();
  r.invariance_residual = frobenius_norm(leak);
  for (std::size_t i = 0; i < restricted.rows(); ++i)
    for (std::size_t j = i + 1; j < restricted.cols(); ++j)
      restricted(i, j) = restricted(j, i) = 0.5 * (restricted(i, j) + restricted(j, i));
  const SymEigen e = sym_eigen(restricted, 1.0);
  r.primitive_eigenvalues = e.values;
  r.primitive_det = 1.0;
  for (double v : e.values) r.primitive_det *= v;

  const GardingData gd = garding_eigenvalues(a);
  const double tol = 1e-8 * (1.0 + a.norm());
  Vector asc(e.values.rbegin(), e.values.rend());
  std::size_t j = 0;
  bool ok = true;
  for (double g : gd.eigenvalues) {
    while (j < asc.size() && asc[j] < g - tol) ++j;
    if (j == asc.size() || std::abs(asc[j] - g) > tol) {
      ok = false;
      break;
    }
    ++j;
  }
  r.spectrum_contains_garding = ok;
  double prod = 1.0;
  for (double g : gd.eigenvalues) prod *= g;
  r.primitive_det_ratio = r.primitive_det / prod;
  return r;
}

CliffordRep clifford_generators(std::size_t n) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "clifford_generators: n must be >= 1");
  if (n > kMaxSpinorN) throw Error(ErrorCode::DimensionTooLarge, "spinor dimension 2^n too large");
  const Complex i1(0.0, 1.0);
  const ComplexMatrix id = ComplexMatrix::identity(2);
  ComplexMatrix z(2, 2);
  z(0, 0) = 1.0;
  z(1, 1) = -1.0;
  ComplexMatrix ix(2, 2);
  ix(0, 1) = i1;
  ix(1, 0) = i1;
  ComplexMatrix iy(2, 2);
  iy(0, 1) = 1.0;
  iy(1, 0) = -1.0;

  CliffordRep rep{n, {}};
  rep.gammas.reserve(2 * n);
  for (std::size_t k = 0; k < n; ++k) {
    for (const ComplexMatrix* seed : {&ix, &iy}) {
      ComplexMatrix g = ComplexMatrix::identity(1);
      for (std::size_t f = 0; f < n; ++f) g = kron(g, f < k ? z : (f == k ? *seed : id));
      rep.gammas.push_back(std::move(g));
    }
  }
  return rep;
}

RealMatrix phi_map(const SymForm& a) {
  const LagSpectrum s = lag_spectrum(a);
  RealMatrix e(a.dim(), a.dim());
  for (std::size_t j = 0; j < a.n(); ++j) {
    const Vector ej = s.frame.column(2 * j);
    const Vector jej = s.frame.column(2 * j + 1);
    e += s.lambdas[j] * (outer(ej, ej) + outer(jej, jej));
  }
  return e * complex_structure(a.n());
}

ComplexMatrix quantize_bivector(const RealMatrix& skew, const CliffordRep& rep) {
  const std::size_t d = 2 * rep.n;
  if (skew.rows() != d || skew.cols() != d) throw Error(ErrorCode::InvalidArgument, "quantize: shape mismatch");
  const std::size_t s = std::size_t{1} << rep.n;
  ComplexMatrix q(s, s);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = a + 1; b < d; ++b) {
      const double c = skew(b, a);
      if (c == 0.0) continue;
      q += (rep.gammas[a] * rep.gammas[b]) * Complex(c, 0.0);
    }
  return q;
}

Complex spinor_det(const SymForm& a) {
  if (a.n() > kMaxSpinorN) throw Error(ErrorCode::DimensionTooLarge, "spinor dimension 2^n too large");
  const CliffordRep rep = clifford_generators(a.n());
  const double mu = 0.5 * a.trace();
  ComplexMatrix m = quantize_bivector(phi_map(a), rep) * Complex(0.0, 1.0);
  for (std::size_t i = 0; i < m.rows(); ++i) m(i, i) += mu;
  return complex_det(m);
}

}  // namespace lagpot

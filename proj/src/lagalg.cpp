#include "lagpot/lagalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace lagpot {

SymForm::SymForm(RealMatrix a) {
  if (!a.square() || a.rows() == 0 || a.rows() % 2 != 0)
    throw Error(ErrorCode::InvalidArgument, "SymForm needs a square matrix of even positive size");
  for (double v : a.data())
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "SymForm entries must be finite");
  if (max_asymmetry(a) > 1e-10 * (1.0 + max_abs(a)))
    throw Error(ErrorCode::NonSymmetric, "SymForm: matrix is not symmetric");
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j) a(i, j) = a(j, i) = 0.5 * (a(i, j) + a(j, i));
  n_ = a.rows() / 2;
  a_ = std::move(a);
}

SymForm SymForm::identity(std::size_t n) { return SymForm(RealMatrix::identity(2 * n)); }
SymForm SymForm::zero(std::size_t n) { return SymForm(RealMatrix(2 * n, 2 * n)); }
SymForm SymForm::diagonal(std::initializer_list<double> d) { return SymForm(RealMatrix::diagonal(d)); }

SymForm Decomposition::reconstruct() const {
  RealMatrix m = herm0.matrix() + skew.matrix();
  for (std::size_t i = 0; i < m.rows(); ++i) m(i, i) += trace_part;
  return SymForm(std::move(m));
}

namespace {

// J A J + A and A - J A J without forming J; J acts per (x, y) pair.
RealMatrix jaj(const RealMatrix& a) {
  const std::size_t d = a.rows();
  RealMatrix r(d, d);
  // (J A J)_{ij} = sum J_ik A_kl J_lj; J maps index 2k+1 <- 2k (+1), 2k <- 2k+1 (-1).
  auto jrow = [](std::size_t i, double& sign) {
    if (i % 2 == 0) {
      sign = -1.0;
      return i + 1;
    }
    sign = 1.0;
    return i - 1;
  };
  for (std::size_t i = 0; i < d; ++i) {
    double si = 0.0;
    const std::size_t ki = jrow(i, si);
    for (std::size_t j = 0; j < d; ++j) {
      // J_{l j} nonzero for l = partner(j): J_{j+1, j} = 1 (j even), J_{j-1, j} = -1 (j odd).
      const std::size_t lj = (j % 2 == 0) ? j + 1 : j - 1;
      const double sj = (j % 2 == 0) ? 1.0 : -1.0;
      r(i, j) = si * sj * a(ki, lj);
    }
  }
  return r;
}

double sum_of(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0); }

void check_cap(std::size_t n, std::size_t cap) {
  if (n > cap)
    throw Error(ErrorCode::DimensionTooLarge,
                "2^n enumeration exceeds the cap (n = " + std::to_string(n) + ")");
}

}  // namespace

SymForm skew_part(const SymForm& a) {
  RealMatrix s = a.matrix() + jaj(a.matrix());
  s *= 0.5;
  return SymForm(std::move(s));
}

Decomposition decompose(const SymForm& a) {
  const RealMatrix j = jaj(a.matrix());
  RealMatrix skew = a.matrix() + j;
  skew *= 0.5;
  RealMatrix herm = a.matrix() - j;
  herm *= 0.5;
  const double tp = a.trace() / static_cast<double>(a.dim());
  for (std::size_t i = 0; i < herm.rows(); ++i) herm(i, i) -= tp;
  return Decomposition{tp, SymForm(std::move(herm)), SymForm(std::move(skew))};
}

SymForm lag_part(const SymForm& a) {
  RealMatrix s = a.matrix() + jaj(a.matrix());
  s *= 0.5;
  const double tp = a.trace() / static_cast<double>(a.dim());
  for (std::size_t i = 0; i < s.rows(); ++i) s(i, i) += tp;
  return SymForm(std::move(s));
}

LagSpectrum lag_spectrum(const SymForm& a) {
  const std::size_t n = a.n();
  const std::size_t d = a.dim();
  const double clamp = 1e-12 * a.norm();
  const SymForm b = skew_part(a);
  LagSpectrum out{n, 0.5 * a.trace(), Vector(n, 0.0), RealMatrix(d, d)};

  if (n == 1) {
    // b = [[p, q], [q, -p]] = lambda * reflection across angle phi.
    const double p = b(0, 0);
    const double q = b(0, 1);
    const double lam = std::hypot(p, q);
    const double phi = lam > 0.0 ? 0.5 * std::atan2(q, p) : 0.0;
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    out.lambdas[0] = lam <= clamp ? 0.0 : lam;
    out.frame(0, 0) = c;
    out.frame(1, 0) = s;
    out.frame(0, 1) = -s;
    out.frame(1, 1) = c;
    return out;
  }

  const SymEigen eig = sym_eigen(b.matrix(), 1e-8 * (1.0 + b.norm()));

  // Pivoted J-Gram-Schmidt over eigenvectors in descending eigenvalue order:
  // each accepted vector e brings its partner Je, which lies in the
  // -lambda eigenspace, so degenerate clusters still pair correctly.
  std::vector<Vector> residual(d);
  for (std::size_t i = 0; i < d; ++i) residual[i] = eig.vectors.column(i);
  std::vector<bool> used(d, false);
  std::vector<Vector> es;
  es.reserve(n);
  for (std::size_t step = 0; step < n; ++step) {
    double best = 0.0;
    for (std::size_t i = 0; i < d; ++i)
      if (!used[i]) best = std::max(best, norm(residual[i]));
    std::size_t pick = d;
    for (std::size_t i = 0; i < d; ++i)
      if (!used[i] && norm(residual[i]) >= 0.5 * best) {
        pick = i;
        break;
      }
    if (pick == d || best < 1e-8) throw Error(ErrorCode::FramePairingFailed, "lag_spectrum: frame pairing failed");
    used[pick] = true;
    Vector e = residual[pick];
    for (int pass = 0; pass < 2; ++pass)
      for (const Vector& f : es) {
        const Vector jf = apply_j(f);
        const double pf = dot(e, f);
        const double pj = dot(e, jf);
        for (std::size_t k = 0; k < d; ++k) e[k] -= pf * f[k] + pj * jf[k];
      }
    const double ne = norm(e);
    for (double& x : e) x /= ne;
    const Vector je = apply_j(e);
    for (std::size_t i = 0; i < d; ++i) {
      if (used[i]) continue;
      const double pe = dot(residual[i], e);
      const double pj = dot(residual[i], je);
      for (std::size_t k = 0; k < d; ++k) residual[i][k] -= pe * e[k] + pj * je[k];
    }
    es.push_back(std::move(e));
  }

  std::vector<double> lam(n);
  for (std::size_t j = 0; j < n; ++j) {
    const Vector be = b.matrix() * es[j];
    double l = dot(be, es[j]);
    if (l < 0.0) {
      es[j] = apply_j(es[j]);
      l = -l;
    }
    lam[j] = l <= clamp ? 0.0 : l;
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return lam[i] > lam[j]; });
  for (std::size_t j = 0; j < n; ++j) {
    const Vector& e = es[order[j]];
    const Vector je = apply_j(e);
    out.lambdas[j] = lam[order[j]];
    out.frame.set_column(2 * j, e);
    out.frame.set_column(2 * j + 1, je);
  }
  return out;
}

Vector signed_sums(double mu, std::span<const double> lambdas) {
  const std::size_t n = lambdas.size();
  Vector sums(std::size_t{1} << n, mu);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t half = std::size_t{1} << j;
    for (std::size_t m = 0; m < half; ++m) {
      const double v = sums[m];
      sums[m] = v + lambdas[j];
      sums[m + half] = v - lambdas[j];
    }
  }
  return sums;
}

GardingData garding_from_spectrum(double mu, std::span<const double> lambdas, std::size_t cap) {
  const std::size_t n = lambdas.size();
  check_cap(n, cap);
  const Vector sums = signed_sums(mu, lambdas);
  std::vector<std::size_t> order(sums.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return sums[i] < sums[j]; });
  GardingData g;
  g.eigenvalues.reserve(sums.size());
  g.sign_labels.reserve(sums.size());
  for (std::size_t idx : order) {
    g.eigenvalues.push_back(sums[idx]);
    std::vector<int> eps(n);
    for (std::size_t j = 0; j < n; ++j) eps[j] = (idx >> j) & 1U ? -1 : 1;
    g.sign_labels.push_back(std::move(eps));
  }
  return g;
}

GardingData garding_eigenvalues(const SymForm& a, std::size_t cap) {
  check_cap(a.n(), cap);
  const LagSpectrum s = lag_spectrum(a);
  return garding_from_spectrum(s.mu, s.lambdas, cap);
}

double m_lag(const SymForm& a, std::size_t cap) {
  check_cap(a.n(), cap);
  const LagSpectrum s = lag_spectrum(a);
  double p = 1.0;
  for (double v : signed_sums(s.mu, s.lambdas)) p *= v;
  return p;
}

std::optional<double> m_lag_root(const SymForm& a, std::size_t cap) {
  check_cap(a.n(), cap);
  if (lambda_min(a) < -default_tolerance(a)) return std::nullopt;
  const double m = m_lag(a, cap);
  return std::pow(std::max(m, 0.0), 1.0 / static_cast<double>(std::size_t{1} << a.n()));
}

double m_lag_partial(const SymForm& a, std::size_t k, std::size_t cap) {
  const GardingData g = garding_eigenvalues(a, cap);
  if (k < 1 || k > g.eigenvalues.size()) throw Error(ErrorCode::IndexOutOfRange, "branch index out of range");
  double p = 1.0;
  for (std::size_t i = k - 1; i < g.eigenvalues.size(); ++i) p *= g.eigenvalues[i];
  return p;
}

double branch_value(const SymForm& a, std::size_t k, std::size_t cap) {
  check_cap(a.n(), cap);
  if (k < 1 || k > (std::size_t{1} << a.n()))
    throw Error(ErrorCode::IndexOutOfRange, "branch index out of range");
  return garding_eigenvalues(a, cap).eigenvalues[k - 1];
}

double lambda_min(const SymForm& a) {
  const LagSpectrum s = lag_spectrum(a);
  return s.mu - sum_of(s.lambdas);
}

double canonical_op(const SymForm& a) { return lambda_min(a) / static_cast<double>(a.n()); }

double default_tolerance(const SymForm& a) { return 1e-9 * (1.0 + a.norm()); }

ConeFlags cone_membership(const SymForm& a, std::optional<double> tol) {
  const double t = tol.value_or(default_tolerance(a));
  const LagSpectrum s = lag_spectrum(a);
  const double sum = sum_of(s.lambdas);
  const double l1 = s.mu - sum;
  const double ln = s.mu + sum;
  const Decomposition dec = decompose(a);
  ConeFlags f;
  f.in_P_lag = l1 >= -t;
  f.in_interior_P_lag = l1 > t;
  f.in_dual = ln >= -t;
  f.in_edge = dec.skew.norm() <= t && std::abs(a.trace()) <= t;
  const SymEigen e = sym_eigen(a.matrix(), 1.0);
  f.in_P_plus = e.values.back() >= -t && dec.herm0.norm() <= t;
  return f;
}

Vector power_traces(const SymForm& a, std::size_t count) {
  const RealMatrix b = skew_part(a).matrix();
  const RealMatrix b2 = b * b;
  RealMatrix p = b2;
  Vector tau(count);
  for (std::size_t l = 0; l < count; ++l) {
    tau[l] = 0.5 * trace(p);
    if (l + 1 < count) p = p * b2;
  }
  return tau;
}

SymForm m_lag_gradient(const SymForm& a) {
  const std::size_t d = a.dim();
  const double h = 1e-5 * (1.0 + a.norm());
  RealMatrix g(d, d);
  for (std::size_t p = 0; p < d; ++p)
    for (std::size_t q = p; q < d; ++q) {
      RealMatrix plus = a.matrix();
      RealMatrix minus = a.matrix();
      plus(p, q) += h;
      minus(p, q) -= h;
      if (p != q) {
        plus(q, p) += h;
        minus(q, p) -= h;
      }
      const double diff = m_lag(SymForm(std::move(plus))) - m_lag(SymForm(std::move(minus)));
      // A symmetric perturbation of an off-diagonal pair moves two entries.
      const double v = p == q ? diff / (2.0 * h) : diff / (4.0 * h);
      g(p, q) = g(q, p) = v;
    }
  return SymForm(std::move(g));
}

IntDecomposition int_decompose(const SymForm& a) {
  const LagSpectrum s = lag_spectrum(a);
  const double l1 = s.mu - sum_of(s.lambdas);
  if (!(l1 > 0.0)) throw Error(ErrorCode::NotInterior, "int_decompose: Lambda_1(A) <= 0");
  const double delta = l1 / static_cast<double>(a.n());
  RealMatrix p(a.dim(), a.dim());
  for (std::size_t j = 0; j < a.n(); ++j) {
    const Vector e = s.frame.column(2 * j);
    const Vector je = s.frame.column(2 * j + 1);
    p += (delta + 2.0 * s.lambdas[j]) * outer(e, e);
    p += delta * outer(je, je);
  }
  SymForm pos(std::move(p));
  SymForm edge(a.matrix() - pos.matrix());
  return IntDecomposition{std::move(edge), std::move(pos), delta};
}

}  // namespace lagpot

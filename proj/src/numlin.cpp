#include "lagpot/numlin.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace lagpot {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonSymmetric: return "NonSymmetric";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::NotInterior: return "NotInterior";
    case ErrorCode::FramePairingFailed: return "FramePairingFailed";
    case ErrorCode::NotAViolation: return "NotAViolation";
    case ErrorCode::DegenerateBasis: return "DegenerateBasis";
    case ErrorCode::ZeroGradient: return "ZeroGradient";
    case ErrorCode::ProbeOffBoundary: return "ProbeOffBoundary";
    case ErrorCode::ShellEmpty: return "ShellEmpty";
    case ErrorCode::EmptyInterior: return "EmptyInterior";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::NegativePsi: return "NegativePsi";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnknownIdentifier: return "UnknownIdentifier";
    case ErrorCode::ArityError: return "ArityError";
    case ErrorCode::EvaluationError: return "EvaluationError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

bool is_input_error(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::SyntaxError:
    case ErrorCode::UnknownIdentifier:
    case ErrorCode::ArityError:
    case ErrorCode::ConfigError:
    case ErrorCode::NonSymmetric:
    case ErrorCode::InvalidArgument:
      return true;
    default:
      return false;
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double frobenius_norm(const RealMatrix& m) {
  double s = 0.0;
  for (double v : m.data()) s += v * v;
  return std::sqrt(s);
}

double frobenius_norm(const ComplexMatrix& m) {
  double s = 0.0;
  for (const Complex& v : m.data()) s += std::norm(v);
  return std::sqrt(s);
}

double max_abs(const RealMatrix& m) {
  double s = 0.0;
  for (double v : m.data()) s = std::max(s, std::abs(v));
  return s;
}

double trace(const RealMatrix& m) {
  double s = 0.0;
  for (std::size_t i = 0; i < std::min(m.rows(), m.cols()); ++i) s += m(i, i);
  return s;
}

double frobenius_inner(const RealMatrix& a, const RealMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error(ErrorCode::InvalidArgument, "inner product shape mismatch");
  return dot(a.data(), b.data());
}

double max_asymmetry(const RealMatrix& m) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j) s = std::max(s, std::abs(m(i, j) - m(j, i)));
  return s;
}

RealMatrix outer(std::span<const double> a, std::span<const double> b) {
  RealMatrix m(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) m(i, j) = a[i] * b[j];
  return m;
}

namespace {

template <class T>
DenseMatrix<T> kron_impl(const DenseMatrix<T>& a, const DenseMatrix<T>& b) {
  DenseMatrix<T> k(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const T aij = a(i, j);
      if (aij == T{}) continue;
      for (std::size_t p = 0; p < b.rows(); ++p)
        for (std::size_t q = 0; q < b.cols(); ++q) k(i * b.rows() + p, j * b.cols() + q) = aij * b(p, q);
    }
  return k;
}

}  // namespace

RealMatrix kron(const RealMatrix& a, const RealMatrix& b) { return kron_impl(a, b); }
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) { return kron_impl(a, b); }

RealMatrix complex_structure(std::size_t n) {
  RealMatrix j(2 * n, 2 * n);
  for (std::size_t k = 0; k < n; ++k) {
    j(2 * k, 2 * k + 1) = -1.0;
    j(2 * k + 1, 2 * k) = 1.0;
  }
  return j;
}

Vector apply_j(std::span<const double> v) {
  Vector r(v.size());
  for (std::size_t k = 0; k + 1 < v.size(); k += 2) {
    r[k] = -v[k + 1];
    r[k + 1] = v[k];
  }
  return r;
}

RealMatrix realify(const ComplexMatrix& u) {
  RealMatrix r(2 * u.rows(), 2 * u.cols());
  for (std::size_t j = 0; j < u.rows(); ++j)
    for (std::size_t k = 0; k < u.cols(); ++k) {
      const Complex z = u(j, k);
      r(2 * j, 2 * k) = z.real();
      r(2 * j, 2 * k + 1) = -z.imag();
      r(2 * j + 1, 2 * k) = z.imag();
      r(2 * j + 1, 2 * k + 1) = z.real();
    }
  return r;
}

// --- SplitMix64 -------------------------------------------------------------

std::uint64_t SplitMix64::mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t SplitMix64::next() noexcept {
  state_ += 0x9e3779b97f4a7c15ULL;
  return mix(state_);
}

double SplitMix64::uniform() noexcept {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double SplitMix64::gaussian() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

SplitMix64 SplitMix64::split(std::uint64_t stream) const noexcept {
  return SplitMix64(mix(state_ ^ mix(stream + 0x632be59bd9b4e019ULL)));
}

// --- Jacobi -----------------------------------------------------------------

SymEigen sym_eigen(const RealMatrix& s, double tol) {
  if (!s.square()) throw Error(ErrorCode::InvalidArgument, "sym_eigen: matrix not square");
  if (max_asymmetry(s) > tol) throw Error(ErrorCode::NonSymmetric, "sym_eigen: matrix not symmetric");
  const std::size_t n = s.rows();
  RealMatrix a = s;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) a(i, j) = a(j, i) = 0.5 * (s(i, j) + s(j, i));
  RealMatrix v = RealMatrix::identity(n);

  bool converged = n <= 1;
  for (int sweep = 0; sweep < kJacobiSweepCap && !converged; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += std::abs(a(p, q));
    if (off == 0.0) {
      converged = true;
      break;
    }
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        const double g = 100.0 * std::abs(apq);
        // Negligible against both diagonal entries: drop it.
        if (sweep > 3 && std::abs(a(p, p)) + g == std::abs(a(p, p)) &&
            std::abs(a(q, q)) + g == std::abs(a(q, q))) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        if (theta < 0.0) t = -t;
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
    }
  }
  if (!converged) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += std::abs(a(p, q));
    if (off != 0.0) throw Error(ErrorCode::NoConvergence, "sym_eigen: sweep cap exceeded");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });
  SymEigen out{Vector(n), RealMatrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

// --- Haar -------------------------------------------------------------------

RealMatrix haar_symplectic_orthogonal(std::size_t n, SplitMix64& rng) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "haar: n must be >= 1");
  for (;;) {
    ComplexMatrix z(n, n);
    for (auto& e : z.data()) {
      const double re = rng.gaussian();
      const double im = rng.gaussian();
      e = Complex(re, im) * (1.0 / std::numbers::sqrt2);
    }
    // Modified Gram-Schmidt; positive diagonal of R makes Q Haar distributed.
    bool degenerate = false;
    for (std::size_t k = 0; k < n && !degenerate; ++k) {
      for (std::size_t j = 0; j < k; ++j) {
        Complex proj{};
        for (std::size_t i = 0; i < n; ++i) proj += std::conj(z(i, j)) * z(i, k);
        for (std::size_t i = 0; i < n; ++i) z(i, k) -= proj * z(i, j);
      }
      double nk = 0.0;
      for (std::size_t i = 0; i < n; ++i) nk += std::norm(z(i, k));
      nk = std::sqrt(nk);
      if (nk < 1e-12) {
        degenerate = true;
        break;
      }
      for (std::size_t i = 0; i < n; ++i) z(i, k) /= nk;
    }
    if (!degenerate) return realify(z);
  }
}

RealMatrix haar_symplectic_orthogonal(std::size_t n, std::uint64_t seed) {
  SplitMix64 rng(seed);
  return haar_symplectic_orthogonal(n, rng);
}

// --- determinants -----------------------------------------------------------

namespace {

template <class T>
T lu_det(DenseMatrix<T> a) {
  if (!a.square()) throw Error(ErrorCode::InvalidArgument, "determinant of non-square matrix");
  const std::size_t n = a.rows();
  T det{1};
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(a(k, k));
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > best) {
        best = std::abs(a(i, k));
        piv = i;
      }
    if (best == 0.0) return T{};
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      det = -det;
    }
    const T akk = a(k, k);
    det *= akk;
    for (std::size_t i = k + 1; i < n; ++i) {
      const T f = a(i, k) / akk;
      if (f == T{}) continue;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
    }
  }
  return det;
}

}  // namespace

Complex complex_det(const ComplexMatrix& m) { return lu_det(m); }
double real_det(const RealMatrix& m) { return lu_det(m); }

RealMatrix orthonormalize_columns(const RealMatrix& cols, double tol) {
  RealMatrix q = cols;
  for (std::size_t k = 0; k < q.cols(); ++k) {
    Vector c = q.column(k);
    const double original = norm(c);
    if (original == 0.0) throw Error(ErrorCode::DegenerateBasis, "zero basis column");
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t j = 0; j < k; ++j) {
        const Vector qj = q.column(j);
        const double p = dot(qj, c);
        for (std::size_t i = 0; i < c.size(); ++i) c[i] -= p * qj[i];
      }
    const double r = norm(c);
    if (r <= tol * original)
      throw Error(ErrorCode::DegenerateBasis, "basis columns are linearly dependent");
    for (double& x : c) x /= r;
    q.set_column(k, c);
  }
  return q;
}

}  // namespace lagpot

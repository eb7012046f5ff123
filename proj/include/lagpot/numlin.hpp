#pragma once

// Dense numerical kernel: small row-major matrices, a cyclic Jacobi
// eigensolver, Haar sampling on U(n), complex determinants and the
// reproducible random stream shared by every sampler in the library.
//
// Coordinates on C^n = R^{2n} are interleaved (x1, y1, ..., xn, yn) and the
// complex structure J acts on each pair as [[0, -1], [1, 0]], so that
// J e_{x_k} = e_{y_k} and z_k = x_k + i y_k.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include "lagpot/error.hpp"

namespace lagpot {

using Complex = std::complex<double>;
using Vector = std::vector<double>;

template <class T>
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
    return m;
  }

  static DenseMatrix diagonal(std::span<const T> d) {
    DenseMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  static DenseMatrix diagonal(std::initializer_list<T> d) {
    return diagonal(std::span<const T>(d.begin(), d.size()));
  }

  static DenseMatrix from_rows(std::initializer_list<std::initializer_list<T>> rows) {
    DenseMatrix m(rows.size(), rows.size() ? rows.begin()->size() : 0);
    std::size_t i = 0;
    for (const auto& r : rows) {
      if (r.size() != m.cols_) throw Error(ErrorCode::InvalidArgument, "ragged matrix rows");
      std::size_t j = 0;
      for (const auto& v : r) m(i, j++) = v;
      ++i;
    }
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }

  std::vector<T> column(std::size_t j) const {
    std::vector<T> c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }

  void set_column(std::size_t j, std::span<const T> c) {
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = c[i];
  }

  DenseMatrix transpose() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  DenseMatrix& operator+=(const DenseMatrix& o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  DenseMatrix& operator-=(const DenseMatrix& o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  DenseMatrix& operator*=(T s) {
    for (auto& v : data_) v *= s;
    return *this;
  }

  friend DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) { return a += b; }
  friend DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b) { return a -= b; }
  friend DenseMatrix operator*(DenseMatrix a, T s) { return a *= s; }
  friend DenseMatrix operator*(T s, DenseMatrix a) { return a *= s; }
  friend DenseMatrix operator-(DenseMatrix a) { return a *= T{-1}; }

  friend DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols_ != b.rows_) throw Error(ErrorCode::InvalidArgument, "matrix product shape mismatch");
    DenseMatrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const T aik = a(i, k);
        if (aik == T{}) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend std::vector<T> operator*(const DenseMatrix& a, std::span<const T> v) {
    if (a.cols_ != v.size()) throw Error(ErrorCode::InvalidArgument, "matrix-vector shape mismatch");
    std::vector<T> r(a.rows_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      T s{};
      for (std::size_t j = 0; j < a.cols_; ++j) s += a(i, j) * v[j];
      r[i] = s;
    }
    return r;
  }
  friend std::vector<T> operator*(const DenseMatrix& a, const std::vector<T>& v) {
    return a * std::span<const T>(v);
  }

 private:
  void check_same(const DenseMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_)
      throw Error(ErrorCode::InvalidArgument, "matrix shape mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using RealMatrix = DenseMatrix<double>;
using ComplexMatrix = DenseMatrix<Complex>;

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);
double frobenius_norm(const RealMatrix& m);
double frobenius_norm(const ComplexMatrix& m);
double max_abs(const RealMatrix& m);
double trace(const RealMatrix& m);
/// Frobenius inner product tr(A^t B).
double frobenius_inner(const RealMatrix& a, const RealMatrix& b);
double max_asymmetry(const RealMatrix& m);
RealMatrix outer(std::span<const double> a, std::span<const double> b);
RealMatrix kron(const RealMatrix& a, const RealMatrix& b);
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

// --- complex structure ----------------------------------------------------

/// The 2n x 2n matrix of J in interleaved coordinates.
RealMatrix complex_structure(std::size_t n);
/// J v without forming the matrix.
Vector apply_j(std::span<const double> v);
/// Real 2n x 2n form of a complex n x n matrix (commutes with J).
RealMatrix realify(const ComplexMatrix& u);

// --- randomness -------------------------------------------------------------

/// SplitMix64 stream. `split(k)` derives an independent child stream from
/// the current state and a counter, so sample k of a batch can be generated
/// without generating samples 0..k-1 first.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept;
  /// Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Standard normal via Box-Muller; the second variate is cached.
  double gaussian() noexcept;
  SplitMix64 split(std::uint64_t stream) const noexcept;

  static std::uint64_t mix(std::uint64_t z) noexcept;

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// --- decompositions ---------------------------------------------------------

struct SymEigen {
  Vector values;       // descending
  RealMatrix vectors;  // column i pairs with values[i]
};

inline constexpr int kJacobiSweepCap = 100;

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
/// Throws NonSymmetric when max|S - S^t| > tol and NoConvergence past the
/// sweep cap.
SymEigen sym_eigen(const RealMatrix& s, double tol = 1e-10);

/// Real form of a Haar-distributed unitary: orthogonal and J-commuting.
RealMatrix haar_symplectic_orthogonal(std::size_t n, std::uint64_t seed);
/// Same, drawing from an existing stream.
RealMatrix haar_symplectic_orthogonal(std::size_t n, SplitMix64& rng);

/// Determinant by LU with partial pivoting.
Complex complex_det(const ComplexMatrix& m);
double real_det(const RealMatrix& m);

/// Orthonormalizes columns by modified Gram-Schmidt (two passes). Throws
/// DegenerateBasis if a column is dependent on the previous ones to `tol`
/// relative to its original norm.
RealMatrix orthonormalize_columns(const RealMatrix& cols, double tol = 1e-10);

}  // namespace lagpot

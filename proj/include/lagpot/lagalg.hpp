#pragma once

// Algebra of the Lagrangian Monge-Ampere operator on Sym^2(R^{2n}).
//
// Every symmetric A splits orthogonally as
//   A = (tr A / 2n) I  +  herm0  +  skew,
// with herm0 traceless and J-commuting (the edge) and skew = (A + JAJ)/2
// J-anticommuting. The skew part has eigenvalues +-lambda_j paired by J;
// mu = tr A / 2 together with lambda_1 >= ... >= lambda_n >= 0 determines
// the 2^n Garding eigenvalues mu +- lambda_1 +- ... +- lambda_n, whose
// product is M_Lag(A).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "lagpot/numlin.hpp"

namespace lagpot {

inline constexpr std::size_t kDefaultGardingCap = 14;

/// Real symmetric 2n x 2n form in interleaved coordinates.
class SymForm {
 public:
  SymForm() = default;
  /// Validates max|A - A^t| <= 1e-10 (1 + max|A|), then stores the exact
  /// symmetrization.
  explicit SymForm(RealMatrix a);

  static SymForm identity(std::size_t n);
  static SymForm diagonal(std::initializer_list<double> d);
  static SymForm zero(std::size_t n);

  std::size_t n() const noexcept { return n_; }
  std::size_t dim() const noexcept { return 2 * n_; }
  const RealMatrix& matrix() const noexcept { return a_; }
  double operator()(std::size_t i, std::size_t j) const { return a_(i, j); }

  double trace() const { return lagpot::trace(a_); }
  double norm() const { return frobenius_norm(a_); }

  friend SymForm operator+(const SymForm& a, const SymForm& b) { return SymForm(a.a_ + b.a_); }
  friend SymForm operator-(const SymForm& a, const SymForm& b) { return SymForm(a.a_ - b.a_); }
  friend SymForm operator*(double s, const SymForm& a) { return SymForm(s * a.a_); }
  friend SymForm operator-(const SymForm& a) { return SymForm(-a.a_); }

 private:
  std::size_t n_ = 0;
  RealMatrix a_;
};

struct Decomposition {
  double trace_part = 0.0;  // multiplies I
  SymForm herm0;
  SymForm skew;

  SymForm reconstruct() const;
};

/// Lagrangian Hessian data. frame columns (2j, 2j+1) are (e_j, J e_j) with
/// skew e_j = lambda_j e_j.
struct LagSpectrum {
  std::size_t n = 0;
  double mu = 0.0;
  Vector lambdas;
  RealMatrix frame;
};

struct GardingData {
  Vector eigenvalues;                          // ascending
  std::vector<std::vector<int>> sign_labels;   // eps in {+1,-1}^n per eigenvalue
};

struct ConeFlags {
  bool in_P_lag = false;
  bool in_interior_P_lag = false;
  bool in_dual = false;
  bool in_edge = false;
  bool in_P_plus = false;
};

struct IntDecomposition {
  SymForm edge;      // B: traceless, J-commuting
  SymForm positive;  // P: positive definite
  double margin = 0.0;
};

Decomposition decompose(const SymForm& a);
/// (tr A / 2n) I + A^skew.
SymForm lag_part(const SymForm& a);
SymForm skew_part(const SymForm& a);

LagSpectrum lag_spectrum(const SymForm& a);

/// 2^n signed sums mu +- lambda_1 +- ... +- lambda_n, unsorted, indexed by
/// the bit pattern of the signs (bit j set means -lambda_j).
Vector signed_sums(double mu, std::span<const double> lambdas);

GardingData garding_eigenvalues(const SymForm& a, std::size_t cap = kDefaultGardingCap);
GardingData garding_from_spectrum(double mu, std::span<const double> lambdas,
                                  std::size_t cap = kDefaultGardingCap);

double m_lag(const SymForm& a, std::size_t cap = kDefaultGardingCap);
/// M_Lag^{1/2^n}; only defined on the closed cone (empty outside it).
std::optional<double> m_lag_root(const SymForm& a, std::size_t cap = kDefaultGardingCap);
/// Partial product Lambda_k ... Lambda_{2^n} (1-based k).
double m_lag_partial(const SymForm& a, std::size_t k, std::size_t cap = kDefaultGardingCap);

/// k-th ascending Garding eigenvalue, 1-based.
double branch_value(const SymForm& a, std::size_t k, std::size_t cap = kDefaultGardingCap);

/// Lambda_1(A) / n; satisfies g(A + tI) = g(A) + t.
double canonical_op(const SymForm& a);
/// Lambda_1(A) = tr A / 2 - sum lambda_j.
double lambda_min(const SymForm& a);

double default_tolerance(const SymForm& a);
ConeFlags cone_membership(const SymForm& a, std::optional<double> tol = std::nullopt);

/// tau_l = (1/2) tr((A^skew)^{2l}) for l = 1..count.
Vector power_traces(const SymForm& a, std::size_t count);

/// Entrywise dM_Lag/dA_pq by central differences.
SymForm m_lag_gradient(const SymForm& a);

/// A = B + P with B in the edge and P > 0; requires Lambda_1(A) > 0.
IntDecomposition int_decompose(const SymForm& a);

}  // namespace lagpot

#pragma once

// Two independent constructions of M_Lag:
//  * the derivation D_H induced by H = A^Lag on the n-th exterior power,
//    restricted to the 2^n Lagrangian axis wedges of the unitary eigenframe;
//  * det(mu 1 + i B~) acting on spinors C^{2^n}, where B~ is the bivector
//    sqrt(B^2) J quantized in a complex Clifford representation.
//
// Exterior basis: sorted n-subsets of {0, ..., 2n-1} in lexicographic order;
// (H v_1) ^ v_2 ^ ... terms are re-sorted with the sign of the permutation.
// Clifford convention: gamma_a gamma_b + gamma_b gamma_a = -2 delta_ab.

#include <cstddef>
#include <vector>

#include "lagpot/lagalg.hpp"

namespace lagpot {

inline constexpr std::size_t kDefaultExteriorCap = 4;
inline constexpr std::size_t kMaxSpinorN = 7;

class ExteriorBasis {
 public:
  /// All p-subsets of {0, ..., dim-1}.
  ExteriorBasis(std::size_t dim, std::size_t p);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t degree() const noexcept { return p_; }
  std::size_t size() const noexcept { return sets_.size(); }
  const std::vector<std::size_t>& subset(std::size_t i) const { return sets_[i]; }
  /// Index of a sorted subset, or size() if absent.
  std::size_t index_of(const std::vector<std::size_t>& sorted) const;

  /// Plucker coordinates of v_1 ^ ... ^ v_p (columns of `vectors`).
  Vector wedge(const RealMatrix& vectors) const;

 private:
  std::size_t dim_;
  std::size_t p_;
  std::vector<std::vector<std::size_t>> sets_;
};

/// Sorts `idx` in place and returns the permutation sign, or 0 on a repeat.
int sort_with_sign(std::vector<std::size_t>& idx);

/// Matrix of the derivation extension of H on Lambda^p.
RealMatrix derivation_matrix(const SymForm& h, const ExteriorBasis& basis,
                             std::size_t cap = kDefaultExteriorCap);

/// Product of the D_{A^Lag} eigenvalues on the 2^n Lagrangian axis wedges.
double axis_restricted_det(const SymForm& a, std::size_t cap = kDefaultExteriorCap);

struct PrimitiveReport {
  std::size_t primitive_dim = 0;
  double invariance_residual = 0.0;
  bool spectrum_contains_garding = false;
  Vector primitive_eigenvalues;  // descending
  double primitive_det = 0.0;
  double primitive_det_ratio = 0.0;  // det(D|prim) / M_Lag; may be non-finite
};

PrimitiveReport primitive_check(const SymForm& a, std::size_t cap = kDefaultExteriorCap);

struct CliffordRep {
  std::size_t n = 0;
  std::vector<ComplexMatrix> gammas;  // 2n matrices of size 2^n
};

/// gamma_{2k} = Z^{(x)k} (x) iX (x) I..., gamma_{2k+1} = Z^{(x)k} (x) iY (x) I...
/// (0-based k; first tensor factor most significant).
CliffordRep clifford_generators(std::size_t n);

/// Skew matrix Phi(A) = sqrt(B^2) J with B = A^skew.
RealMatrix phi_map(const SymForm& a);
/// sum_{a<b} M_{ba} gamma_a gamma_b for a skew matrix M, so that the
/// bivector e ^ f <-> f e^t - e f^t maps to gamma(e) gamma(f).
ComplexMatrix quantize_bivector(const RealMatrix& skew, const CliffordRep& rep);

Complex spinor_det(const SymForm& a);

}  // namespace lagpot

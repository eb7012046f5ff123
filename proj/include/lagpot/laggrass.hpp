#pragma once

// Sampling oracle over the Lagrangian Grassmannian LAG(n) and the diagonal
// cross-section D = { H(t, lambda) = (t/2n) I + sum_j lambda_j (P_{x_j} - P_{y_j}) }.

#include <cstdint>
#include <vector>

#include "lagpot/lagalg.hpp"

namespace lagpot {

/// Orthonormal basis (as columns) of a Lagrangian n-plane W in R^{2n}.
class LagFrame {
 public:
  LagFrame() = default;
  /// Validates orthonormality and isotropy <J u_i, u_j> = 0 to `tol`.
  explicit LagFrame(RealMatrix columns, double tol = 1e-10);

  std::size_t n() const noexcept { return cols_.cols(); }
  const RealMatrix& columns() const noexcept { return cols_; }
  Vector column(std::size_t j) const { return cols_.column(j); }
  /// Orthogonal projection onto W.
  RealMatrix projection() const;

 private:
  RealMatrix cols_;
};

struct DiagPoint {
  double t = 0.0;
  Vector lambda;
};

struct DiagFlags {
  bool in_P_plus_D = false;  // cone hull P_+ cut by D
  bool in_P_sup_D = false;   // subequation P^+ cut by D
  Vector pairings;           // <H(t, lambda), P_{W(eps)}>, eps indexed by sign bits
};

struct SampledMin {
  double min = 0.0;
  LagFrame argmin;
};

/// Sign vector from bit pattern: bit j set means eps_j = -1.
std::vector<int> sign_vector(std::size_t bits, std::size_t n);

LagFrame random_lag_frame(std::size_t n, std::uint64_t seed);
LagFrame random_lag_frame(std::size_t n, SplitMix64& rng);
/// Frame of columns e_j (eps_j = +1) or J e_j (eps_j = -1) of a unitary frame
/// laid out as in LagSpectrum.
LagFrame axis_frame(const RealMatrix& unitary_frame, std::span<const int> eps);
/// Axis frame of the standard basis: x_j for eps_j = +1, y_j for eps_j = -1.
LagFrame standard_axis_frame(std::span<const int> eps);

double trace_on_plane(const SymForm& a, const LagFrame& w);
/// sum_j <g, u_j>^2 = |P_W g|^2.
double projected_norm2(std::span<const double> g, const LagFrame& w);

/// Minimum of tr(A|_W) over `count` Haar frames plus the 2^n axis frames of
/// A's skew eigenbasis.
SampledMin sampled_min_trace(const SymForm& a, std::size_t count, std::uint64_t seed,
                             std::size_t cap = kDefaultGardingCap);
/// Random frames only (no eigen-axis augmentation).
SampledMin sampled_min_trace_random(const SymForm& a, std::size_t count, std::uint64_t seed);

/// Projection onto the standard axis plane W(eps).
SymForm axis_plane_projection(std::span<const int> eps);

SymForm diag_matrix(const DiagPoint& p);
DiagFlags diag_membership(const DiagPoint& p, double tol = 1e-10);

}  // namespace lagpot

#pragma once

// Lagrangian pluriharmonic quadratics
//   h(z) = c + sum_k (b_k z_k + conj(b_k z_k)) + (1/2) sum_ij a_ij z_i conj(z_j),
// with A = (a_ij) hermitian and traceless, together with the certificates
// and tests built on them.
//
// The constant c is real: h is real valued, so an imaginary part of c could
// never contribute.

#include <cstdint>
#include <variant>
#include <vector>

#include "lagpot/lagalg.hpp"

namespace lagpot {

struct HermQuadratic {
  double c = 0.0;
  std::vector<Complex> b;
  ComplexMatrix a;

  std::size_t n() const noexcept { return b.size(); }
  /// Throws InvalidArgument unless A is hermitian and traceless to 1e-12.
  void validate() const;
};

double eval_quadratic(const HermQuadratic& h, std::span<const double> z);
/// Constant real Hessian of h; always lies in the edge.
SymForm real_hessian(const HermQuadratic& h);
/// Inverse of real_hessian on the edge (c = 0, b = 0).
HermQuadratic quadratic_from_edge(const SymForm& edge, double tol = 1e-9);
/// Real linear functional <l, z> written through b.
std::vector<Complex> linear_coefficients(std::span<const double> l);

struct ViolationCertificate {
  HermQuadratic h;
  SymForm edge;      // B from int_decompose(-phi_hessian)
  SymForm positive;  // P
  double margin = 0.0;
};

/// For a test jet phi(z) = phi0 + <g, z - z0> + (1/2)<Phi (z - z0), z - z0>
/// with -Phi in Int P(LAG), the pluriharmonic h with h - phi = (1/2)<P w, w>.
ViolationCertificate dual_violation_certificate(const SymForm& phi_hessian, std::span<const double> z0,
                                                double phi_value = 0.0,
                                                std::span<const double> phi_gradient = {});

/// Sampled Lag-psh quadratic q(z) = (1/2)<H (z - center), z - center>,
/// H = edge + PSD, normalized to |H| = 1.
struct HullWitness {
  SymForm hessian;
  Vector center;
  double value_at_x = 0.0;
  double max_on_k = 0.0;
};
struct HullUndecided {};
using HullResult = std::variant<HullWitness, HullUndecided>;

double eval_hull_witness(const HullWitness& w, std::span<const double> z);

HullResult sampled_hull_test(const std::vector<Vector>& k, std::span<const double> x, std::size_t samples,
                             std::uint64_t seed);

struct FreenessResult {
  double lambda1 = 0.0;
  bool free = false;
};

/// Columns of `basis` span T; lambda1 = Lambda_1(P_{T-perp}).
FreenessResult freeness(const RealMatrix& basis, double tol = 1e-10);

}  // namespace lagpot

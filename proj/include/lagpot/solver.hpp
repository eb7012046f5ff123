#pragma once

// Dirichlet problems on grids over boxes in C^n = R^{2n}.
//
// Homogeneous mode solves Lambda_1(D^2 u) = 0 with a monotone wide-stencil
// scheme: the minimum over a fixed set of Lagrangian frames of sums of
// directional second differences. Inhomogeneous mode drives the shift
// residual t* of M_Lag(D^2 u) = psi to zero, and Branch(k) mode drives
// Lambda_k(D^2 u) to zero; both use centered full Hessians.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lagpot/expr.hpp"
#include "lagpot/laggrass.hpp"

namespace lagpot {

enum class NodeKind : std::uint8_t { Interior, Boundary, Exterior };

/// Uniform grid with m points on every one of the 2n axes. Node index is
/// sum_a i_a m^a, so axis 0 (x1) varies fastest.
struct Grid {
  std::size_t n = 0;
  Vector lo;  // per-axis lower corner
  Vector hi;
  std::size_t m = 0;
  double h = 0.0;
  std::vector<NodeKind> mask;

  std::size_t dim() const noexcept { return 2 * n; }
  std::size_t size() const noexcept { return mask.size(); }
  std::size_t stride(std::size_t axis) const;
  std::vector<std::size_t> multi_index(std::size_t node) const;
  std::size_t node_index(std::span<const std::size_t> idx) const;
  Vector coords(std::size_t node) const;
  std::vector<std::size_t> interior_nodes() const;
  std::size_t count(NodeKind k) const;
};

/// One value per node. Non-Interior nodes hold the boundary data (NaN where
/// it cannot be evaluated) and are never updated.
struct GridField {
  Grid grid;
  Vector values;
};

struct DomainConfig {
  std::size_t n = 1;
  Vector lo;  // per-axis; all axes must have the same length
  Vector hi;
  std::size_t m = 33;
  std::optional<std::string> rho;  // sublevel domain {rho < 0} inside the box
  std::string phi;
};

/// Interior: inside the open box and rho < 0. Boundary: not Interior but in
/// the 3^{2n} neighbourhood of an Interior node (every stencil point is
/// Interior or Boundary). Interior nodes start at the minimum of phi over
/// the Boundary nodes.
GridField build_domain(const DomainConfig& cfg);

struct FrameSet {
  std::vector<LagFrame> frames;  // 2^n standard axis frames, then the random ones
  std::size_t extra = 0;
  std::uint64_t seed = 0;
};

FrameSet make_frame_set(std::size_t n, std::size_t extra, std::uint64_t seed);

/// (u~(x+se) + u~(x-se) - 2u(x)) / s^2 with s = h_frac h and u~ the
/// multilinear interpolant. Multilinear interpolation of a quadratic is off
/// by O(h^2), so interpolated directions are consistent only for wide
/// stencils (h_frac ~ h^{-1/2}). Where x + se would need a cell with an
/// Exterior or off-grid corner, the step on that side is shortened along the
/// ray (not below h) and the nonuniform three-point formula is used.
double directional_second_difference(const GridField& u, std::size_t node, std::span<const double> e,
                                     double h_frac = 1.0);

struct FrameMin {
  double value = 0.0;
  std::size_t frame = 0;
};

FrameMin frame_min_trace(const GridField& u, std::size_t node, const FrameSet& frames, double h_frac = 1.0);

/// Per-frame stencils in flat node offsets. Shared across nodes except near
/// the boundary, where wide stencils are shortened per node.
class FrameStencils {
 public:
  FrameStencils(const Grid& grid, const FrameSet& frames, double h_frac = 1.0);

  FrameMin min_trace(std::span<const double> values, std::size_t node) const;
  double trace(std::span<const double> values, std::size_t node, std::size_t frame) const;
  std::size_t frame_count() const noexcept { return starts_.size() - 1; }
  /// min(h_frac, 1)^2 h^2 / (2n + 1): keeps the explicit update monotone.
  double time_step() const noexcept { return dt_; }

 private:
  std::vector<std::ptrdiff_t> offsets_;
  Vector weights_;
  std::vector<std::size_t> starts_;  // shared stencil of each frame
  std::vector<std::uint32_t> slot_;  // node -> interior slot
  std::vector<std::ptrdiff_t> custom_;  // slot * frames + frame -> custom index or -1
  std::vector<std::size_t> custom_starts_, custom_ends_;
  double dt_ = 0.0;
};

/// Unique t >= -Lambda_1 with prod_i (Lambda_i + t) = psi. `garding` is the
/// full list of Garding eigenvalues in any order.
double shift_residual(std::span<const double> garding, double psi);
double shift_residual(const LagSpectrum& spec, double psi);

/// Centered second differences (four-point mixed terms) at an Interior node.
SymForm centered_hessian(const GridField& u, std::size_t node);

/// mu and lambda_1 >= ... >= lambda_n of a 2n x 2n row-major symmetric
/// matrix, closed form for n <= 2.
void lag_mu_lambdas(std::span<const double> h, std::size_t n, double& mu, Vector& lambdas);

enum class SolveMode { Homogeneous, Inhomogeneous, Branch };
std::string solve_mode_name(SolveMode m);
SolveMode parse_solve_mode(std::string_view s);

struct SolverConfig {
  DomainConfig domain;
  SolveMode mode = SolveMode::Homogeneous;
  std::size_t k = 1;  // branch index for Branch mode, 1-based
  std::string psi = "1";
  std::size_t frames_extra = 0;
  std::uint64_t frames_seed = 1;
  double h_frac = 1.0;
  double tol = 1e-6;
  std::optional<std::size_t> max_iters;  // default 10^6 for n = 1, 10^5 otherwise
  double relax = 0.8;  // dt_r = relax h^2 / (2n) for the centered modes
  std::size_t threads = 1;
};

struct SolveDiagnostics {
  std::size_t iterations = 0;
  double final_residual = 0.0;  // max over Interior of |residual|
  double threshold = 0.0;       // tol h^2
  bool converged = false;
  double min_lambda1 = 0.0;     // of the centered Hessian over Interior nodes
  double frame_sensitivity = 0.0;  // homogeneous: max drop of the min trace with more frames
  double boundary_min = 0.0;
  double boundary_max = 0.0;
  double interior_min = 0.0;
  double interior_max = 0.0;
  std::size_t interior_count = 0;
};

struct SolveResult {
  GridField field;
  SolveDiagnostics diagnostics;
};

class NotConvergedError : public Error {
 public:
  NotConvergedError(const std::string& what, SolveDiagnostics d)
      : Error(ErrorCode::NotConverged, what), diagnostics_(d) {}
  const SolveDiagnostics& diagnostics() const noexcept { return diagnostics_; }

 private:
  SolveDiagnostics diagnostics_;
};

/// Jacobi sweeps from the build_domain initial field; converged when the
/// residual is below tol h^2 at every Interior node. Throws
/// NotConvergedError after max_iters sweeps.
SolveResult solve_dirichlet(const SolverConfig& cfg);
/// Same iteration from a given field (its non-Interior values are kept).
SolveResult solve_dirichlet(const SolverConfig& cfg, GridField start);

struct ResidualReport {
  std::vector<std::size_t> nodes;  // Interior only
  Vector residual;
  double max_abs = 0.0;
};

/// Frame min trace, t* or Lambda_k per Interior node, by mode.
ResidualReport residual_report(const GridField& u, const SolverConfig& cfg);

}  // namespace lagpot

#pragma once

// Boundary Lagrangian convexity of domains {rho < 0}: tangential minimum
// traces, barrier checks for -log(-rho) and the rho + A rho^2 upgrade.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lagpot/expr.hpp"
#include "lagpot/laggrass.hpp"

namespace lagpot {

struct ScalarField {
  Expr expr;
  double fd_step = 1e-3;  // relative: the stencil step at x is fd_step (1 + |x|)
  bool richardson = true;  // combine steps h and h/2 (fourth order)

  std::size_t n() const { return expr.n(); }
  double operator()(std::span<const double> x) const { return eval(expr, x); }
};

ScalarField make_field(std::string_view src, std::size_t n, double fd_step = 1e-3, bool richardson = true);

struct Jet {
  double value = 0.0;
  Vector gradient;
  SymForm hessian;
};

using PointFunction = std::function<double(std::span<const double>)>;

/// Central differences with step fd_step (1 + |x|), Richardson-extrapolated
/// unless disabled on the field; exact on quadratics up to rounding.
Jet grad_hess_fd(const ScalarField& f, std::span<const double> x);
/// Central differences with an explicit step; `richardson` combines steps
/// h and h/2 for fourth-order accuracy.
Jet grad_hess_fd(const PointFunction& f, std::span<const double> x, double step, bool richardson = false);

/// Exact minimum of tr(H|_W) over Lagrangian planes W orthogonal to grad.
double tangential_min_trace(const SymForm& h, std::span<const double> grad);

/// Newton iteration x <- x - (rho(x) - level) grad / |grad|^2.
std::optional<Vector> project_to_level(const ScalarField& rho, std::span<const double> start, double level = 0.0,
                                       int max_iter = 100);

/// Random starts near `center` (Gaussian, scale `radius`) projected to {rho = 0}.
std::vector<Vector> sample_boundary_probes(const ScalarField& rho, std::size_t count, std::uint64_t seed,
                                           std::span<const double> center = {}, double radius = 1.0);

enum class Convexity { StrictlyConvex, WeaklyConvex, NotConvex };
std::string convexity_name(Convexity c);

struct BoundaryReport {
  std::vector<Vector> points;
  Vector min_tangential_trace;
  Vector grad_norm;
  Vector sff_trace_form;  // min_tangential_trace / (-|grad rho|)
  Convexity verdict = Convexity::NotConvex;
  double margin = 0.0;  // smallest per-point minimum
};

inline constexpr double kProbeTolerance = 1e-8;

/// Throws ProbeOffBoundary when |rho| > 1e-8 (1 + |x|)(1 + |grad rho|) and
/// ZeroGradient when |grad rho| <= 1e-8.
BoundaryReport boundary_convexity_report(const ScalarField& rho, const std::vector<Vector>& probes,
                                         double tol = 1e-6);

struct Shell {
  double delta_min = 0.05;
  double delta_max = 0.2;
};

/// Points with -rho uniform in the shell, by Newton projection of random starts.
std::vector<Vector> sample_shell(const ScalarField& rho, const Shell& shell, std::size_t count, std::uint64_t seed,
                                 std::span<const double> center = {}, double radius = 1.0);

struct BarrierReport {
  std::vector<Vector> points;
  Vector delta;
  Vector lambda1_direct;    // Lambda_1 of the FD Hessian of -log(-rho)
  Vector lambda1_identity;  // Lambda_1 of (1/d) Hess rho + (1/d^2) grad grad^t
  double min_lambda1 = 0.0;
  double max_identity_residual = 0.0;  // at the minimizing frame of the direct Hessian
  bool strict = false;
};

/// The barrier Hessian is differenced with step fd_step * delta and
/// Richardson extrapolation, so its accuracy does not degrade as delta -> 0.
BarrierReport barrier_check(const ScalarField& rho, const Shell& shell, std::size_t probes, std::uint64_t seed,
                            double tol = 1e-6, std::span<const double> center = {}, double radius = 1.0);

struct UpgradeResult {
  bool found = false;
  double a = 0.0;
  Vector margins;  // Lambda_1(Hess(rho + A rho^2)) per shell point at the returned A
  double max_identity_residual = 0.0;
  std::vector<Vector> points;
};

UpgradeResult defining_function_upgrade(const ScalarField& rho, const Shell& shell, double a_max, std::size_t probes,
                                        std::uint64_t seed, std::span<const double> center = {}, double radius = 1.0);

}  // namespace lagpot

#include "lagpot/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lagpot {

ScalarField make_field(std::string_view src, std::size_t n, double fd_step, bool richardson) {
  if (!(fd_step > 0.0)) throw Error(ErrorCode::InvalidArgument, "fd_step must be positive");
  return ScalarField{parse(src, n), fd_step, richardson};
}

namespace {

Jet central_jet(const PointFunction& f, std::span<const double> x, double h) {
  const std::size_t d = x.size();
  Vector p(x.begin(), x.end());
  auto at = [&](std::size_t i, double si, std::size_t j, double sj) {
    p[i] += si;
    p[j] += sj;
    const double v = f(p);
    p[i] -= si;
    p[j] -= sj;
    return v;
  };
  Jet jet;
  jet.value = f(p);
  jet.gradient.assign(d, 0.0);
  RealMatrix hm(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    const double fp = at(i, h, i, 0.0);
    const double fm = at(i, -h, i, 0.0);
    jet.gradient[i] = (fp - fm) / (2.0 * h);
    hm(i, i) = (fp - 2.0 * jet.value + fm) / (h * h);
    for (std::size_t j = 0; j < i; ++j) {
      const double v = (at(i, h, j, h) - at(i, h, j, -h) - at(i, -h, j, h) + at(i, -h, j, -h)) / (4.0 * h * h);
      hm(i, j) = hm(j, i) = v;
    }
  }
  jet.hessian = SymForm(std::move(hm));
  return jet;
}

double scale_of(std::span<const double> x) { return 1.0 + norm(x); }

void check_dim(const ScalarField& f, std::span<const double> x) {
  if (x.size() != 2 * f.n()) throw Error(ErrorCode::InvalidArgument, "point has wrong dimension");
}

Vector center_or_zero(std::span<const double> center, std::size_t d) {
  if (center.empty()) return Vector(d, 0.0);
  if (center.size() != d) throw Error(ErrorCode::InvalidArgument, "center has wrong dimension");
  return Vector(center.begin(), center.end());
}

// Frames used to compare two Hessians: the eigen-axis frames of `h` plus a
// few Haar samples.
std::vector<LagFrame> comparison_frames(const SymForm& h, std::size_t extra, SplitMix64& rng) {
  std::vector<LagFrame> frames;
  const LagSpectrum s = lag_spectrum(h);
  for (std::size_t bits = 0; bits < (std::size_t{1} << h.n()); ++bits)
    frames.push_back(axis_frame(s.frame, sign_vector(bits, h.n())));
  for (std::size_t i = 0; i < extra; ++i) frames.push_back(random_lag_frame(h.n(), rng));
  return frames;
}

}  // namespace

Jet grad_hess_fd(const PointFunction& f, std::span<const double> x, double step, bool richardson) {
  if (!(step > 0.0)) throw Error(ErrorCode::InvalidArgument, "FD step must be positive");
  Jet coarse = central_jet(f, x, step);
  if (!richardson) return coarse;
  const Jet fine = central_jet(f, x, 0.5 * step);
  for (std::size_t i = 0; i < coarse.gradient.size(); ++i)
    coarse.gradient[i] = (4.0 * fine.gradient[i] - coarse.gradient[i]) / 3.0;
  coarse.hessian = SymForm((4.0 / 3.0) * fine.hessian.matrix() - (1.0 / 3.0) * coarse.hessian.matrix());
  coarse.value = fine.value;
  return coarse;
}

Jet grad_hess_fd(const ScalarField& f, std::span<const double> x) {
  check_dim(f, x);
  return grad_hess_fd([&f](std::span<const double> p) { return f(p); }, x, f.fd_step * scale_of(x), f.richardson);
}

double tangential_min_trace(const SymForm& h, std::span<const double> grad) {
  const std::size_t n = h.n();
  const std::size_t d = h.dim();
  if (grad.size() != d) throw Error(ErrorCode::InvalidArgument, "gradient has wrong dimension");
  const double gn = norm(grad);
  if (!(gn > 1e-10)) throw Error(ErrorCode::ZeroGradient, "gradient vanishes");
  Vector nh(grad.begin(), grad.end());
  for (double& v : nh) v /= gn;
  const Vector jn = apply_j(nh);
  const Vector hjn = h.matrix() * jn;
  const double normal_part = dot(hjn, jn);
  if (n == 1) return normal_part;

  // J-adapted orthonormal basis (f_1, J f_1, ..., f_{n-1}, J f_{n-1}) of the
  // complex orthogonal complement of span{n, Jn}.
  std::vector<Vector> basis{nh, jn};
  RealMatrix c(d - 2, d - 2);
  std::vector<Vector> frame;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    Vector best;
    double best_norm = -1.0;
    for (std::size_t e = 0; e < d; ++e) {
      Vector v(d, 0.0);
      v[e] = 1.0;
      for (int pass = 0; pass < 2; ++pass)
        for (const Vector& b : basis) {
          const double p = dot(v, b);
          for (std::size_t i = 0; i < d; ++i) v[i] -= p * b[i];
        }
      const double vn = norm(v);
      if (vn > best_norm) {
        best_norm = vn;
        best = std::move(v);
      }
    }
    for (double& v : best) v /= best_norm;
    Vector jb = apply_j(best);
    basis.push_back(best);
    basis.push_back(jb);
    frame.push_back(std::move(best));
    frame.push_back(std::move(jb));
  }
  for (std::size_t a = 0; a < frame.size(); ++a) {
    const Vector ha = h.matrix() * frame[a];
    for (std::size_t b = 0; b < frame.size(); ++b) c(a, b) = dot(ha, frame[b]);
  }
  for (std::size_t a = 0; a < c.rows(); ++a)
    for (std::size_t b = a + 1; b < c.cols(); ++b) c(a, b) = c(b, a) = 0.5 * (c(a, b) + c(b, a));
  return normal_part + lambda_min(SymForm(std::move(c)));
}

std::optional<Vector> project_to_level(const ScalarField& rho, std::span<const double> start, double level,
                                       int max_iter) {
  check_dim(rho, start);
  Vector x(start.begin(), start.end());
  const std::size_t d = x.size();
  for (int it = 0; it < max_iter; ++it) {
    double r;
    Vector g(d);
    try {
      r = rho(x) - level;
      const double h = rho.fd_step * scale_of(x);
      Vector p = x;
      for (std::size_t i = 0; i < d; ++i) {
        p[i] = x[i] + h;
        const double fp = rho(p);
        p[i] = x[i] - h;
        const double fm = rho(p);
        p[i] = x[i];
        g[i] = (fp - fm) / (2.0 * h);
      }
    } catch (const Error&) {
      return std::nullopt;
    }
    const double g2 = dot(g, g);
    if (std::abs(r) <= 1e-12 * scale_of(x) * (1.0 + std::sqrt(g2))) return x;
    if (!(g2 > 1e-20)) return std::nullopt;
    for (std::size_t i = 0; i < d; ++i) x[i] -= r * g[i] / g2;
    if (!std::isfinite(norm(x))) return std::nullopt;
  }
  try {
    const double r = rho(x) - level;
    if (std::abs(r) <= 1e-10 * scale_of(x)) return x;
  } catch (const Error&) {
  }
  return std::nullopt;
}

std::vector<Vector> sample_boundary_probes(const ScalarField& rho, std::size_t count, std::uint64_t seed,
                                           std::span<const double> center, double radius) {
  const std::size_t d = 2 * rho.n();
  const Vector c = center_or_zero(center, d);
  const SplitMix64 root(seed);
  std::vector<Vector> out;
  for (std::size_t attempt = 0; out.size() < count && attempt < 50 * count + 50; ++attempt) {
    SplitMix64 rng = root.split(attempt);
    Vector x(d);
    for (std::size_t i = 0; i < d; ++i) x[i] = c[i] + radius * rng.gaussian();
    if (auto p = project_to_level(rho, x)) out.push_back(std::move(*p));
  }
  return out;
}

std::string convexity_name(Convexity c) {
  switch (c) {
    case Convexity::StrictlyConvex: return "StrictlyConvex";
    case Convexity::WeaklyConvex: return "WeaklyConvex";
    case Convexity::NotConvex: return "NotConvex";
  }
  return "?";
}

BoundaryReport boundary_convexity_report(const ScalarField& rho, const std::vector<Vector>& probes, double tol) {
  if (probes.empty()) throw Error(ErrorCode::InvalidArgument, "no boundary probes");
  BoundaryReport r;
  r.margin = std::numeric_limits<double>::infinity();
  for (const Vector& x : probes) {
    const Jet j = grad_hess_fd(rho, x);
    const double gn = norm(j.gradient);
    if (!(gn > 1e-8)) throw Error(ErrorCode::ZeroGradient, "defining function has vanishing gradient at a probe");
    if (std::abs(j.value) > kProbeTolerance * scale_of(x) * (1.0 + gn))
      throw Error(ErrorCode::ProbeOffBoundary, "probe is not on the boundary: rho = " + std::to_string(j.value));
    const double m = tangential_min_trace(j.hessian, j.gradient);
    r.points.push_back(x);
    r.min_tangential_trace.push_back(m);
    r.grad_norm.push_back(gn);
    r.sff_trace_form.push_back(m / -gn);
    r.margin = std::min(r.margin, m);
  }
  r.verdict = r.margin > tol ? Convexity::StrictlyConvex
                             : (r.margin >= -tol ? Convexity::WeaklyConvex : Convexity::NotConvex);
  return r;
}

std::vector<Vector> sample_shell(const ScalarField& rho, const Shell& shell, std::size_t count, std::uint64_t seed,
                                 std::span<const double> center, double radius) {
  if (!(shell.delta_min > 0.0) || shell.delta_max < shell.delta_min)
    throw Error(ErrorCode::InvalidArgument, "shell needs 0 < delta_min <= delta_max");
  const std::size_t d = 2 * rho.n();
  const Vector c = center_or_zero(center, d);
  const SplitMix64 root(seed);
  std::vector<Vector> out;
  for (std::size_t attempt = 0; out.size() < count && attempt < 50 * count + 50; ++attempt) {
    SplitMix64 rng = root.split(attempt);
    const double target = shell.delta_min + (shell.delta_max - shell.delta_min) * rng.uniform();
    Vector x(d);
    for (std::size_t i = 0; i < d; ++i) x[i] = c[i] + radius * rng.gaussian();
    auto p = project_to_level(rho, x, -target);
    if (!p) continue;
    const double delta = -rho(*p);
    if (delta >= shell.delta_min * (1.0 - 1e-9) && delta <= shell.delta_max * (1.0 + 1e-9))
      out.push_back(std::move(*p));
  }
  if (out.empty()) throw Error(ErrorCode::ShellEmpty, "no points found in the shell");
  return out;
}

BarrierReport barrier_check(const ScalarField& rho, const Shell& shell, std::size_t probes, std::uint64_t seed,
                            double tol, std::span<const double> center, double radius) {
  BarrierReport r;
  r.points = sample_shell(rho, shell, probes, seed, center, radius);
  r.min_lambda1 = std::numeric_limits<double>::infinity();
  double min_ratio = std::numeric_limits<double>::infinity();
  SplitMix64 frame_rng(SplitMix64::mix(seed ^ 0x9e3779b97f4a7c15ULL));
  auto barrier = [&rho](std::span<const double> p) {
    const double v = rho(p);
    if (!(v < 0.0)) throw Error(ErrorCode::EvaluationError, "barrier evaluated outside the domain");
    return -std::log(-v);
  };
  for (const Vector& x : r.points) {
    const Jet jr = grad_hess_fd(rho, x);
    const double delta = -jr.value;
    const Jet jb = grad_hess_fd(barrier, x, rho.fd_step * delta, true);
    const SymForm assembled((1.0 / delta) * jr.hessian.matrix() +
                            (1.0 / (delta * delta)) * outer(jr.gradient, jr.gradient));
    const double l_direct = lambda_min(jb.hessian);
    const SampledMin sm = sampled_min_trace(jb.hessian, 8, frame_rng.next());
    const LagFrame& w = sm.argmin;
    const double via_identity =
        trace_on_plane(jr.hessian, w) / delta + projected_norm2(jr.gradient, w) / (delta * delta);
    r.max_identity_residual = std::max(r.max_identity_residual, std::abs(sm.min - via_identity));
    r.delta.push_back(delta);
    r.lambda1_direct.push_back(l_direct);
    r.lambda1_identity.push_back(lambda_min(assembled));
    r.min_lambda1 = std::min(r.min_lambda1, l_direct);
    min_ratio = std::min(min_ratio, l_direct / (1.0 + jb.hessian.norm()));
  }
  r.strict = min_ratio > tol;
  return r;
}

UpgradeResult defining_function_upgrade(const ScalarField& rho, const Shell& shell, double a_max, std::size_t probes,
                                        std::uint64_t seed, std::span<const double> center, double radius) {
  UpgradeResult r;
  r.points = sample_shell(rho, shell, probes, seed, center, radius);
  std::vector<Jet> jets;
  for (const Vector& x : r.points) jets.push_back(grad_hess_fd(rho, x));

  auto upgraded = [&](const Jet& j, double a) {
    return SymForm((1.0 + 2.0 * a * j.value) * j.hessian.matrix() + (2.0 * a) * outer(j.gradient, j.gradient));
  };
  auto margins_at = [&](double a) {
    Vector m;
    for (const Jet& j : jets) m.push_back(lambda_min(upgraded(j, a)));
    return m;
  };
  auto ok = [](const Vector& m) { return std::all_of(m.begin(), m.end(), [](double v) { return v > 0.0; }); };

  double a = 0.0;
  Vector m = margins_at(a);
  if (!ok(m)) {
    a = 1.0 / 64.0;
    for (;;) {
      if (a > a_max) {
        r.found = false;
        r.a = a_max;
        r.margins = margins_at(a_max);
        return r;
      }
      m = margins_at(a);
      if (ok(m)) break;
      a *= 2.0;
    }
  }
  r.found = true;
  r.a = a;
  r.margins = m;

  // Identity check against direct differencing of rho + A rho^2.
  SplitMix64 frame_rng(SplitMix64::mix(seed + 17));
  auto rho_bar = [&rho, a](std::span<const double> p) {
    const double v = rho(p);
    return v + a * v * v;
  };
  for (std::size_t i = 0; i < jets.size(); ++i) {
    const Vector& x = r.points[i];
    const Jet direct = grad_hess_fd(rho_bar, x, rho.fd_step * scale_of(x), rho.richardson);
    const SymForm ident = upgraded(jets[i], a);
    for (const LagFrame& w : comparison_frames(ident, 4, frame_rng)) {
      const double lhs = trace_on_plane(direct.hessian, w);
      const double rhs = (1.0 + 2.0 * a * jets[i].value) * trace_on_plane(jets[i].hessian, w) +
                         2.0 * a * projected_norm2(jets[i].gradient, w);
      r.max_identity_residual = std::max(r.max_identity_residual, std::abs(lhs - rhs));
    }
  }
  return r;
}

}  // namespace lagpot

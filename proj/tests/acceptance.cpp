// Acceptance run: one PASS/FAIL line per criterion.
// Exit status 0 iff the failing criteria are exactly those listed with
// --expect-fail (none by default), so a known red line stays visible without
// hiding new regressions or an unexpected recovery.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "lagpot/boundary.hpp"
#include "lagpot/constructions.hpp"
#include "lagpot/laggrass.hpp"
#include "lagpot/pluriharm.hpp"
#include "lagpot/solver.hpp"

using namespace lagpot;
using testutil::random_form;
using testutil::random_psd;
using testutil::rel_gap;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

std::string format(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

SymForm shift(const SymForm& a, double s) { return a + (s / static_cast<double>(a.n())) * SymForm::identity(a.n()); }

Outcome triple_agreement() {
  SplitMix64 rng(101);
  double worst_rel = 0.0, worst_im = 0.0;
  std::size_t count = 0;
  for (std::size_t n = 1; n <= 4; ++n) {
    const int trials = n == 4 ? 100 : 1000;
    for (int t = 0; t < trials; ++t) {
      const SymForm a = random_form(n, rng);
      const double m = m_lag(a);
      const double x = axis_restricted_det(a);
      const Complex s = spinor_det(a);
      worst_rel = std::max({worst_rel, rel_gap(m, x), rel_gap(m, s.real()), rel_gap(x, s.real())});
      if (std::abs(s.imag()) > 1e-9) worst_im = std::max(worst_im, std::abs(s.imag()) / std::abs(s));
      ++count;
    }
  }
  return {worst_rel <= 1e-7 && worst_im <= 1e-8,
          format("%zu forms, max rel gap %.2e, max |Im|/|s| %.2e", count, worst_rel, worst_im)};
}

Outcome n1_collapse() {
  SplitMix64 rng(102);
  double worst = 0.0;
  for (int t = 0; t < 10000; ++t) {
    const SymForm a = random_form(1, rng);
    const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    worst = std::max(worst, std::abs(m_lag(a) - det) / std::max(1.0, std::abs(det)));
  }
  return {worst <= 1e-10, format("10000 forms, max |M_Lag - det| %.2e", worst)};
}

Outcome oracle() {
  SplitMix64 rng(103);
  double worst_aug = 0.0;
  double worst_ratio[4] = {0.0, 0.0, 0.0, 0.0};
  int violations[4] = {0, 0, 0, 0};
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + t % 3;
    const SymForm a = random_form(n, rng);
    const LagSpectrum s = lag_spectrum(a);
    double sum_l = 0.0;
    for (double l : s.lambdas) sum_l += l;
    const double l1 = lambda_min(a);
    worst_aug = std::max(worst_aug, std::abs(sampled_min_trace(a, 64, 5000 + t).min - l1));
    const double excess = sampled_min_trace_random(a, 20000, 9000 + t).min - l1;
    if (excess < -1e-9) return {false, format("random sample below Lambda_1 by %.2e", -excess)};
    const double ratio = excess / (0.05 * (1.0 + sum_l));
    worst_ratio[n] = std::max(worst_ratio[n], ratio);
    violations[n] += ratio >= 1.0;
  }
  const bool ok = worst_aug <= 1e-9 && violations[1] + violations[2] + violations[3] == 0;
  return {ok, format("augmented max gap %.2e; random 20000-frame excess / allowance: n=1 max %.3f, n=2 max %.3f, "
                     "n=3 max %.3f (%d of 66 over)",
                     worst_aug, worst_ratio[1], worst_ratio[2], worst_ratio[3], violations[3])};
}

double product_of_signed_sums(double mu, const Vector& l) {
  double p = 1.0;
  for (double v : signed_sums(mu, l)) p *= v;
  return p;
}

Outcome expansions() {
  SplitMix64 rng(104);
  double worst2 = 0.0, worst3 = 0.0;
  auto tau = [](const Vector& l, int k) {
    double s = 0.0;
    for (double v : l) s += std::pow(v, 2 * k);
    return s;
  };
  for (int t = 0; t < 10000; ++t) {
    const double mu = 2.0 * rng.gaussian();
    const Vector l2{std::abs(rng.gaussian()), std::abs(rng.gaussian())};
    const double t1 = tau(l2, 1), t2 = tau(l2, 2);
    const double e2 = std::pow(mu, 4) - 2 * t1 * mu * mu + (2 * t2 - t1 * t1);
    worst2 = std::max(worst2, rel_gap(product_of_signed_sums(mu, l2), e2, 1e-12));

    const Vector l3{std::abs(rng.gaussian()), std::abs(rng.gaussian()), std::abs(rng.gaussian())};
    const double s1 = tau(l3, 1), s2 = tau(l3, 2), s3 = tau(l3, 3);
    const double e3 = std::pow(mu, 8) - 4 * s1 * std::pow(mu, 6) + (4 * s2 + 2 * s1 * s1) * std::pow(mu, 4) +
                      (4.0 / 3.0) * (-16 * s3 + 18 * s2 * s1 - 5 * s1 * s1 * s1) * mu * mu +
                      std::pow(2 * s2 - s1 * s1, 2);
    worst3 = std::max(worst3, rel_gap(product_of_signed_sums(mu, l3), e3, 1e-12));
  }
  return {worst2 <= 1e-8 && worst3 <= 1e-8, format("max rel gap n=2 %.2e, n=3 %.2e", worst2, worst3)};
}

Outcome cone_geometry() {
  SplitMix64 rng(105);
  std::size_t failures = 0;
  double worst = 0.0;
  auto expect = [&](bool ok) { failures += !ok; };
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 1 + t % 3;
    DiagPoint p{2.0 * rng.gaussian(), Vector(n)};
    for (double& l : p.lambda) l = rng.gaussian();
    const DiagFlags f = diag_membership(p, 1e-10);
    double max_l = 0.0, sum_l = 0.0;
    for (double l : p.lambda) {
      max_l = std::max(max_l, std::abs(l));
      sum_l += std::abs(l);
    }
    // Cross-section inequalities.
    expect(f.in_P_plus_D == (max_l <= p.t / (2.0 * n) + 1e-10));
    expect(f.in_P_sup_D == (sum_l <= p.t / 2.0 + 1e-10));
    // Polarity against the axis projections.
    bool all_nonneg = true;
    const SymForm h = diag_matrix(p);
    for (std::size_t b = 0; b < f.pairings.size(); ++b) {
      const std::vector<int> eps = sign_vector(b, n);
      double ref = p.t / 2.0;
      for (std::size_t j = 0; j < n; ++j) ref += eps[j] * p.lambda[j];
      worst = std::max({worst, std::abs(f.pairings[b] - ref),
                        std::abs(frobenius_inner(h.matrix(), axis_plane_projection(eps).matrix()) - ref)});
      all_nonneg = all_nonneg && f.pairings[b] >= -1e-10;
    }
    expect(f.in_P_sup_D == all_nonneg);
    const ConeFlags c = cone_membership(h, 1e-10);
    expect(c.in_P_lag == f.in_P_sup_D);
    expect(c.in_P_plus == f.in_P_plus_D);

    // Extreme rays: Lagrangian part of a rank-one projection.
    Vector e(2 * n);
    for (double& v : e) v = rng.gaussian();
    const double en = norm(e);
    for (double& v : e) v /= en;
    const Vector je = apply_j(e);
    const RealMatrix ray = (1.0 / (2.0 * n)) * RealMatrix::identity(2 * n) + 0.5 * (outer(e, e) - outer(je, je));
    worst = std::max(worst, max_abs(lag_part(SymForm(outer(e, e))).matrix() - ray));

    // Inclusions: P_+ in P^+, E + P in P^+, edge orthogonal to D.
    const SymForm a = random_form(n, rng);
    const ConeFlags ca = cone_membership(a);
    if (ca.in_P_plus) expect(ca.in_P_lag);
    if (ca.in_P_lag) expect(ca.in_dual);
    const SymForm b = testutil::random_edge(n, rng);
    expect(lambda_min(SymForm(b.matrix() + random_psd(2 * n, rng))) >= -1e-9);
    expect(std::abs(frobenius_inner(b.matrix(), h.matrix())) < 1e-9);

    // Constructive interior decomposition.
    const SymForm ai = shift(a, 0.1 - lambda_min(a) + rng.uniform());
    const IntDecomposition d = int_decompose(ai);
    expect(max_abs((d.edge + d.positive).matrix() - ai.matrix()) < 1e-10);
    expect(cone_membership(d.edge).in_edge);
    const SymEigen pe = sym_eigen(d.positive.matrix());
    const double pmin = std::min(pe.values.front(), pe.values.back());
    expect(pmin > 0.0);
    expect(std::abs(pmin - lambda_min(ai) / n) < 1e-9 * (1.0 + ai.norm()));
  }
  return {failures == 0 && worst <= 1e-10,
          format("1000 instances, %zu failed checks, max identity residual %.2e", failures, worst)};
}

DomainConfig square(std::size_t n, std::size_t m, const std::string& phi) {
  DomainConfig c;
  c.n = n;
  c.lo.assign(2 * n, -1.0);
  c.hi.assign(2 * n, 1.0);
  c.m = m;
  c.phi = phi;
  return c;
}

double max_error(const GridField& u, const std::string& exact) {
  const Expr e = parse(exact, u.grid.n);
  double err = 0.0;
  for (std::size_t node : u.grid.interior_nodes())
    err = std::max(err, std::abs(u.values[node] - eval(e, u.grid.coords(node))));
  return err;
}

double inhomogeneous_error(std::size_t m, const std::string& exact, const std::string& psi) {
  SolverConfig cfg;
  cfg.mode = SolveMode::Inhomogeneous;
  cfg.domain = square(1, m, exact);
  cfg.psi = psi;
  return max_error(solve_dirichlet(cfg).field, exact);
}

Outcome solver_n1() {
  const std::string q = "(x1^2 + y1^2)/2";
  const double e33 = inhomogeneous_error(33, q, "1");
  const double e65 = inhomogeneous_error(65, q, "1");
  // On the quadratic the centered Hessian is exact, so the remaining error is
  // set by the stopping threshold; the quartic probes the truncation order.
  const std::string quartic = "(x1^4 + y1^4)/12 + (x1^2 + y1^2)/2";
  const std::string psi4 = "(x1^2 + 1)*(y1^2 + 1)";
  const double q33 = inhomogeneous_error(33, quartic, psi4);
  const double q65 = inhomogeneous_error(65, quartic, psi4);
  const double r = e33 / e65, rq = q33 / q65;
  const bool ok = e33 <= 1e-2 && r >= 3.0 && r <= 5.0 && rq >= 3.0 && rq <= 5.0;
  return {ok, format("quadratic err33 %.2e err65 %.2e ratio %.2f; quartic err33 %.2e err65 %.2e ratio %.2f", e33, e65,
                     r, q33, q65, rq)};
}

Outcome solver_n2() {
  const std::string edge = "x1^2 + y1^2 - x2^2 - y2^2";
  const std::string quad = "x1^2 + x2^2";
  SolverConfig cfg;
  cfg.domain = square(2, 9, edge);
  cfg.frames_extra = 0;
  const double ea = max_error(solve_dirichlet(cfg).field, edge);
  cfg.domain.phi = quad;
  const double eb = max_error(solve_dirichlet(cfg).field, quad);
  return {ea <= 2e-2 && eb <= 2e-2, format("9^4 grid: edge err %.2e, x1^2+x2^2 err %.2e", ea, eb)};
}

Outcome boundary_module() {
  const char* sphere = "x1^2 + y1^2 + x2^2 + y2^2 - 1";
  const ScalarField rho = make_field(sphere, 2);
  const std::vector<Vector> probes = sample_boundary_probes(rho, 64, 106);
  const BoundaryReport rep = boundary_convexity_report(rho, probes);
  double worst_sphere = 0.0;
  for (double v : rep.min_tangential_trace) worst_sphere = std::max(worst_sphere, std::abs(v - 4.0));

  const BarrierReport bar = barrier_check(rho, Shell{0.05, 0.2}, 64, 107);

  // Chain rule: Hess(g o r) = g' Hess r + g'' dr dr^t, traced on random planes.
  const std::string r = "sin(x1)*y2 + x2^2 - cos(y1) + 0.5*x1*y1";
  const ScalarField rf = make_field(r, 2);
  const ScalarField comp = make_field("exp(" + r + ") + (" + r + ")^3/3", 2);
  SplitMix64 rng(108);
  double chain = 0.0;
  for (int t = 0; t < 100; ++t) {
    Vector x(4);
    for (double& v : x) v = 1.4 * rng.uniform() - 0.7;
    const Jet jr = grad_hess_fd(rf, x);
    const Jet jc = grad_hess_fd(comp, x);
    const double s = jr.value;
    const double d1 = std::exp(s) + s * s, d2 = std::exp(s) + 2 * s;
    for (int k = 0; k < 5; ++k) {
      const LagFrame w = random_lag_frame(2, rng);
      chain = std::max(chain, std::abs(trace_on_plane(jc.hessian, w) - d1 * trace_on_plane(jr.hessian, w) -
                                       d2 * projected_norm2(jr.gradient, w)));
    }
  }

  // Invariance: multiplying rho by a positive f scales the traces by f.
  const char* f = "exp(0.3*x1 + 0.2*y2)*(1 + 0.1*x2^2)";
  const ScalarField frho = make_field(std::string("(") + f + ")*(" + sphere + ")", 2);
  const ScalarField fs = make_field(f, 2);
  const BoundaryReport rep2 = boundary_convexity_report(frho, probes);
  double inv = 0.0;
  for (std::size_t i = 0; i < probes.size(); ++i)
    inv = std::max(inv, std::abs(rep2.min_tangential_trace[i] - fs(probes[i]) * rep.min_tangential_trace[i]));

  const bool ok = rep.verdict == Convexity::StrictlyConvex && worst_sphere <= 1e-6 && bar.min_lambda1 > 0.0 &&
                  bar.strict && chain <= 1e-5 && inv <= 1e-5 && rep2.verdict == rep.verdict;
  return {ok, format("sphere %s, max |trace - 4| %.2e; barrier min Lambda_1 %.3f; chain rule %.2e; invariance %.2e",
                     convexity_name(rep.verdict).c_str(), worst_sphere, bar.min_lambda1, chain, inv)};
}

Outcome freeness_exact() {
  SplitMix64 rng(109);
  double lag = 0.0, line = 0.0;
  for (int t = 0; t < 50; ++t) {
    // Rotate the standard examples by a random unitary.
    const RealMatrix g = t == 0 ? RealMatrix::identity(4) : haar_symplectic_orthogonal(2, rng);
    RealMatrix plane(4, 2), cline(4, 2);
    plane(0, 0) = 1.0;  // x1, x2
    plane(2, 1) = 1.0;
    cline(0, 0) = 1.0;  // x1, y1
    cline(1, 1) = 1.0;
    lag = std::max(lag, std::abs(freeness(g * plane).lambda1));
    line = std::max(line, std::abs(freeness(g * cline).lambda1 - 1.0));
  }
  return {lag <= 1e-10 && line <= 1e-10,
          format("Lagrangian plane |Lambda_1| %.2e; complex line |Lambda_1 - 1| %.2e", lag, line)};
}

Outcome linearization() {
  SplitMix64 rng(110);
  double worst = 1e300;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 1 + t % 3;
    const SymForm a0 = random_form(n, rng);
    const SymForm a = shift(a0, 0.05 - lambda_min(a0) + rng.uniform());
    const RealMatrix p = random_psd(2 * n, rng);
    double tr = 0.0;
    for (std::size_t i = 0; i < 2 * n; ++i) tr += p(i, i);
    const SymForm grad = m_lag_gradient(a);
    worst = std::min(worst, frobenius_inner(grad.matrix(), (1.0 / tr) * p) / std::max(1.0, std::abs(m_lag(a))));
  }
  return {worst > 0.0, format("1000 interior forms, min <grad, P> / max(1, M_Lag) = %.3e", worst)};
}

Outcome invariance_suite() {
  SplitMix64 rng(111);
  double translation = 0.0, unitary = 0.0, reflection = 0.0, monotone = 0.0, laplace = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 1 + t % 3;
    const SymForm a = random_form(n, rng);
    const Vector ga = garding_eigenvalues(a).eigenvalues;
    const std::size_t big_n = ga.size();

    const double s = 2.0 * rng.gaussian();
    double prod = 1.0;
    for (double v : ga) prod *= s + v;
    translation = std::max(translation, rel_gap(m_lag(shift(a, s)), prod, 1e-12));

    const RealMatrix g = haar_symplectic_orthogonal(n, rng);
    const Vector gg = garding_eigenvalues(SymForm(g * a.matrix() * g.transpose())).eigenvalues;
    for (std::size_t k = 0; k < big_n; ++k) unitary = std::max(unitary, std::abs(gg[k] - ga[k]));

    const Vector gm = garding_eigenvalues(-a).eigenvalues;
    for (std::size_t k = 0; k < big_n; ++k) reflection = std::max(reflection, std::abs(gm[k] + ga[big_n - 1 - k]));

    const Vector gp = garding_eigenvalues(a + SymForm(random_psd(2 * n, rng))).eigenvalues;
    for (std::size_t k = 0; k < big_n; ++k) monotone = std::max(monotone, ga[k] - gp[k]);

    // Lambda_1 >= 0 implies tr >= 0.
    const SymForm c = shift(a, -lambda_min(a) + 0.1 * std::abs(rng.gaussian()));
    laplace = std::max(laplace, -c.trace());
  }
  const bool ok = translation <= 1e-8 && unitary <= 1e-8 && reflection <= 1e-8 && monotone <= 1e-8 && laplace <= 1e-8;
  return {ok, format("translation %.1e, unitary %.1e, reflection %.1e, monotone %.1e, laplace %.1e", translation,
                     unitary, reflection, monotone, laplace)};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> expected;
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--expect-fail") expected.insert(std::atoi(argv[++i]));
  const std::vector<Criterion> criteria{
      {1, "triple-construction agreement", 60, triple_agreement},
      {2, "n=1 collapse to det", 1, n1_collapse},
      {3, "min-trace oracle", 120, oracle},
      {4, "symmetric-function expansions", 5, expansions},
      {5, "cone geometry", 30, cone_geometry},
      {6, "solver n=1 inhomogeneous", 60, solver_n1},
      {7, "solver n=2 homogeneous", 600, solver_n2},
      {8, "boundary module", 30, boundary_module},
      {9, "freeness exactness", 1, freeness_exact},
      {10, "linearization positivity", 30, linearization},
      {11, "duality and invariance suite", 30, invariance_suite},
  };
  std::set<int> failed;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.budget_s;
    const bool pass = o.pass && in_time;
    if (!pass) failed.insert(c.id);
    std::printf("%s %2d %s: %s [%.2fs of %.0fs%s]\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs,
                c.budget_s, in_time ? "" : ", over budget");
    std::fflush(stdout);
  }
  std::printf("%zu of %zu criteria pass", criteria.size() - failed.size(), criteria.size());
  if (!expected.empty()) {
    std::printf("; expected red:");
    for (int id : expected) std::printf(" %d", id);
  }
  std::printf("\n");
  return failed == expected ? 0 : 1;
}

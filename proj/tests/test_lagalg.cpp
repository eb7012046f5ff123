#include <algorithm>

#include "doctest.h"
#include "helpers.hpp"

using namespace lagpot;
using testutil::random_form;
using testutil::rel_gap;

namespace {

void check_spectrum_invariants(const SymForm& a, const LagSpectrum& s) {
  const std::size_t n = a.n();
  const RealMatrix& f = s.frame;
  CHECK(max_abs(f.transpose() * f - RealMatrix::identity(2 * n)) < 1e-10);
  const SymForm sk = skew_part(a);
  for (std::size_t j = 0; j < n; ++j) {
    if (j > 0) CHECK(s.lambdas[j - 1] >= s.lambdas[j]);
    CHECK(s.lambdas[j] >= 0.0);
    const Vector e = f.column(2 * j);
    const Vector je = f.column(2 * j + 1);
    const Vector jimg = apply_j(e);
    for (std::size_t i = 0; i < 2 * n; ++i) CHECK(std::abs(je[i] - jimg[i]) < 1e-9);
    const Vector se = sk.matrix() * e;
    const Vector sje = sk.matrix() * je;
    for (std::size_t i = 0; i < 2 * n; ++i) {
      CHECK(std::abs(se[i] - s.lambdas[j] * e[i]) < 1e-8 * (1.0 + a.norm()));
      CHECK(std::abs(sje[i] + s.lambdas[j] * je[i]) < 1e-8 * (1.0 + a.norm()));
    }
  }
}

double expansion_n2(double mu, double t1, double t2) {
  return std::pow(mu, 4) - 2 * t1 * mu * mu + (2 * t2 - t1 * t1);
}

double expansion_n3(double mu, double t1, double t2, double t3) {
  return std::pow(mu, 8) - 4 * t1 * std::pow(mu, 6) + (4 * t2 + 2 * t1 * t1) * std::pow(mu, 4) +
         (4.0 / 3.0) * (-16 * t3 + 18 * t2 * t1 - 5 * t1 * t1 * t1) * mu * mu + std::pow(2 * t2 - t1 * t1, 2);
}

double product_of_signed_sums(double mu, const Vector& l) {
  double p = 1.0;
  for (double v : signed_sums(mu, l)) p *= v;
  return p;
}

}  // namespace

TEST_CASE("SymForm validation") {
  CHECK_THROWS_AS(SymForm(RealMatrix::from_rows({{1, 2}, {0, 1}})), Error);
  CHECK_THROWS_AS(SymForm(RealMatrix(3, 3)), Error);
  const SymForm a(RealMatrix::from_rows({{1, 2 + 1e-12}, {2, 1}}));
  CHECK(a(0, 1) == a(1, 0));
}

TEST_CASE("decompose examples") {
  const Decomposition d = decompose(SymForm::diagonal({1, 2, 3, 4}));
  CHECK(d.trace_part == doctest::Approx(2.5));
  CHECK(max_abs(d.skew.matrix() - RealMatrix::diagonal({-0.5, 0.5, -0.5, 0.5})) < 1e-14);
  CHECK(max_abs(d.herm0.matrix() - RealMatrix::diagonal({-1, -1, 1, 1})) < 1e-14);

  const Decomposition i = decompose(SymForm::identity(2));
  CHECK(i.trace_part == 1.0);
  CHECK(i.herm0.norm() == 0.0);
  CHECK(i.skew.norm() == 0.0);

  const SymForm a = SymForm::diagonal({2, -2, 0, 0});
  const Decomposition s = decompose(a);
  CHECK(s.trace_part == 0.0);
  CHECK(s.herm0.norm() < 1e-15);
  CHECK(max_abs(s.skew.matrix() - a.matrix()) < 1e-15);
}

TEST_CASE("decompose invariants on random forms") {
  SplitMix64 rng(101);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 1 + t % 4;
    const SymForm a = random_form(n, rng);
    const Decomposition d = decompose(a);
    const RealMatrix j = complex_structure(n);
    CHECK(max_abs(d.reconstruct().matrix() - a.matrix()) < 1e-10);
    CHECK(max_abs(d.herm0.matrix() * j - j * d.herm0.matrix()) < 1e-10);
    CHECK(std::abs(d.herm0.trace()) < 1e-10);
    CHECK(max_abs(d.skew.matrix() * j + j * d.skew.matrix()) < 1e-10);
    const RealMatrix tp = d.trace_part * RealMatrix::identity(2 * n);
    CHECK(std::abs(frobenius_inner(tp, d.herm0.matrix())) < 1e-9);
    CHECK(std::abs(frobenius_inner(tp, d.skew.matrix())) < 1e-9);
    CHECK(std::abs(frobenius_inner(d.herm0.matrix(), d.skew.matrix())) < 1e-9);
    const Decomposition again = decompose(d.reconstruct());
    CHECK(max_abs(again.skew.matrix() - d.skew.matrix()) < 1e-12);
    CHECK(max_abs(again.herm0.matrix() - d.herm0.matrix()) < 1e-12);
    CHECK(max_abs(lag_part(a).matrix() - (a - d.herm0).matrix()) < 1e-12);
  }
}

TEST_CASE("lag_part examples") {
  CHECK(max_abs(lag_part(SymForm::diagonal({1, 2, 3, 4})).matrix() - RealMatrix::diagonal({2, 3, 2, 3})) < 1e-14);
  CHECK(lag_part(SymForm::diagonal({2, 2, -2, -2})).norm() < 1e-15);
  SplitMix64 rng(5);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 1 + t % 3;
    Vector e(2 * n);
    for (double& v : e) v = rng.gaussian();
    const double ne = norm(e);
    for (double& v : e) v /= ne;
    const Vector je = apply_j(e);
    const RealMatrix rhs = (1.0 / (2.0 * n)) * RealMatrix::identity(2 * n) + 0.5 * (outer(e, e) - outer(je, je));
    CHECK(max_abs(lag_part(SymForm(outer(e, e))).matrix() - rhs) < 1e-10);
  }
}

TEST_CASE("lag_spectrum examples") {
  const LagSpectrum i = lag_spectrum(SymForm::identity(2));
  CHECK(i.mu == 2.0);
  CHECK(i.lambdas == Vector{0.0, 0.0});
  check_spectrum_invariants(SymForm::identity(2), i);

  const SymForm a = SymForm::diagonal({2, -2, 0, 0});
  const LagSpectrum s = lag_spectrum(a);
  CHECK(s.mu == doctest::Approx(0.0));
  CHECK(s.lambdas[0] == doctest::Approx(2.0));
  CHECK(std::abs(s.lambdas[1]) < 1e-12);
  check_spectrum_invariants(a, s);

  const SymForm b = SymForm::diagonal({1, 2, 3, 4});
  const LagSpectrum t = lag_spectrum(b);
  CHECK(t.mu == doctest::Approx(5.0));
  CHECK(t.lambdas[0] == doctest::Approx(0.5));
  CHECK(t.lambdas[1] == doctest::Approx(0.5));
  check_spectrum_invariants(b, t);
}

TEST_CASE("lag_spectrum pairing on random and degenerate inputs") {
  SplitMix64 rng(77);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + t % 4;
    const SymForm a = random_form(n, rng);
    check_spectrum_invariants(a, lag_spectrum(a));
  }
  // Degenerate clusters: conjugate a diagonal skew form with repeated lambdas.
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 2 + t % 3;
    Vector diag(2 * n);
    for (std::size_t j = 0; j < n; ++j) {
      const double l = (j % 2 == 0) ? 1.5 : 0.0;
      diag[2 * j] = l;
      diag[2 * j + 1] = -l;
    }
    const RealMatrix g = haar_symplectic_orthogonal(n, 1000 + t);
    const SymForm a(g * RealMatrix::diagonal(std::span<const double>(diag)) * g.transpose() +
                    0.3 * RealMatrix::identity(2 * n));
    const LagSpectrum s = lag_spectrum(a);
    check_spectrum_invariants(a, s);
    for (std::size_t j = 0; j < n; ++j) CHECK(s.lambdas[j] == doctest::Approx(j < (n + 1) / 2 ? 1.5 : 0.0));
  }
}

TEST_CASE("garding eigenvalues and M_Lag examples") {
  CHECK(garding_eigenvalues(SymForm::diagonal({1, 2, 3, 4})).eigenvalues == Vector{4, 5, 5, 6});
  const Vector g2 = garding_eigenvalues(SymForm::diagonal({2, 0, 2, 0})).eigenvalues;
  const Vector want{0, 2, 2, 4};
  for (std::size_t i = 0; i < 4; ++i) CHECK(g2[i] == doctest::Approx(want[i]).epsilon(1e-12));
  const GardingData g3 = garding_eigenvalues(SymForm::identity(3));
  CHECK(g3.eigenvalues.size() == 8);
  for (double v : g3.eigenvalues) CHECK(v == 3.0);
  CHECK(g3.sign_labels.size() == 8);

  CHECK(m_lag(SymForm(RealMatrix::from_rows({{2, 1}, {1, 0}}))) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(m_lag(SymForm::identity(2)) == 16.0);
  CHECK(m_lag(SymForm::diagonal({1, 2, 3, 4})) == doctest::Approx(600.0).epsilon(1e-14));
  CHECK_THROWS_AS(garding_from_spectrum(0.0, Vector(15, 0.0)), Error);
  CHECK_THROWS_AS(garding_eigenvalues(SymForm::identity(3), 2), Error);
}

TEST_CASE("sign labels match their eigenvalues") {
  SplitMix64 rng(8);
  const SymForm a = random_form(3, rng);
  const LagSpectrum s = lag_spectrum(a);
  const GardingData g = garding_eigenvalues(a);
  for (std::size_t i = 0; i < g.eigenvalues.size(); ++i) {
    double v = s.mu;
    for (std::size_t j = 0; j < 3; ++j) v += g.sign_labels[i][j] * s.lambdas[j];
    CHECK(v == doctest::Approx(g.eigenvalues[i]).epsilon(1e-12));
  }
  CHECK(g.eigenvalues.front() == doctest::Approx(s.mu - s.lambdas[0] - s.lambdas[1] - s.lambdas[2]));
  CHECK(g.eigenvalues.back() == doctest::Approx(s.mu + s.lambdas[0] + s.lambdas[1] + s.lambdas[2]));
}

TEST_CASE("n=1 M_Lag is the determinant") {
  SplitMix64 rng(1);
  for (int t = 0; t < 2000; ++t) {
    const SymForm a = random_form(1, rng);
    const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    CHECK(std::abs(m_lag(a) - det) <= 1e-10 * (1.0 + std::abs(det)));
  }
}

TEST_CASE("branch_value and canonical_op") {
  const SymForm a = SymForm::diagonal({2, -2, 0, 0});
  CHECK(branch_value(a, 1) == doctest::Approx(-2.0));
  CHECK(branch_value(a, 4) == doctest::Approx(2.0));
  for (std::size_t k = 1; k <= 4; ++k) CHECK(branch_value(SymForm::identity(2), k) == 2.0);
  CHECK_THROWS_AS(branch_value(a, 0), Error);
  CHECK_THROWS_AS(branch_value(a, 5), Error);

  CHECK(canonical_op(SymForm::identity(2)) == 1.0);
  CHECK(std::abs(canonical_op(SymForm::diagonal({2, 0, 2, 0}))) < 1e-12);
  SplitMix64 rng(3);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 1 + t % 3;
    const SymForm b = random_form(n, rng);
    const SymForm shifted = b + 3.0 * SymForm::identity(n);
    CHECK(std::abs(canonical_op(shifted) - canonical_op(b) - 3.0) < 1e-10);
  }
}

TEST_CASE("m_lag_partial and m_lag_root") {
  const SymForm a = SymForm::diagonal({1, 2, 3, 4});
  CHECK(m_lag_partial(a, 1) == doctest::Approx(600.0));
  CHECK(m_lag_partial(a, 2) == doctest::Approx(150.0));
  CHECK(m_lag_partial(a, 4) == doctest::Approx(6.0));
  CHECK(m_lag_root(a).value() == doctest::Approx(std::pow(600.0, 0.25)));
  CHECK(!m_lag_root(SymForm::diagonal({2, -2, 0, 0})).has_value());
}

TEST_CASE("cone membership examples") {
  const ConeFlags e = cone_membership(SymForm::diagonal({2, 2, -2, -2}));
  CHECK(e.in_edge);
  CHECK(e.in_P_lag);
  CHECK(e.in_dual);
  CHECK(!e.in_interior_P_lag);
  for (double v : garding_eigenvalues(SymForm::diagonal({2, 2, -2, -2})).eigenvalues) CHECK(std::abs(v) < 1e-12);

  const ConeFlags s = cone_membership(SymForm::diagonal({2, -2, 0, 0}));
  CHECK(!s.in_P_lag);
  CHECK(s.in_dual);

  // Axis plane projection onto span{x1, x2}.
  const ConeFlags p = cone_membership(SymForm::diagonal({1, 0, 1, 0}));
  CHECK(p.in_P_plus);
  CHECK(p.in_P_lag);
  CHECK(!cone_membership(SymForm::diagonal({1, 1, 0, 0})).in_P_plus);
}

TEST_CASE("power traces") {
  const Vector t = power_traces(SymForm::diagonal({2, -2, 0, 0}), 2);
  CHECK(t[0] == doctest::Approx(4.0));
  CHECK(t[1] == doctest::Approx(16.0));
  for (double v : power_traces(SymForm::identity(3), 4)) CHECK(v == 0.0);
  CHECK(power_traces(SymForm::diagonal({1, 2, 3, 4}), 1)[0] == doctest::Approx(0.5));
  SplitMix64 rng(4);
  for (int k = 0; k < 50; ++k) {
    const SymForm a = random_form(3, rng);
    const LagSpectrum s = lag_spectrum(a);
    const Vector tau = power_traces(a, 3);
    for (std::size_t l = 1; l <= 3; ++l) {
      double ref = 0.0;
      for (double v : s.lambdas) ref += std::pow(v, 2.0 * l);
      CHECK(rel_gap(tau[l - 1], ref, 1e-12) < 1e-9);
    }
  }
}

TEST_CASE("m_lag_gradient") {
  const SymForm g1 = m_lag_gradient(SymForm::diagonal({2, 3}));
  CHECK(std::abs(g1(0, 0) - 3.0) < 1e-6);
  CHECK(std::abs(g1(1, 1) - 2.0) < 1e-6);
  CHECK(std::abs(g1(0, 1)) < 1e-6);

  const SymForm gi = m_lag_gradient(SymForm::identity(2));
  for (std::size_t i = 0; i < 4; ++i) CHECK(gi(i, i) == doctest::Approx(gi(0, 0)).epsilon(1e-8));
  CHECK(gi(0, 0) > 0.0);
  CHECK(std::abs(gi(0, 1)) < 1e-6);

  SplitMix64 rng(12);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 1 + t % 3;
    SymForm a = random_form(n, rng);
    a = a + (1.0 - lambda_min(a) + rng.uniform()) * (1.0 / n) * SymForm::identity(n);
    REQUIRE(lambda_min(a) > 0.0);
    const SymForm grad = m_lag_gradient(a);
    const RealMatrix p = testutil::random_psd(2 * n, rng);
    const double h = 1e-4;
    const double fd = (m_lag(SymForm(a.matrix() + h * p)) - m_lag(SymForm(a.matrix() - h * p))) / (2 * h);
    const double an = frobenius_inner(grad.matrix(), p);
    CHECK(rel_gap(an, fd, 1e-9) < 1e-5);
    CHECK(an > 0.0);
  }
}

TEST_CASE("int_decompose") {
  const IntDecomposition d = int_decompose(SymForm::diagonal({1, 2, 3, 4}));
  CHECK(max_abs(d.positive.matrix() - RealMatrix::diagonal({2, 3, 2, 3})) < 1e-12);
  CHECK(max_abs(d.edge.matrix() - RealMatrix::diagonal({-1, -1, 1, 1})) < 1e-12);
  CHECK(d.margin == doctest::Approx(2.0));

  const IntDecomposition i = int_decompose(SymForm::identity(2));
  CHECK(max_abs(i.positive.matrix() - RealMatrix::identity(4)) < 1e-14);
  CHECK(i.edge.norm() < 1e-14);

  CHECK_THROWS_AS(int_decompose(SymForm::diagonal({2, -2, 0, 0})), Error);

  SplitMix64 rng(21);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 1 + t % 4;
    SymForm a = random_form(n, rng);
    a = a + (0.1 - lambda_min(a) + rng.uniform()) * (1.0 / n) * SymForm::identity(n);
    const IntDecomposition r = int_decompose(a);
    CHECK(max_abs((r.edge + r.positive).matrix() - a.matrix()) < 1e-10);
    CHECK(cone_membership(r.edge).in_edge);
    const SymEigen pe = sym_eigen(r.positive.matrix());
    CHECK(pe.values.back() > 0.0);
    CHECK(std::abs(pe.values.back() - lambda_min(a) / n) < 1e-9 * (1.0 + a.norm()));
  }
}

TEST_CASE("operator invariants") {
  SplitMix64 rng(2024);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 1 + t % 4;
    const SymForm a = random_form(n, rng);
    const Vector ga = garding_eigenvalues(a).eigenvalues;
    const std::size_t big_n = ga.size();

    // Translation.
    const double s = 2.0 * rng.gaussian();
    double prod = 1.0;
    for (double v : ga) prod *= s + v;
    CHECK(rel_gap(m_lag(a + (s / n) * SymForm::identity(n)), prod) < 1e-8);

    // U(n) invariance.
    const RealMatrix g = haar_symplectic_orthogonal(n, rng);
    const SymForm ag(g * a.matrix() * g.transpose());
    CHECK(rel_gap(m_lag(ag), m_lag(a)) < 1e-8);
    const Vector gg = garding_eigenvalues(ag).eigenvalues;
    for (std::size_t k = 0; k < big_n; ++k) CHECK(std::abs(gg[k] - ga[k]) < 1e-8 * (1.0 + a.norm()));

    // Reflection.
    const Vector gm = garding_eigenvalues(-a).eigenvalues;
    for (std::size_t k = 0; k < big_n; ++k) CHECK(std::abs(gm[k] + ga[big_n - 1 - k]) < 1e-10 * (1.0 + a.norm()));

    // Monotonicity.
    const SymForm p(testutil::random_psd(2 * n, rng));
    const Vector gp = garding_eigenvalues(a + p).eigenvalues;
    for (std::size_t k = 0; k < big_n; ++k) CHECK(gp[k] >= ga[k] - 1e-9);
    CHECK(lambda_min(p) >= -1e-9);

    // Laplacian containment and convexity closure.
    const SymForm c = a + (-lambda_min(a) / n + std::abs(rng.gaussian())) * SymForm::identity(n);
    CHECK(c.trace() >= -1e-9);
    Vector v(2 * n);
    for (double& x : v) x = rng.gaussian();
    CHECK(lambda_min(SymForm(rng.uniform() * c.matrix() + outer(v, v))) >= -1e-9);

    // Edge kernel.
    const SymForm b = testutil::random_edge(n, rng);
    for (double x : garding_eigenvalues(b).eigenvalues) CHECK(std::abs(x) < 1e-10 * (1.0 + b.norm()));
  }
}

TEST_CASE("symmetric function expansions") {
  SplitMix64 rng(5);
  for (int t = 0; t < 2000; ++t) {
    const double mu = 2.0 * rng.gaussian();
    Vector l2{std::abs(rng.gaussian()), std::abs(rng.gaussian())};
    auto tau = [](const Vector& l, int k) {
      double s = 0.0;
      for (double v : l) s += std::pow(v, 2 * k);
      return s;
    };
    const double p2 = product_of_signed_sums(mu, l2);
    CHECK(rel_gap(p2, expansion_n2(mu, tau(l2, 1), tau(l2, 2)), 1e-12) < 1e-8);
    Vector l3{std::abs(rng.gaussian()), std::abs(rng.gaussian()), std::abs(rng.gaussian())};
    const double p3 = product_of_signed_sums(mu, l3);
    CHECK(rel_gap(p3, expansion_n3(mu, tau(l3, 1), tau(l3, 2), tau(l3, 3)), 1e-12) < 1e-8);
  }
}

TEST_CASE("product is symmetric in (mu, lambda) and even in each") {
  SplitMix64 rng(6);
  for (int t = 0; t < 200; ++t) {
    Vector all{rng.gaussian(), rng.gaussian(), rng.gaussian(), rng.gaussian()};
    const double ref = product_of_signed_sums(all[0], Vector(all.begin() + 1, all.end()));
    std::vector<int> perm{0, 1, 2, 3};
    for (int k = static_cast<int>(rng.uniform() * 24); k > 0; --k) std::next_permutation(perm.begin(), perm.end());
    Vector p(4);
    for (std::size_t i = 0; i < 4; ++i) p[i] = all[perm[i]] * (rng.uniform() < 0.5 ? -1.0 : 1.0);
    const double got = product_of_signed_sums(p[0], Vector(p.begin() + 1, p.end()));
    CHECK(rel_gap(got, ref, 1e-12) < 1e-10);
  }
}

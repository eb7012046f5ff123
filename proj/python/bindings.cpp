#include <iostream>

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lagpot/boundary.hpp"
#include "lagpot/cli.hpp"
#include "lagpot/constructions.hpp"
#include "lagpot/laggrass.hpp"
#include "lagpot/pluriharm.hpp"
#include "lagpot/solver.hpp"

namespace py = pybind11;
using namespace lagpot;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

RealMatrix to_matrix(const Array& a) {
  if (a.ndim() != 2) throw Error(ErrorCode::InvalidArgument, "expected a 2-d array");
  RealMatrix m(a.shape(0), a.shape(1));
  auto r = a.unchecked<2>();
  for (py::ssize_t i = 0; i < a.shape(0); ++i)
    for (py::ssize_t j = 0; j < a.shape(1); ++j) m(i, j) = r(i, j);
  return m;
}

SymForm to_form(const Array& a) { return SymForm(to_matrix(a)); }

py::array_t<double> from_matrix(const RealMatrix& m) {
  py::array_t<double> out({m.rows(), m.cols()});
  std::copy(m.data().begin(), m.data().end(), out.mutable_data());
  return out;
}

py::array_t<double> from_vector(std::span<const double> v) {
  py::array_t<double> out(v.size());
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

// Grid data as an array indexed [i_x1, i_y1, ...]; axis 0 varies fastest in storage.
template <class T>
py::array_t<T> grid_array(const Grid& g, const std::vector<T>& v) {
  std::vector<py::ssize_t> shape(g.dim(), static_cast<py::ssize_t>(g.m)), strides(g.dim());
  for (std::size_t a = 0; a < g.dim(); ++a) strides[a] = static_cast<py::ssize_t>(g.stride(a) * sizeof(T));
  py::array_t<T> out(shape, strides);
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

py::dict diagnostics_dict(const SolveDiagnostics& d) {
  py::dict r;
  r["iterations"] = d.iterations;
  r["final_residual"] = d.final_residual;
  r["threshold"] = d.threshold;
  r["converged"] = d.converged;
  r["min_lambda1"] = d.min_lambda1;
  r["frame_sensitivity"] = d.frame_sensitivity;
  r["boundary_min"] = d.boundary_min;
  r["boundary_max"] = d.boundary_max;
  r["interior_min"] = d.interior_min;
  r["interior_max"] = d.interior_max;
  r["interior_count"] = d.interior_count;
  return r;
}

py::dict solve(std::size_t n, std::string phi, std::size_t m, std::pair<double, double> box,
               std::optional<std::string> rho, std::string mode, std::size_t k, std::string psi, std::size_t extra,
               std::uint64_t seed, double h_frac, double tol, std::optional<std::size_t> max_iters, double relax,
               std::size_t threads) {
  SolverConfig cfg;
  cfg.domain.n = n;
  cfg.domain.lo.assign(2 * n, box.first);
  cfg.domain.hi.assign(2 * n, box.second);
  cfg.domain.m = m;
  cfg.domain.rho = std::move(rho);
  cfg.domain.phi = std::move(phi);
  cfg.mode = parse_solve_mode(mode);
  cfg.k = k;
  cfg.psi = std::move(psi);
  cfg.frames_extra = extra;
  cfg.frames_seed = seed;
  cfg.h_frac = h_frac;
  cfg.tol = tol;
  cfg.max_iters = max_iters;
  cfg.relax = relax;
  cfg.threads = threads;
  SolveResult res;
  {
    py::gil_scoped_release release;
    res = solve_dirichlet(cfg);
  }
  const Grid& g = res.field.grid;
  std::vector<std::int8_t> mask(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) mask[i] = static_cast<std::int8_t>(g.mask[i]);
  py::dict r;
  r["values"] = grid_array(g, res.field.values);
  r["mask"] = grid_array(g, mask);
  r["h"] = g.h;
  r["axis"] = from_vector(Vector(g.lo.begin(), g.lo.end()));
  r["residual_max"] = residual_report(res.field, cfg).max_abs;
  r["diagnostics"] = diagnostics_dict(res.diagnostics);
  return r;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Lagrangian Monge-Ampere operator, cones and Dirichlet solver.";

  static py::exception<Error> error(m, "LagpotError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      // args = (code name, message)
      PyErr_SetObject(error.ptr(), py::make_tuple(std::string(error_code_name(e.code())), e.what()).ptr());
    }
  });

  m.def("m_lag", [](const Array& a) { return m_lag(to_form(a)); }, py::arg("a"),
        "Product of the Garding eigenvalues.");
  m.def("lambda_min", [](const Array& a) { return lambda_min(to_form(a)); }, py::arg("a"));
  m.def("canonical_op", [](const Array& a) { return canonical_op(to_form(a)); }, py::arg("a"));
  m.def("garding_eigenvalues", [](const Array& a) { return from_vector(garding_eigenvalues(to_form(a)).eigenvalues); },
        py::arg("a"), "Ascending.");
  m.def(
      "lag_spectrum",
      [](const Array& a) {
        const LagSpectrum s = lag_spectrum(to_form(a));
        py::dict r;
        r["mu"] = s.mu;
        r["lambdas"] = from_vector(s.lambdas);
        r["frame"] = from_matrix(s.frame);
        return r;
      },
      py::arg("a"));
  m.def("lag_part", [](const Array& a) { return from_matrix(lag_part(to_form(a)).matrix()); }, py::arg("a"));
  m.def("m_lag_gradient", [](const Array& a) { return from_matrix(m_lag_gradient(to_form(a)).matrix()); },
        py::arg("a"));
  m.def(
      "cone_membership",
      [](const Array& a, std::optional<double> tol) {
        const ConeFlags f = cone_membership(to_form(a), tol);
        py::dict r;
        r["in_P_lag"] = f.in_P_lag;
        r["in_interior_P_lag"] = f.in_interior_P_lag;
        r["in_dual"] = f.in_dual;
        r["in_edge"] = f.in_edge;
        r["in_P_plus"] = f.in_P_plus;
        return r;
      },
      py::arg("a"), py::arg("tol") = py::none());
  m.def(
      "int_decompose",
      [](const Array& a) {
        const IntDecomposition d = int_decompose(to_form(a));
        return py::make_tuple(from_matrix(d.edge.matrix()), from_matrix(d.positive.matrix()));
      },
      py::arg("a"), "Returns (edge, positive) with a = edge + positive.");
  m.def("axis_restricted_det", [](const Array& a) { return axis_restricted_det(to_form(a)); }, py::arg("a"));
  m.def("spinor_det", [](const Array& a) { return spinor_det(to_form(a)); }, py::arg("a"));
  m.def(
      "sampled_min_trace",
      [](const Array& a, std::size_t count, std::uint64_t seed, bool augment) {
        const SymForm f = to_form(a);
        const SampledMin s = augment ? sampled_min_trace(f, count, seed) : sampled_min_trace_random(f, count, seed);
        return py::make_tuple(s.min, from_matrix(s.argmin.columns()));
      },
      py::arg("a"), py::arg("count") = 1000, py::arg("seed") = 1, py::arg("augment") = true);
  m.def(
      "freeness",
      [](const Array& basis, double tol) {
        const FreenessResult f = freeness(to_matrix(basis), tol);
        return py::make_tuple(f.lambda1, f.free);
      },
      py::arg("basis"), py::arg("tol") = 1e-10, "Columns of basis span the subspace.");
  m.def(
      "boundary_report",
      [](const std::string& rho_src, std::size_t n, const Array& probes, double tol) {
        const ScalarField rho = make_field(rho_src, n);
        if (probes.ndim() != 2) throw Error(ErrorCode::InvalidArgument, "probes must be a 2-d array");
        const RealMatrix p = to_matrix(probes);
        std::vector<Vector> pts;
        for (std::size_t i = 0; i < p.rows(); ++i) pts.emplace_back(p.data().begin() + i * p.cols(),
                                                                    p.data().begin() + (i + 1) * p.cols());
        const BoundaryReport rep = boundary_convexity_report(rho, pts, tol);
        py::dict r;
        r["verdict"] = convexity_name(rep.verdict);
        r["margin"] = rep.margin;
        r["min_tangential_trace"] = from_vector(rep.min_tangential_trace);
        r["grad_norm"] = from_vector(rep.grad_norm);
        return r;
      },
      py::arg("rho"), py::arg("n"), py::arg("probes"), py::arg("tol") = 1e-6);
  m.def(
      "sample_boundary_probes",
      [](const std::string& rho_src, std::size_t n, std::size_t count, std::uint64_t seed) {
        const std::vector<Vector> pts = sample_boundary_probes(make_field(rho_src, n), count, seed);
        RealMatrix out(pts.size(), 2 * n);
        for (std::size_t i = 0; i < pts.size(); ++i)
          for (std::size_t j = 0; j < 2 * n; ++j) out(i, j) = pts[i][j];
        return from_matrix(out);
      },
      py::arg("rho"), py::arg("n"), py::arg("count") = 32, py::arg("seed") = 1);
  m.def("solve", &solve, py::arg("n"), py::arg("phi"), py::arg("m") = 33,
        py::arg("box") = std::pair<double, double>(-1.0, 1.0), py::arg("rho") = py::none(),
        py::arg("mode") = "homogeneous", py::arg("k") = 1, py::arg("psi") = "1", py::arg("extra") = 0,
        py::arg("seed") = 1, py::arg("h_frac") = 1.0, py::arg("tol") = 1e-6, py::arg("max_iters") = py::none(),
        py::arg("relax") = 0.8, py::arg("threads") = 1,
        "Dirichlet solve on the box [lo, hi]^{2n}, optionally cut by {rho < 0}. values[i_x1, i_y1, ...].");
  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        py::gil_scoped_release release;
        return cli::run(args, std::cout, std::cerr);
      },
      py::arg("args"), "Run the command-line driver; returns the exit code.");
}

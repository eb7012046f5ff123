#include "lagpot/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "lagpot/boundary.hpp"
#include "lagpot/constructions.hpp"
#include "lagpot/io.hpp"
#include "lagpot/solver.hpp"

#ifndef LAGPOT_VERSION
#define LAGPOT_VERSION "0.0.0"
#endif

namespace lagpot::cli {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

namespace {

namespace fs = std::filesystem;

struct Context {
  fs::path out;
  std::optional<std::uint64_t> seed;
  std::size_t threads = 1;
  Json outputs = Json::array();
  std::uint64_t seed_used = 0;
  bool seed_recorded = false;

  void write(const std::string& name, const std::string& bytes) {
    std::ofstream f(out / name, std::ios::binary);
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw Error(ErrorCode::ConfigError, "cannot write " + (out / name).string());
    Json e;
    e["file"] = name;
    e["bytes"] = bytes.size();
    e["fnv1a64"] = hex64(fnv1a64(bytes));
    outputs.push_back(std::move(e));
  }

  void write_json(const std::string& name, const Json& j) { write(name, j.dump(2) + "\n"); }

  // --seed beats the config value, which beats the default.
  std::uint64_t pick_seed(const Json& cfg, const char* key, std::uint64_t fallback) {
    std::uint64_t s = fallback;
    if (cfg.contains(key)) {
      if (!cfg[key].is_number_unsigned() && !(cfg[key].is_number_integer() && cfg[key].get<long long>() >= 0))
        throw Error(ErrorCode::ConfigError, std::string(key) + " must be a nonnegative integer");
      s = cfg[key].get<std::uint64_t>();
    }
    if (seed) s = *seed;
    seed_used = s;
    seed_recorded = true;
    return s;
  }
};

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// JSON numbers cannot be NaN or infinite; those become null.
Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json nums(std::span<const double> v) {
  Json a = Json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

std::size_t get_size(const Json& cfg, const char* key, std::size_t fallback) {
  if (!cfg.contains(key)) return fallback;
  const Json& v = cfg[key];
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw Error(ErrorCode::ConfigError, std::string(key) + " must be a nonnegative integer");
  return v.get<std::size_t>();
}

double get_double(const Json& cfg, const char* key, double fallback) {
  return cfg.contains(key) ? json_number(cfg[key], key) : fallback;
}

std::string get_string(const Json& cfg, const char* key) {
  if (!cfg.contains(key) || !cfg[key].is_string())
    throw Error(ErrorCode::ConfigError, std::string(key) + " must be a string");
  return cfg[key].get<std::string>();
}

bool get_bool(const Json& cfg, const char* key, bool fallback) {
  if (!cfg.contains(key)) return fallback;
  if (!cfg[key].is_boolean()) throw Error(ErrorCode::ConfigError, std::string(key) + " must be a boolean");
  return cfg[key].get<bool>();
}

const Json& require(const Json& cfg, const char* key) {
  if (!cfg.contains(key)) throw Error(ErrorCode::ConfigError, std::string("missing '") + key + "'");
  return cfg[key];
}

std::vector<Vector> get_points(const Json& j, const std::string& where, std::size_t dim) {
  if (!j.is_array()) throw Error(ErrorCode::ConfigError, where + ": expected a list of points");
  std::vector<Vector> pts;
  for (std::size_t i = 0; i < j.size(); ++i) {
    pts.push_back(json_vector(j[i], where + "[" + std::to_string(i) + "]"));
    if (dim && pts.back().size() != dim)
      throw Error(ErrorCode::ConfigError, where + ": every point needs " + std::to_string(dim) + " coordinates");
  }
  return pts;
}

double rel_gap(double a, double b) {
  const double d = std::abs(a - b);
  if (d <= 1e-9) return 0.0;
  return d / std::max(std::abs(a), std::abs(b));
}

std::string axis_name(std::size_t a) { return (a % 2 ? "y" : "x") + std::to_string(a / 2 + 1); }

// --- subcommands ------------------------------------------------------------

Json cmd_eval(const Json& cfg, Context& ctx) {
  check_keys(cfg, {"form", "tol"}, "eval");
  const SymForm a = symform_from_json(require(cfg, "form"));
  std::optional<double> tol;
  if (cfg.contains("tol")) tol = json_number(cfg["tol"], "tol");
  const LagSpectrum spec = lag_spectrum(a);
  const GardingData g = garding_eigenvalues(a);
  const ConeFlags flags = cone_membership(a, tol);
  const auto root = m_lag_root(a);
  Json r;
  r["n"] = a.n();
  r["mu"] = spec.mu;
  r["lambdas"] = to_json(spec.lambdas);
  r["garding"] = to_json(g.eigenvalues);
  r["m_lag"] = m_lag(a);
  r["m_lag_root"] = root ? Json(*root) : Json(nullptr);
  r["lambda1"] = lambda_min(a);
  r["canonical"] = canonical_op(a);
  r["membership"] = {{"in_P_lag", flags.in_P_lag},
                     {"in_interior_P_lag", flags.in_interior_P_lag},
                     {"in_dual", flags.in_dual},
                     {"in_edge", flags.in_edge},
                     {"in_P_plus", flags.in_P_plus}};
  ctx.write_json("eval.json", r);
  return r;
}

Json cmd_crosscheck(const Json& cfg, Context& ctx) {
  check_keys(cfg, {"form"}, "crosscheck");
  const SymForm a = symform_from_json(require(cfg, "form"));
  const double p = m_lag(a);
  const double d = axis_restricted_det(a);
  const Complex s = spinor_det(a);
  Json r;
  r["product"] = p;
  r["derivation_det"] = d;
  r["spinor_det_re"] = s.real();
  r["spinor_det_im"] = s.imag();
  r["max_rel_gap"] = std::max({rel_gap(p, d), rel_gap(p, s.real()), rel_gap(d, s.real())});
  ctx.write_json("crosscheck.json", r);
  return r;
}

Json cmd_oracle(const Json& cfg, Context& ctx) {
  check_keys(cfg, {"form", "count", "seed", "augment"}, "oracle");
  const SymForm a = symform_from_json(require(cfg, "form"));
  const std::size_t count = get_size(cfg, "count", 1000);
  const std::uint64_t seed = ctx.pick_seed(cfg, "seed", 1);
  const bool augment = get_bool(cfg, "augment", true);
  const SampledMin s = augment ? sampled_min_trace(a, count, seed) : sampled_min_trace_random(a, count, seed);
  const double exact = lambda_min(a);
  Json r;
  r["lambda1_exact"] = exact;
  r["sampled_min"] = s.min;
  r["gap"] = s.min - exact;
  r["argmin_frame"] = to_json(s.argmin);
  ctx.write_json("oracle.json", r);
  return r;
}

Json cmd_pluriharmonic(const Json& cfg, Context& ctx) {
  check_keys(cfg, {"quadratic", "points"}, "pluriharmonic");
  const HermQuadratic h = hermquad_from_json(require(cfg, "quadratic"));
  const SymForm hess = real_hessian(h);
  const RealMatrix j = complex_structure(h.n());
  const RealMatrix comm = hess.matrix() * j - j * hess.matrix();
  const Vector garding = garding_eigenvalues(hess).eigenvalues;
  double max_g = 0.0;
  for (double v : garding) max_g = std::max(max_g, std::abs(v));
  Json r;
  r["n"] = h.n();
  r["real_hessian"] = to_json(hess);
  r["edge_residuals"] = {{"trace", std::abs(hess.trace())},
                         {"j_commutator", max_abs(comm)},
                         {"skew_norm", skew_part(hess).norm()},
                         {"max_abs_garding", max_g}};
  if (cfg.contains("points")) {
    Json vals = Json::array();
    for (const Vector& z : get_points(cfg["points"], "points", 2 * h.n())) vals.push_back(eval_quadratic(h, z));
    r["values"] = vals;
  }
  ctx.write_json("pluriharmonic.json", r);
  return r;
}

Json cmd_boundary(const Json& cfg, Context& ctx) {
  check_keys(cfg,
             {"rho", "n", "probes", "probe_count", "seed", "center", "radius", "tol", "fd_step", "shell",
              "barrier_probes", "upgrade", "csv"},
             "boundary");
  const std::size_t n = get_size(cfg, "n", 0);
  if (n == 0) throw Error(ErrorCode::ConfigError, "boundary: 'n' must be a positive integer");
  const ScalarField rho = make_field(get_string(cfg, "rho"), n, get_double(cfg, "fd_step", 1e-3));
  const std::uint64_t seed = ctx.pick_seed(cfg, "seed", 1);
  const Vector center = cfg.contains("center") ? json_vector(cfg["center"], "center") : Vector{};
  if (!center.empty() && center.size() != 2 * n) throw Error(ErrorCode::ConfigError, "center needs 2n coordinates");
  const double radius = get_double(cfg, "radius", 1.0);
  const double tol = get_double(cfg, "tol", 1e-6);
  if (cfg.contains("probes") && cfg.contains("probe_count"))
    throw Error(ErrorCode::ConfigError, "give either 'probes' or 'probe_count', not both");
  const std::vector<Vector> probes = cfg.contains("probes")
                                         ? get_points(cfg["probes"], "probes", 2 * n)
                                         : sample_boundary_probes(rho, get_size(cfg, "probe_count", 32), seed, center,
                                                                  radius);
  const BoundaryReport rep = boundary_convexity_report(rho, probes, tol);
  Json r;
  r["verdict"] = convexity_name(rep.verdict);
  r["margin"] = rep.margin;
  r["probe_count"] = rep.points.size();
  Json pts = Json::array();
  for (const Vector& p : rep.points) pts.push_back(to_json(p));
  r["points"] = pts;
  r["min_tangential_trace"] = nums(rep.min_tangential_trace);
  r["grad_norm"] = nums(rep.grad_norm);
  r["sff_trace_form"] = nums(rep.sff_trace_form);

  Shell shell;
  if (cfg.contains("shell")) {
    check_keys(cfg["shell"], {"delta_min", "delta_max"}, "shell");
    shell.delta_min = get_double(cfg["shell"], "delta_min", shell.delta_min);
    shell.delta_max = get_double(cfg["shell"], "delta_max", shell.delta_max);
    if (!(shell.delta_min > 0.0 && shell.delta_max >= shell.delta_min))
      throw Error(ErrorCode::ConfigError, "shell needs 0 < delta_min <= delta_max");
  }
  const std::size_t barrier_probes = get_size(cfg, "barrier_probes", cfg.contains("shell") ? 32 : 0);
  if (barrier_probes > 0) {
    const BarrierReport b = barrier_check(rho, shell, barrier_probes, seed, tol, center, radius);
    r["barrier"] = {{"delta_min", shell.delta_min},
                    {"delta_max", shell.delta_max},
                    {"points", b.points.size()},
                    {"min_lambda1", b.min_lambda1},
                    {"max_identity_residual", b.max_identity_residual},
                    {"strict", b.strict},
                    {"delta", nums(b.delta)},
                    {"lambda1_direct", nums(b.lambda1_direct)},
                    {"lambda1_identity", nums(b.lambda1_identity)}};
  }
  if (cfg.contains("upgrade")) {
    const Json& u = cfg["upgrade"];
    check_keys(u, {"a_max", "probes"}, "upgrade");
    const UpgradeResult up =
        defining_function_upgrade(rho, shell, get_double(u, "a_max", 64.0), get_size(u, "probes", 32), seed, center,
                                  radius);
    r["upgrade"] = {{"found", up.found},
                    {"a", up.a},
                    {"min_margin", up.margins.empty() ? Json(nullptr) : num(*std::min_element(up.margins.begin(), up.margins.end()))},
                    {"max_identity_residual", up.max_identity_residual},
                    {"points", up.points.size()}};
  }
  ctx.write_json("boundary.json", r);
  if (get_bool(cfg, "csv", false)) {
    std::ostringstream csv;
    for (std::size_t a = 0; a < 2 * n; ++a) csv << axis_name(a) << ',';
    csv << "min_tangential_trace,grad_norm,sff_trace_form\n";
    for (std::size_t i = 0; i < rep.points.size(); ++i) {
      for (double x : rep.points[i]) csv << fmt(x) << ',';
      csv << fmt(rep.min_tangential_trace[i]) << ',' << fmt(rep.grad_norm[i]) << ',' << fmt(rep.sff_trace_form[i])
          << '\n';
    }
    ctx.write("probes.csv", csv.str());
  }
  return r;
}

Json cmd_freeness(const Json& cfg, Context& ctx) {
  check_keys(cfg, {"basis", "tol"}, "freeness");
  const std::vector<Vector> cols = get_points(require(cfg, "basis"), "basis", 0);
  if (cols.empty()) throw Error(ErrorCode::ConfigError, "basis must list at least one vector");
  const std::size_t d = cols[0].size();
  if (d == 0 || d % 2) throw Error(ErrorCode::ConfigError, "basis vectors need 2n coordinates");
  RealMatrix b(d, cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (cols[c].size() != d) throw Error(ErrorCode::ConfigError, "basis vectors differ in length");
    b.set_column(c, cols[c]);
  }
  const FreenessResult f = freeness(b, get_double(cfg, "tol", 1e-10));
  Json r;
  r["dim"] = cols.size();
  r["lambda1"] = f.lambda1;
  r["free"] = f.free;
  ctx.write_json("freeness.json", r);
  return r;
}

Json cmd_hull(const Json& cfg, Context& ctx) {
  check_keys(cfg, {"points", "x", "samples", "seed"}, "hull");
  const Vector x = json_vector(require(cfg, "x"), "x");
  if (x.empty() || x.size() % 2) throw Error(ErrorCode::ConfigError, "x needs 2n coordinates");
  const std::vector<Vector> k = get_points(require(cfg, "points"), "points", x.size());
  const std::uint64_t seed = ctx.pick_seed(cfg, "seed", 1);
  const HullResult res = sampled_hull_test(k, x, get_size(cfg, "samples", 2000), seed);
  Json r;
  if (const auto* w = std::get_if<HullWitness>(&res)) {
    r["decided"] = true;
    r["witness"] = {{"hessian", to_json(w->hessian)},
                    {"center", to_json(w->center)},
                    {"value_at_x", w->value_at_x},
                    {"max_on_k", w->max_on_k}};
  } else {
    r["decided"] = false;
    r["witness"] = nullptr;
  }
  ctx.write_json("hull.json", r);
  return r;
}

// --- solve ------------------------------------------------------------------

void write_pgm_slices(const GridField& u, Context& ctx, Json& index) {
  const Grid& g = u.grid;
  const std::size_t mid = g.m / 2;
  for (std::size_t k = 0; k < g.n; ++k) {
    const std::size_t ax = 2 * k, ay = 2 * k + 1;
    std::vector<std::size_t> idx(g.dim(), mid);
    Vector vals(g.m * g.m);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t r = 0; r < g.m; ++r)
      for (std::size_t c = 0; c < g.m; ++c) {
        idx[ax] = c;
        idx[ay] = r;
        const double v = u.values[g.node_index(idx)];
        vals[r * g.m + c] = v;
        if (std::isfinite(v)) {
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
      }
    std::string img = "P5\n" + std::to_string(g.m) + " " + std::to_string(g.m) + "\n255\n";
    for (double v : vals) {
      double t = 0.0;
      if (std::isfinite(v) && hi > lo) t = (v - lo) / (hi - lo);
      img.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * t))));
    }
    const std::string stem = "slice_" + axis_name(ax) + axis_name(ay);
    ctx.write(stem + ".pgm", img);
    Json fixed = Json::object();
    for (std::size_t a = 0; a < g.dim(); ++a)
      if (a != ax && a != ay) fixed[axis_name(a)] = g.lo[a] + static_cast<double>(mid) * g.h;
    Json side;
    side["image"] = stem + ".pgm";
    side["columns_axis"] = axis_name(ax);
    side["rows_axis"] = axis_name(ay);
    side["row_order"] = "row 0 is the lowest value of rows_axis";
    side["width"] = g.m;
    side["height"] = g.m;
    side["origin"] = {g.lo[ax], g.lo[ay]};
    side["spacing"] = g.h;
    side["fixed"] = fixed;
    side["value_min"] = num(lo);
    side["value_max"] = num(hi);
    side["normalization"] = "round(255 (v - value_min) / (value_max - value_min)); non-finite values map to 0";
    ctx.write_json(stem + ".json", side);
    index.push_back(stem + ".pgm");
  }
}

Json diagnostics_json(const SolveDiagnostics& d) {
  return {{"iterations", d.iterations},
          {"final_residual", num(d.final_residual)},
          {"threshold", d.threshold},
          {"converged", d.converged},
          {"min_lambda1", num(d.min_lambda1)},
          {"frame_sensitivity", num(d.frame_sensitivity)},
          {"boundary_min", num(d.boundary_min)},
          {"boundary_max", num(d.boundary_max)},
          {"interior_min", num(d.interior_min)},
          {"interior_max", num(d.interior_max)},
          {"interior_count", d.interior_count}};
}

struct SolveFailure {
  Json diagnostics;
};

Json cmd_solve(const Json& cfg, Context& ctx, Json& failure_diag) {
  check_keys(cfg,
             {"n", "domain", "m", "mode", "k", "psi", "phi", "frames", "tol", "max_iters", "relax", "exact",
              "outputs"},
             "solve");
  SolverConfig sc;
  const std::size_t n = get_size(cfg, "n", 0);
  if (n == 0) throw Error(ErrorCode::ConfigError, "solve: 'n' must be a positive integer");
  sc.domain.n = n;
  sc.domain.m = get_size(cfg, "m", 33);
  sc.domain.phi = get_string(cfg, "phi");
  const Json& dom = require(cfg, "domain");
  check_keys(dom, {"box", "rho"}, "domain");
  const Json& bx = require(dom, "box");
  if (bx.is_array() && bx.size() == 2 && bx[0].is_number()) {
    sc.domain.lo.assign(2 * n, json_number(bx[0], "domain.box[0]"));
    sc.domain.hi.assign(2 * n, json_number(bx[1], "domain.box[1]"));
  } else {
    const RealMatrix ranges = json_matrix(bx, "domain.box");
    if (ranges.rows() != 2 * n || ranges.cols() != 2)
      throw Error(ErrorCode::ConfigError, "domain.box must be [lo, hi] or 2n pairs [lo, hi]");
    for (std::size_t a = 0; a < 2 * n; ++a) {
      sc.domain.lo.push_back(ranges(a, 0));
      sc.domain.hi.push_back(ranges(a, 1));
    }
  }
  if (dom.contains("rho")) sc.domain.rho = get_string(dom, "rho");
  sc.mode = cfg.contains("mode") ? parse_solve_mode(get_string(cfg, "mode")) : SolveMode::Homogeneous;
  sc.k = get_size(cfg, "k", 1);
  if (cfg.contains("psi")) sc.psi = get_string(cfg, "psi");
  if (cfg.contains("frames")) {
    const Json& f = cfg["frames"];
    check_keys(f, {"extra", "seed", "h_frac"}, "frames");
    sc.frames_extra = get_size(f, "extra", 0);
    sc.h_frac = get_double(f, "h_frac", 1.0);
    sc.frames_seed = ctx.pick_seed(f, "seed", 1);
  } else {
    sc.frames_seed = ctx.pick_seed(Json::object(), "seed", 1);
  }
  sc.tol = get_double(cfg, "tol", 1e-6);
  if (cfg.contains("max_iters")) sc.max_iters = get_size(cfg, "max_iters", 0);
  sc.relax = get_double(cfg, "relax", 0.8);
  sc.threads = ctx.threads;

  std::vector<std::string> outputs{"json"};
  if (cfg.contains("outputs")) {
    if (!cfg["outputs"].is_array()) throw Error(ErrorCode::ConfigError, "outputs must be a list");
    outputs.clear();
    for (const Json& o : cfg["outputs"]) {
      if (!o.is_string()) throw Error(ErrorCode::ConfigError, "outputs entries must be strings");
      const std::string s = o.get<std::string>();
      if (s != "csv" && s != "json" && s != "pgm-slices")
        throw Error(ErrorCode::ConfigError, "unknown output '" + s + "' (csv, json, pgm-slices)");
      outputs.push_back(s);
    }
  }
  std::optional<Expr> exact;
  if (cfg.contains("exact")) exact = parse(get_string(cfg, "exact"), n);
  if (sc.mode == SolveMode::Inhomogeneous) parse(sc.psi, n);  // syntax errors are config errors

  SolveResult res;
  try {
    res = solve_dirichlet(sc);
  } catch (const NotConvergedError& e) {
    failure_diag = diagnostics_json(e.diagnostics());
    throw;
  }
  const GridField& u = res.field;
  const ResidualReport rep = residual_report(u, sc);

  Json r;
  r["mode"] = solve_mode_name(sc.mode);
  if (sc.mode == SolveMode::Branch) r["k"] = sc.k;
  r["n"] = n;
  r["m"] = u.grid.m;
  r["h"] = u.grid.h;
  r["frames"] = {{"axis", std::size_t{1} << n}, {"extra", sc.frames_extra}, {"seed", sc.frames_seed}, {"h_frac", sc.h_frac}};
  r["nodes"] = {{"interior", u.grid.count(NodeKind::Interior)},
                {"boundary", u.grid.count(NodeKind::Boundary)},
                {"exterior", u.grid.count(NodeKind::Exterior)}};
  r["diagnostics"] = diagnostics_json(res.diagnostics);
  r["residual_max"] = rep.max_abs;
  if (exact) {
    double mx = 0.0, ss = 0.0;
    for (std::size_t node : rep.nodes) {
      const double e = u.values[node] - eval(*exact, u.grid.coords(node));
      mx = std::max(mx, std::abs(e));
      ss += e * e;
    }
    r["error_vs_exact"] = {{"max_abs", mx}, {"rms", std::sqrt(ss / static_cast<double>(rep.nodes.size()))}};
  }

  for (const std::string& o : outputs) {
    if (o == "csv") {
      Vector residual(u.grid.size(), std::numeric_limits<double>::quiet_NaN());
      for (std::size_t i = 0; i < rep.nodes.size(); ++i) residual[rep.nodes[i]] = rep.residual[i];
      std::ostringstream csv;
      for (std::size_t a = 0; a < u.grid.dim(); ++a) csv << axis_name(a) << ',';
      csv << "kind,value,residual\n";
      static const char* kinds[] = {"interior", "boundary", "exterior"};
      for (std::size_t node = 0; node < u.grid.size(); ++node) {
        for (double x : u.grid.coords(node)) csv << fmt(x) << ',';
        const NodeKind k = u.grid.mask[node];
        csv << kinds[static_cast<int>(k)] << ',' << fmt(u.values[node]) << ',';
        if (k == NodeKind::Interior) csv << fmt(residual[node]);
        csv << '\n';
      }
      ctx.write("solution.csv", csv.str());
    } else if (o == "pgm-slices") {
      Json slices = Json::array();
      write_pgm_slices(u, ctx, slices);
      r["slices"] = slices;
    }
  }
  if (std::find(outputs.begin(), outputs.end(), "json") != outputs.end()) ctx.write_json("solve.json", r);
  return r;
}

// --- driver -----------------------------------------------------------------

Json read_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::ConfigError, "cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  try {
    return Json::parse(ss.str());
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::ConfigError, std::string("config is not valid JSON: ") + e.what());
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lagrangian potential theory toolkit", "lagpot"};
  app.set_version_flag("--version", LAGPOT_VERSION);
  app.require_subcommand(1, 1);
  app.fallthrough();
  std::string config, out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::size_t threads = 1;
  bool quiet = false;
  app.add_option("--config", config, "config JSON file")->required();
  app.add_option("--out", out_dir, "output directory (created if missing)");
  app.add_option("--seed", seed, "seed override (u64)");
  app.add_option("--threads", threads, "worker threads")->check(CLI::Range(1, 1024));
  app.add_flag("--quiet", quiet, "do not echo the report to stdout");
  for (const char* name : {"eval", "crosscheck", "oracle", "pluriharmonic", "boundary", "solve", "freeness", "hull"})
    app.add_subcommand(name);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << LAGPOT_VERSION << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  const std::string sub = app.get_subcommands().front()->get_name();

  Context ctx;
  ctx.out = out_dir;
  ctx.seed = seed;
  ctx.threads = threads;
  std::error_code ec;
  fs::create_directories(ctx.out, ec);
  if (ec || !fs::is_directory(ctx.out)) {
    err << "error: cannot create output directory '" << out_dir << "'\n";
    return 2;
  }

  const auto t0 = std::chrono::steady_clock::now();
  Json cfg;
  Json report;
  Json failure_diag;
  int code = 0;
  std::string error_code, message;
  try {
    cfg = read_config(config);
    if (sub == "eval") report = cmd_eval(cfg, ctx);
    else if (sub == "crosscheck") report = cmd_crosscheck(cfg, ctx);
    else if (sub == "oracle") report = cmd_oracle(cfg, ctx);
    else if (sub == "pluriharmonic") report = cmd_pluriharmonic(cfg, ctx);
    else if (sub == "boundary") report = cmd_boundary(cfg, ctx);
    else if (sub == "solve") report = cmd_solve(cfg, ctx, failure_diag);
    else if (sub == "freeness") report = cmd_freeness(cfg, ctx);
    else report = cmd_hull(cfg, ctx);
  } catch (const Error& e) {
    code = is_input_error(e.code()) ? 2 : 1;
    error_code = std::string(error_code_name(e.code()));
    message = e.what();
  } catch (const Json::exception& e) {
    code = 2;
    error_code = "ConfigError";
    message = e.what();
  } catch (const std::exception& e) {
    code = 1;
    error_code = "InternalError";
    message = e.what();
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (code != 0) {
    Json e;
    e["status"] = "error";
    e["exit_code"] = code;
    e["code"] = error_code;
    e["message"] = message;
    if (!failure_diag.is_null()) e["diagnostics"] = failure_diag;
    try {
      ctx.write_json("error.json", e);
    } catch (const Error&) {
    }
    err << "error: " << error_code << ": " << message << '\n';
  } else if (!quiet) {
    out << report.dump(2) << '\n';
  }

  Json man;
  man["tool"] = "lagpot";
  man["version"] = LAGPOT_VERSION;
  man["subcommand"] = sub;
  man["config_path"] = config;
  man["config"] = cfg;
  man["seed"] = ctx.seed_recorded ? Json(ctx.seed_used) : Json(nullptr);
  man["threads"] = threads;
  man["status"] = code == 0 ? "ok" : "error";
  man["exit_code"] = code;
  man["wall_time_s"] = wall;
  man["outputs"] = ctx.outputs;
  std::ofstream mf(ctx.out / "manifest.json", std::ios::binary);
  mf << man.dump(2) << '\n';
  return code;
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace lagpot::cli

#include "lagpot/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

#include "lagpot/parallel.hpp"

namespace lagpot {

namespace {

constexpr std::size_t kMaxNodes = 50'000'000;

std::size_t ipow(std::size_t b, std::size_t e) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < e; ++i) {
    if (r > kMaxNodes / std::max<std::size_t>(b, 1)) throw Error(ErrorCode::InvalidArgument, "grid too large");
    r *= b;
  }
  return r;
}

using Key = std::vector<int>;

// Floor and fractional part per axis, snapping near-integers.
void split_point(std::span<const double> p, std::vector<int>& base, Vector& frac) {
  base.resize(p.size());
  frac.resize(p.size());
  for (std::size_t a = 0; a < p.size(); ++a) {
    double fl = std::floor(p[a]);
    double fr = p[a] - fl;
    if (fr < 1e-13) fr = 0.0;
    if (fr > 1.0 - 1e-13) {
      fl += 1.0;
      fr = 0.0;
    }
    base[a] = static_cast<int>(fl);
    frac[a] = fr;
  }
}

// Multilinear interpolation of node + p (grid units) as multi-offset weights.
void add_interpolation(std::span<const double> p, double scale, std::map<Key, double>& acc) {
  std::vector<int> base;
  Vector frac;
  split_point(p, base, frac);
  std::vector<std::size_t> active;
  for (std::size_t a = 0; a < p.size(); ++a)
    if (frac[a] > 0.0) active.push_back(a);
  for (std::size_t mask = 0; mask < (std::size_t{1} << active.size()); ++mask) {
    Key off = base;
    double w = scale;
    for (std::size_t t = 0; t < active.size(); ++t) {
      const std::size_t a = active[t];
      if (mask >> t & 1) {
        w *= frac[a];
        off[a] += 1;
      } else {
        w *= 1.0 - frac[a];
      }
    }
    acc[off] += w;
  }
}

// Every interpolation corner of node + p lies in the grid and is not Exterior.
bool point_ok(const Grid& g, std::span<const std::size_t> idx, std::span<const double> p) {
  std::map<Key, double> corners;
  add_interpolation(p, 1.0, corners);
  for (const auto& [off, w] : corners) {
    std::size_t node = 0;
    for (std::size_t a = g.dim(); a-- > 0;) {
      const long long i = static_cast<long long>(idx[a]) + off[a];
      if (i < 0 || i >= static_cast<long long>(g.m)) return false;
      node = node * g.m + static_cast<std::size_t>(i);
    }
    if (g.mask[node] == NodeKind::Exterior) return false;
  }
  return true;
}

// Second difference along unit e with step s = h_frac h. At a node whose
// stencil point would leave the domain, the step on that side shrinks in
// quarter-h decrements (never below h, which is always admissible) and the
// nonuniform three-point formula is used; `idx` empty means no checks.
void add_direction(const Grid& g, std::span<const std::size_t> idx, std::span<const double> e, double h_frac,
                   std::map<Key, double>& acc) {
  const std::size_t d = e.size();
  auto reach = [&](double sign) {
    double t = h_frac;
    if (idx.empty() || t <= 1.0) return t;
    Vector p(d);
    for (;;) {
      for (std::size_t a = 0; a < d; ++a) p[a] = sign * t * e[a];
      if (point_ok(g, idx, p)) return t;
      t = std::max(1.0, t - 0.25);
      if (t == 1.0) return t;
    }
  };
  const double tp = reach(1.0) * g.h;
  const double tm = reach(-1.0) * g.h;
  Vector p(d);
  for (std::size_t a = 0; a < d; ++a) p[a] = tp / g.h * e[a];
  add_interpolation(p, 2.0 / (tp * (tp + tm)), acc);
  for (std::size_t a = 0; a < d; ++a) p[a] = -tm / g.h * e[a];
  add_interpolation(p, 2.0 / (tm * (tp + tm)), acc);
  acc[Key(d, 0)] -= 2.0 / (tp * tm);
}

std::ptrdiff_t flat(const Grid& g, const Key& off) {
  std::ptrdiff_t r = 0;
  for (std::size_t a = 0; a < off.size(); ++a) r += off[a] * static_cast<std::ptrdiff_t>(g.stride(a));
  return r;
}

void check_h_frac(double h_frac) {
  if (!(h_frac > 0.0 && h_frac <= 64.0)) throw Error(ErrorCode::InvalidArgument, "h_frac must lie in (0, 64]");
}

void check_interior(const Grid& g, std::size_t node) {
  if (node >= g.size() || g.mask[node] != NodeKind::Interior)
    throw Error(ErrorCode::InvalidArgument, "node is not Interior");
}

// Centered Hessian into a row-major d x d buffer.
void hessian_at(const Grid& g, std::span<const double> v, std::size_t node, double* out) {
  const std::size_t d = g.dim();
  const double inv = 1.0 / (g.h * g.h);
  const double u0 = v[node];
  for (std::size_t a = 0; a < d; ++a) {
    const std::size_t sa = g.stride(a);
    out[a * d + a] = (v[node + sa] + v[node - sa] - 2.0 * u0) * inv;
    for (std::size_t b = a + 1; b < d; ++b) {
      const std::size_t sb = g.stride(b);
      const double m = (v[node + sa + sb] - v[node + sa - sb] - v[node - sa + sb] + v[node - sa - sb]) * 0.25 * inv;
      out[a * d + b] = m;
      out[b * d + a] = m;
    }
  }
}

void sorted_garding(std::span<const double> h, std::size_t n, Vector& lambdas, Vector& out) {
  double mu = 0.0;
  lag_mu_lambdas(h, n, mu, lambdas);
  if (n == 1) {
    out.resize(2);
    out[0] = mu - lambdas[0];
    out[1] = mu + lambdas[0];
    return;
  }
  out = signed_sums(mu, lambdas);
  std::sort(out.begin(), out.end());
}

}  // namespace

// --- Grid -------------------------------------------------------------------

std::size_t Grid::stride(std::size_t axis) const {
  std::size_t s = 1;
  for (std::size_t a = 0; a < axis; ++a) s *= m;
  return s;
}

std::vector<std::size_t> Grid::multi_index(std::size_t node) const {
  std::vector<std::size_t> idx(dim());
  for (std::size_t a = 0; a < dim(); ++a) {
    idx[a] = node % m;
    node /= m;
  }
  return idx;
}

std::size_t Grid::node_index(std::span<const std::size_t> idx) const {
  std::size_t node = 0;
  for (std::size_t a = dim(); a-- > 0;) node = node * m + idx[a];
  return node;
}

Vector Grid::coords(std::size_t node) const {
  Vector x(dim());
  for (std::size_t a = 0; a < dim(); ++a) {
    x[a] = lo[a] + static_cast<double>(node % m) * h;
    node /= m;
  }
  return x;
}

std::vector<std::size_t> Grid::interior_nodes() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < size(); ++i)
    if (mask[i] == NodeKind::Interior) out.push_back(i);
  return out;
}

std::size_t Grid::count(NodeKind k) const { return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), k)); }

// --- domain -----------------------------------------------------------------

GridField build_domain(const DomainConfig& cfg) {
  if (cfg.n == 0) throw Error(ErrorCode::InvalidArgument, "n must be positive");
  if (cfg.m < 5) throw Error(ErrorCode::InvalidArgument, "m must be at least 5");
  const std::size_t d = 2 * cfg.n;
  if (cfg.lo.size() != d || cfg.hi.size() != d)
    throw Error(ErrorCode::InvalidArgument, "box needs 2n axis ranges");
  const double len = cfg.hi[0] - cfg.lo[0];
  for (std::size_t a = 0; a < d; ++a) {
    const double l = cfg.hi[a] - cfg.lo[a];
    if (!(l > 0.0)) throw Error(ErrorCode::InvalidArgument, "box axis range must have hi > lo");
    if (std::abs(l - len) > 1e-12 * len) throw Error(ErrorCode::InvalidArgument, "box axes must have equal lengths");
  }

  const Expr phi = parse(cfg.phi, cfg.n);
  std::optional<Expr> rho;
  if (cfg.rho) rho = parse(*cfg.rho, cfg.n);

  Grid g;
  g.n = cfg.n;
  g.lo = cfg.lo;
  g.hi = cfg.hi;
  g.m = cfg.m;
  g.h = len / static_cast<double>(cfg.m - 1);
  const std::size_t total = ipow(cfg.m, d);
  g.mask.assign(total, NodeKind::Exterior);

  std::vector<std::size_t> interior;
  for (std::size_t node = 0; node < total; ++node) {
    const auto idx = g.multi_index(node);
    bool inside = std::all_of(idx.begin(), idx.end(), [&](std::size_t i) { return i > 0 && i + 1 < cfg.m; });
    if (inside && rho) inside = eval(*rho, g.coords(node)) < 0.0;
    if (inside) {
      g.mask[node] = NodeKind::Interior;
      interior.push_back(node);
    }
  }
  if (interior.empty()) throw Error(ErrorCode::EmptyInterior, "domain has no interior grid nodes");

  // Mark the 3^d neighbourhood of every Interior node.
  const std::size_t nb = ipow(3, d);
  std::vector<std::ptrdiff_t> offs(nb);
  for (std::size_t c = 0; c < nb; ++c) {
    std::ptrdiff_t off = 0;
    std::size_t r = c;
    for (std::size_t a = 0; a < d; ++a) {
      off += (static_cast<std::ptrdiff_t>(r % 3) - 1) * static_cast<std::ptrdiff_t>(g.stride(a));
      r /= 3;
    }
    offs[c] = off;
  }
  for (std::size_t node : interior)
    for (std::ptrdiff_t off : offs) {
      NodeKind& k = g.mask[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(node) + off)];
      if (k == NodeKind::Exterior) k = NodeKind::Boundary;
    }

  GridField u{g, Vector(total, std::numeric_limits<double>::quiet_NaN())};
  double lowest = std::numeric_limits<double>::infinity();
  for (std::size_t node = 0; node < total; ++node) {
    if (u.grid.mask[node] == NodeKind::Boundary) {
      u.values[node] = eval(phi, u.grid.coords(node));
      lowest = std::min(lowest, u.values[node]);
    } else if (u.grid.mask[node] == NodeKind::Exterior) {
      try {
        u.values[node] = eval(phi, u.grid.coords(node));
      } catch (const Error&) {
      }
    }
  }
  for (std::size_t node : interior) u.values[node] = lowest;
  return u;
}

// --- frames and stencils ----------------------------------------------------

FrameSet make_frame_set(std::size_t n, std::size_t extra, std::uint64_t seed) {
  if (n == 0 || n > kDefaultGardingCap) throw Error(ErrorCode::DimensionTooLarge, "frame set dimension out of range");
  FrameSet fs;
  fs.extra = extra;
  fs.seed = seed;
  for (std::size_t bits = 0; bits < (std::size_t{1} << n); ++bits) fs.frames.push_back(standard_axis_frame(sign_vector(bits, n)));
  const SplitMix64 root(seed);
  for (std::size_t i = 0; i < extra; ++i) {
    SplitMix64 rng = root.split(i);
    fs.frames.push_back(random_lag_frame(n, rng));
  }
  return fs;
}

FrameStencils::FrameStencils(const Grid& grid, const FrameSet& frames, double h_frac) {
  check_h_frac(h_frac);
  if (frames.frames.empty()) throw Error(ErrorCode::InvalidArgument, "empty frame set");
  const std::size_t nf = frames.frames.size();
  auto append = [&](const std::map<Key, double>& acc) {
    for (const auto& [off, w] : acc) {
      if (w == 0.0) continue;
      offsets_.push_back(flat(grid, off));
      weights_.push_back(w);
    }
  };

  // Shared (translation invariant) stencils first.
  std::vector<std::vector<Key>> keys(nf);
  starts_.push_back(0);
  for (std::size_t f = 0; f < nf; ++f) {
    const LagFrame& fr = frames.frames[f];
    if (fr.columns().rows() != grid.dim()) throw Error(ErrorCode::InvalidArgument, "frame dimension mismatch");
    std::map<Key, double> acc;
    for (std::size_t j = 0; j < fr.n(); ++j) add_direction(grid, {}, fr.column(j), h_frac, acc);
    for (const auto& [off, w] : acc) keys[f].push_back(off);
    append(acc);
    starts_.push_back(offsets_.size());
  }

  // Nodes where a shared stencil leaves the domain get their own.
  slot_.assign(grid.size(), std::numeric_limits<std::uint32_t>::max());
  const auto interior = grid.interior_nodes();
  for (std::size_t i = 0; i < interior.size(); ++i) slot_[interior[i]] = static_cast<std::uint32_t>(i);
  custom_.assign(interior.size() * nf, -1);
  if (h_frac > 1.0) {
    for (std::size_t i = 0; i < interior.size(); ++i) {
      const auto idx = grid.multi_index(interior[i]);
      for (std::size_t f = 0; f < nf; ++f) {
        bool ok = true;
        for (const Key& off : keys[f]) {
          Vector p(off.begin(), off.end());
          if (!point_ok(grid, idx, p)) {
            ok = false;
            break;
          }
        }
        if (ok) continue;
        std::map<Key, double> acc;
        const LagFrame& fr = frames.frames[f];
        for (std::size_t j = 0; j < fr.n(); ++j) add_direction(grid, idx, fr.column(j), h_frac, acc);
        custom_[i * nf + f] = static_cast<std::ptrdiff_t>(custom_starts_.size());
        custom_starts_.push_back(offsets_.size());
        append(acc);
        custom_ends_.push_back(offsets_.size());
      }
    }
  }
  const double s = std::min(h_frac, 1.0) * grid.h;
  dt_ = s * s / static_cast<double>(2 * grid.n + 1);
}

double FrameStencils::trace(std::span<const double> values, std::size_t node, std::size_t frame) const {
  const std::size_t nf = frame_count();
  std::size_t b = starts_[frame], e = starts_[frame + 1];
  const std::uint32_t slot = slot_[node];
  if (slot == std::numeric_limits<std::uint32_t>::max()) throw Error(ErrorCode::InvalidArgument, "node is not Interior");
  if (const std::ptrdiff_t c = custom_[slot * nf + frame]; c >= 0) {
    b = custom_starts_[static_cast<std::size_t>(c)];
    e = custom_ends_[static_cast<std::size_t>(c)];
  }
  double acc = 0.0;
  const auto base = static_cast<std::ptrdiff_t>(node);
  for (std::size_t k = b; k < e; ++k) acc += weights_[k] * values[static_cast<std::size_t>(base + offsets_[k])];
  return acc;
}

FrameMin FrameStencils::min_trace(std::span<const double> values, std::size_t node) const {
  FrameMin best{std::numeric_limits<double>::infinity(), 0};
  for (std::size_t f = 0; f + 1 < starts_.size(); ++f) {
    const double t = trace(values, node, f);
    if (t < best.value) best = {t, f};
  }
  return best;
}

double directional_second_difference(const GridField& u, std::size_t node, std::span<const double> e,
                                     double h_frac) {
  check_h_frac(h_frac);
  check_interior(u.grid, node);
  if (e.size() != u.grid.dim() || std::abs(norm(e) - 1.0) > 1e-10)
    throw Error(ErrorCode::InvalidArgument, "direction must be a unit vector in R^{2n}");
  std::map<Key, double> acc;
  add_direction(u.grid, u.grid.multi_index(node), e, h_frac, acc);
  double r = 0.0;
  for (const auto& [off, w] : acc)
    r += w * u.values[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(node) + flat(u.grid, off))];
  return r;
}

FrameMin frame_min_trace(const GridField& u, std::size_t node, const FrameSet& frames, double h_frac) {
  check_interior(u.grid, node);
  if (frames.frames.empty()) throw Error(ErrorCode::InvalidArgument, "empty frame set");
  FrameMin best{std::numeric_limits<double>::infinity(), 0};
  for (std::size_t f = 0; f < frames.frames.size(); ++f) {
    double t = 0.0;
    for (std::size_t j = 0; j < frames.frames[f].n(); ++j)
      t += directional_second_difference(u, node, frames.frames[f].column(j), h_frac);
    if (t < best.value) best = {t, f};
  }
  return best;
}

// --- spectra ----------------------------------------------------------------

void lag_mu_lambdas(std::span<const double> h, std::size_t n, double& mu, Vector& lambdas) {
  const std::size_t d = 2 * n;
  mu = 0.0;
  for (std::size_t i = 0; i < d; ++i) mu += h[i * d + i];
  mu *= 0.5;
  lambdas.assign(n, 0.0);
  if (n == 1) {
    lambdas[0] = std::hypot(0.5 * (h[0] - h[3]), h[1]);
    return;
  }
  // skew = (A + JAJ) / 2 with (JAJ)_ij = -s_i s_j A_{i^1, j^1}, s = -1 on x axes.
  RealMatrix s(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      const double si = (i % 2 == 0) ? -1.0 : 1.0;
      const double sj = (j % 2 == 0) ? -1.0 : 1.0;
      s(i, j) = 0.5 * (h[i * d + j] - si * sj * h[(i ^ 1) * d + (j ^ 1)]);
    }
  const SymEigen eig = sym_eigen(s, 1e-8 * (1.0 + frobenius_norm(s)));
  for (std::size_t j = 0; j < n; ++j) lambdas[j] = std::max(0.0, 0.5 * (eig.values[j] - eig.values[d - 1 - j]));
}

double shift_residual(std::span<const double> garding, double psi) {
  if (!(psi >= 0.0)) throw Error(ErrorCode::NegativePsi, "psi must be nonnegative");
  if (garding.empty()) throw Error(ErrorCode::InvalidArgument, "empty spectrum");
  const double l1 = *std::min_element(garding.begin(), garding.end());
  if (psi == 0.0) return -l1;
  if (garding.size() == 2) {
    // (t + a)(t + b) = psi: t = -m + sqrt(d^2 + psi), written without cancellation.
    const double a = garding[0], b = garding[1];
    const double m = 0.5 * (a + b), d = 0.5 * (b - a);
    const double r = std::sqrt(d * d + psi);
    return m > 0.0 ? (psi - a * b) / (m + r) : r - m;
  }
  const double count = static_cast<double>(garding.size());
  // g(t) = sum log(Lambda_i + t) - log psi is increasing and concave on t > -Lambda_1.
  auto g = [&](double t, double& dg) {
    double v = 0.0;
    dg = 0.0;
    for (double l : garding) {
      v += std::log(l + t);
      dg += 1.0 / (l + t);
    }
    return v - std::log(psi);
  };
  double lo = -l1;
  double hi = -l1 + std::pow(psi, 1.0 / count);
  double t = hi;
  for (int it = 0; it < 200; ++it) {
    double dg = 0.0;
    const double v = g(t, dg);
    if (v == 0.0) return t;
    if (v > 0.0)
      hi = t;
    else
      lo = t;
    double next = t - v / dg;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) <= 1e-14 * (1.0 + std::abs(t)) || hi - lo <= 1e-15 * (1.0 + std::abs(t))) return next;
    t = next;
  }
  return t;
}

double shift_residual(const LagSpectrum& spec, double psi) {
  return shift_residual(garding_from_spectrum(spec.mu, spec.lambdas).eigenvalues, psi);
}

SymForm centered_hessian(const GridField& u, std::size_t node) {
  check_interior(u.grid, node);
  const std::size_t d = u.grid.dim();
  RealMatrix h(d, d);
  hessian_at(u.grid, u.values, node, h.data().data());
  return SymForm(std::move(h));
}

// --- solver -----------------------------------------------------------------

std::string solve_mode_name(SolveMode m) {
  switch (m) {
    case SolveMode::Homogeneous: return "homogeneous";
    case SolveMode::Inhomogeneous: return "inhomogeneous";
    case SolveMode::Branch: return "branch";
  }
  return "homogeneous";
}

SolveMode parse_solve_mode(std::string_view s) {
  if (s == "homogeneous") return SolveMode::Homogeneous;
  if (s == "inhomogeneous") return SolveMode::Inhomogeneous;
  if (s == "branch") return SolveMode::Branch;
  throw Error(ErrorCode::ConfigError, "unknown solve mode '" + std::string(s) + "'");
}

namespace {

// Everything a sweep needs, built once per solve.
struct Sweeper {
  const SolverConfig& cfg;
  const Grid& grid;
  std::vector<std::size_t> interior;
  std::optional<FrameStencils> stencils;
  Vector psi;  // per interior node, inhomogeneous mode
  double dt = 0.0;

  Sweeper(const SolverConfig& c, const Grid& g) : cfg(c), grid(g), interior(g.interior_nodes()) {
    const std::size_t n = grid.n;
    if (cfg.mode == SolveMode::Homogeneous) {
      stencils.emplace(grid, make_frame_set(n, cfg.frames_extra, cfg.frames_seed), cfg.h_frac);
      dt = stencils->time_step();
    } else {
      if (!(cfg.relax > 0.0 && cfg.relax <= 1.0)) throw Error(ErrorCode::InvalidArgument, "relax must lie in (0, 1]");
      dt = cfg.relax * grid.h * grid.h / static_cast<double>(2 * n);
    }
    if (cfg.mode == SolveMode::Branch) {
      if (n >= 8 * sizeof(std::size_t) || cfg.k < 1 || cfg.k > (std::size_t{1} << n))
        throw Error(ErrorCode::IndexOutOfRange, "branch index k must lie in 1..2^n");
    }
    if (cfg.mode == SolveMode::Inhomogeneous) {
      const Expr e = parse(cfg.psi, n);
      psi.resize(interior.size());
      for (std::size_t i = 0; i < interior.size(); ++i) {
        psi[i] = eval(e, grid.coords(interior[i]));
        if (!(psi[i] >= 0.0)) throw Error(ErrorCode::NegativePsi, "psi is negative at an interior node");
      }
    }
  }

  // Residual r at interior slot i; the update is u += dt * r.
  double residual(std::span<const double> v, std::size_t i, double* hbuf, Vector& lam, Vector& gard) const {
    const std::size_t node = interior[i];
    switch (cfg.mode) {
      case SolveMode::Homogeneous:
        return stencils->min_trace(v, node).value;
      case SolveMode::Inhomogeneous:
        hessian_at(grid, v, node, hbuf);
        sorted_garding({hbuf, grid.dim() * grid.dim()}, grid.n, lam, gard);
        return -shift_residual(gard, psi[i]);
      case SolveMode::Branch:
        hessian_at(grid, v, node, hbuf);
        sorted_garding({hbuf, grid.dim() * grid.dim()}, grid.n, lam, gard);
        return gard[cfg.k - 1];
    }
    return 0.0;
  }

  // Residuals of all interior nodes into r.
  void residuals(std::span<const double> v, Vector& r, std::size_t threads) const {
    r.resize(interior.size());
    parallel_for(interior.size(), threads, [&](std::size_t b, std::size_t e) {
      Vector hbuf(grid.dim() * grid.dim()), lam, gard;
      for (std::size_t i = b; i < e; ++i) r[i] = residual(v, i, hbuf.data(), lam, gard);
    });
  }
};

std::size_t effective_threads(std::size_t requested, std::size_t work) {
  // Thread start-up per sweep only pays off on large grids.
  return std::clamp<std::size_t>(work / 8192, 1, std::max<std::size_t>(requested, 1));
}

double max_abs(std::span<const double> r) {
  double m = 0.0;
  for (double v : r) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

SolveResult solve_dirichlet(const SolverConfig& cfg) { return solve_dirichlet(cfg, build_domain(cfg.domain)); }

SolveResult solve_dirichlet(const SolverConfig& cfg, GridField start) {
  if (!(cfg.tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tol must be positive");
  const Grid& grid = start.grid;
  const Sweeper sw(cfg, grid);
  const std::size_t max_iters = cfg.max_iters.value_or(grid.n == 1 ? 1'000'000 : 100'000);
  const std::size_t threads = effective_threads(cfg.threads, sw.interior.size() * (grid.n + 1));

  SolveDiagnostics diag;
  diag.threshold = cfg.tol * grid.h * grid.h;
  diag.interior_count = sw.interior.size();

  Vector cur = std::move(start.values);
  Vector r;
  sw.residuals(cur, r, threads);
  double res = max_abs(r);
  std::size_t it = 0;
  while (res > diag.threshold && it < max_iters) {
    for (std::size_t i = 0; i < sw.interior.size(); ++i) cur[sw.interior[i]] += sw.dt * r[i];
    ++it;
    sw.residuals(cur, r, threads);
    res = max_abs(r);
  }
  diag.iterations = it;
  diag.final_residual = res;
  diag.converged = res <= diag.threshold;

  // Diagnostics over the final field.
  diag.boundary_min = std::numeric_limits<double>::infinity();
  diag.boundary_max = -std::numeric_limits<double>::infinity();
  for (std::size_t node = 0; node < grid.size(); ++node)
    if (grid.mask[node] == NodeKind::Boundary) {
      diag.boundary_min = std::min(diag.boundary_min, cur[node]);
      diag.boundary_max = std::max(diag.boundary_max, cur[node]);
    }
  diag.interior_min = std::numeric_limits<double>::infinity();
  diag.interior_max = -std::numeric_limits<double>::infinity();
  diag.min_lambda1 = std::numeric_limits<double>::infinity();
  {
    Vector hbuf(grid.dim() * grid.dim()), lam;
    for (std::size_t node : sw.interior) {
      diag.interior_min = std::min(diag.interior_min, cur[node]);
      diag.interior_max = std::max(diag.interior_max, cur[node]);
      hessian_at(grid, cur, node, hbuf.data());
      double mu = 0.0;
      lag_mu_lambdas(hbuf, grid.n, mu, lam);
      double s = 0.0;
      for (double l : lam) s += l;
      diag.min_lambda1 = std::min(diag.min_lambda1, mu - s);
    }
  }
  if (cfg.mode == SolveMode::Homogeneous) {
    // Compare against a frame set with 8 + 2 extra additional random frames.
    const FrameStencils more(grid, make_frame_set(grid.n, 2 * cfg.frames_extra + 8, cfg.frames_seed ^ 0x9e3779b97f4a7c15ULL),
                             cfg.h_frac);
    for (std::size_t i = 0; i < sw.interior.size(); ++i) {
      const double t = more.min_trace(cur, sw.interior[i]).value;
      diag.frame_sensitivity = std::max(diag.frame_sensitivity, r[i] - t);
    }
  }

  SolveResult out{GridField{grid, std::move(cur)}, diag};
  if (!diag.converged) {
    char msg[128];
    std::snprintf(msg, sizeof msg, "solver reached max_iters=%zu with residual %.6g > threshold %.6g",
                  diag.iterations, res, diag.threshold);
    throw NotConvergedError(msg, diag);
  }
  return out;
}

ResidualReport residual_report(const GridField& u, const SolverConfig& cfg) {
  const Sweeper sw(cfg, u.grid);
  ResidualReport rep;
  rep.nodes = sw.interior;
  Vector r;
  sw.residuals(u.values, r, effective_threads(cfg.threads, sw.interior.size() * (u.grid.n + 1)));
  if (cfg.mode == SolveMode::Inhomogeneous)
    for (double& v : r) v = -v;  // report t* itself
  rep.max_abs = max_abs(r);
  rep.residual = std::move(r);
  return rep;
}

}  // namespace lagpot

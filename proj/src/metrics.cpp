#include "ktlab/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "ktlab/errors.hpp"

namespace ktlab {

double Measure1D::total_mass() const {
  double s = 0.0;
  for (const auto& a : atoms) s += a.w;
  for (const auto& c : cells) s += c.mass;
  return s;
}

double Measure1D::cdf_right(double x) const {
  double s = 0.0;
  for (const auto& a : atoms)
    if (a.x <= x) s += a.w;
  for (const auto& c : cells) {
    if (x <= c.lo) continue;
    s += x >= c.hi ? c.mass : c.mass * (x - c.lo) / (c.hi - c.lo);
  }
  return s;
}

double Measure1D::cdf_left(double x) const {
  double s = 0.0;
  for (const auto& a : atoms)
    if (a.x < x) s += a.w;
  for (const auto& c : cells) {
    if (x <= c.lo) continue;
    s += x >= c.hi ? c.mass : c.mass * (x - c.lo) / (c.hi - c.lo);
  }
  return s;
}

Measure1D measure_from_cells(const EulerGrid& grid, const std::vector<double>& rho) {
  Measure1D mu;
  for (int i = 0; i < grid.nx; ++i) {
    if (rho[i] == 0.0) continue;
    mu.cells.push_back({grid.x_min + i * grid.dx, grid.x_min + (i + 1) * grid.dx,
                        rho[i] * grid.dx});
  }
  return mu;
}

Measure1D measure_from_particles(const std::vector<EulerParticle>& ps) {
  Measure1D mu;
  for (const auto& p : ps) mu.atoms.push_back({p.x, p.m});
  return mu;
}

Measure1D measure_from_euler(const EulerState& st) {
  return st.is_particle() ? measure_from_particles(st.particles)
                          : measure_from_cells(st.grid, st.rho);
}

namespace {

Measure1D normalized(const Measure1D& mu) {
  const double mass = mu.total_mass();
  if (!(mass > 0.0)) throw ConfigError("wasserstein1_1d: zero-mass measure");
  Measure1D out = mu;
  for (auto& a : out.atoms) a.w /= mass;
  for (auto& c : out.cells) c.mass /= mass;
  return out;
}

void collect_breakpoints(const Measure1D& mu, std::vector<double>& bp) {
  for (const auto& a : mu.atoms) bp.push_back(a.x);
  for (const auto& c : mu.cells) {
    bp.push_back(c.lo);
    bp.push_back(c.hi);
  }
}

// exact integral of |d| over [a, b] for linear d with endpoint values da, db
double abs_linear_integral(double da, double db, double len) {
  if (da * db >= 0.0) return 0.5 * (std::abs(da) + std::abs(db)) * len;
  // sign change: two triangles
  const double s = std::abs(da) + std::abs(db);
  return 0.5 * (da * da + db * db) / s * len;
}

}  // namespace

double wasserstein1_1d(const Measure1D& a_in, const Measure1D& b_in) {
  const Measure1D a = normalized(a_in);
  const Measure1D b = normalized(b_in);

  std::vector<double> bp;
  collect_breakpoints(a, bp);
  collect_breakpoints(b, bp);
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
  if (bp.size() < 2) return 0.0;  // all mass at a single common point

  double w1 = 0.0;
  for (std::size_t k = 0; k + 1 < bp.size(); ++k) {
    const double lo = bp[k], hi = bp[k + 1];
    const double da = a.cdf_right(lo) - b.cdf_right(lo);
    const double db = a.cdf_left(hi) - b.cdf_left(hi);
    w1 += abs_linear_integral(da, db, hi - lo);
  }
  return w1;
}

double relative_entropy(const MacroFields& ueps, const std::vector<double>& rho,
                        const std::vector<double>& u, double dx) {
  double s = 0.0;
  for (std::size_t i = 0; i < ueps.rho.size(); ++i) {
    if (ueps.vacuum[i]) continue;
    if (!(rho[i] > 0.0))
      throw ConfigError("relative_entropy: reference density vanishes under rho_eps > 0");
    const double du = u[i] - ueps.velocity[i];
    s += 0.5 * ueps.rho[i] * du * du;
  }
  return s * dx;
}

double relative_flux_norm(const MacroFields& ueps, const std::vector<double>& rho,
                          const std::vector<double>& u, double dx) {
  double s = 0.0;
  for (std::size_t i = 0; i < ueps.rho.size(); ++i) {
    if (ueps.vacuum[i]) continue;
    if (!(rho[i] > 0.0))
      throw ConfigError("relative_flux_norm: reference density vanishes under rho_eps > 0");
    const double du = ueps.velocity[i] - u[i];
    s += ueps.rho[i] * du * du;
  }
  return s * dx;
}

MonokineticDeviation monokinetic_deviation(const DistributionState& feps, const EulerGrid& grid,
                                           const std::vector<double>& rho,
                                           const std::vector<double>& u) {
  const PhaseGrid& g = feps.grid;
  if (grid.nx != g.nx || std::abs(grid.x_min - g.x_min) > 1e-12 ||
      std::abs(grid.x_max - g.x_max) > 1e-12)
    throw ConfigError("monokinetic_deviation: fields must share the x grid");

  MonokineticDeviation out;
  const double mass = feps.mass();
  if (!(mass > 0.0)) return out;

  double t1 = 0.0;
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.nv; ++j) t1 += std::abs(g.v_center(j) - u[i]) * feps.f(i, j);
  out.term1 = t1 * g.dx * g.dv / mass;

  const MacroFields macro = compute_moments(feps);
  EulerGrid eg = grid;
  out.term2 = wasserstein1_1d(measure_from_cells(eg, macro.rho), measure_from_cells(eg, rho));

  double lip = 0.0;
  for (int i = 0; i + 1 < g.nx; ++i) lip = std::max(lip, std::abs(u[i + 1] - u[i]) / g.dx);
  out.bound = out.term1 + (1.0 + lip) * out.term2;
  return out;
}

SlopeFit fit_loglog_slope(const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.size() < 2) throw ConfigError("fit_loglog_slope: need at least 2 pairs");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(pairs.size());
  for (const auto& [eps, err] : pairs) {
    if (!(eps > 0.0) || !(err > 0.0))
      throw ConfigError("fit_loglog_slope: entries must be positive");
    const double lx = std::log(eps), ly = std::log(err);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double det = n * sxx - sx * sx;
  if (det == 0.0) throw ConfigError("fit_loglog_slope: degenerate abscissae");
  SlopeFit fit;
  fit.slope = (n * sxy - sx * sy) / det;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss = 0.0;
  for (const auto& [eps, err] : pairs) {
    const double r = std::log(err) - (fit.intercept + fit.slope * std::log(eps));
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

void ConvergenceRecord::fit() {
  std::vector<std::pair<double, double>> w1p, rep, mop;
  for (const auto& r : rows) {
    w1p.emplace_back(r.eps, r.w1_sup);
    rep.emplace_back(r.eps, r.re_sup);
    mop.emplace_back(r.eps, r.mono_sup);
  }
  w1_fit = fit_loglog_slope(w1p);
  re_fit = fit_loglog_slope(rep);
  mono_fit = fit_loglog_slope(mop);
}

}  // namespace ktlab

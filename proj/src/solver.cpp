#include "ktlab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "ktlab/errors.hpp"

namespace ktlab {

namespace {

void check_finite(const DistributionState& f, const char* where) {
  for (double v : f.values)
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os << where << ": non-finite value at t = " << f.t << " (mass = " << f.mass()
         << ", max|f| so far = " << f.max_abs() << ")";
      throw NumericalError(os.str());
    }
}

// first-order upwind x transport over dt; all speeds v_j are positive
void transport(DistributionState& f, double dt, Boundary bc) {
  const PhaseGrid& g = f.grid;
  std::vector<double> next(f.values.size());
  for (int j = 0; j < g.nv; ++j) {
    const double c = g.v_center(j) * dt / g.dx;
    for (int i = 0; i < g.nx; ++i) {
      double up;
      if (i > 0)
        up = f.f(i - 1, j);
      else if (bc == Boundary::Periodic)
        up = f.f(g.nx - 1, j);
      else
        up = 0.0;  // zero inflow
      next[static_cast<std::size_t>(i) * g.nv + j] = f.f(i, j) - c * (f.f(i, j) - up);
    }
  }
  f.values.swap(next);
}

// Exact frozen-coefficient solve of the combined relaxation+interaction over
// dt in one x cell, followed by a conservative linear remap to the grid.
// Each cell parcel (mass f_j dv at v_j) moves to u_d + (v_j - u_d) e^{-kappa dt}
// and carries the weight exp(int kappa S(v(s)) ds) with S the interaction
// coefficient; the remap then rescales the cell row to its pre-step mass,
// which removes the O(dt^2) quadrature drift of the frozen-coefficient
// weights.
void local_velocity_step(DistributionState& f, double dt, const SolverParams& params,
                         const MacroFields& macro, const std::vector<double>& u_moll) {
  const PhaseGrid& g = f.grid;
  const double kappa = params.kappa();
  const double decay = std::exp(-kappa * dt);
  const double relax = (1.0 - decay) / kappa;  // int_0^dt e^{-kappa s} ds

  std::vector<double> row(g.nv);
  for (int i = 0; i < g.nx; ++i) {
    if (macro.vacuum[i]) continue;  // f below floor: all collision terms vanish
    const double rho = macro.rho[i];
    const double u = macro.velocity[i];
    const double u_drift = params.variant == Variant::Regularized ? u_moll[i] : u;
    const double denom =
        params.variant == Variant::Regularized ? 1.0 + params.eps_reg * rho * (1.0 + u) : 1.0;

    double old_mass = 0.0;
    std::fill(row.begin(), row.end(), 0.0);
    for (int j = 0; j < g.nv; ++j) {
      const double fij = f.f(i, j);
      if (fij == 0.0) continue;
      old_mass += fij;
      const double v0 = g.v_center(j);
      const double v1 = u_drift + (v0 - u_drift) * decay;
      // int_0^dt kappa S(v(s)) ds with S = rho (u - v)/denom
      const double lnw = kappa * (rho / denom) * ((u - u_drift) * dt - (v0 - u_drift) * relax);
      const double m = fij * std::exp(lnw);
      // linear deposit between the bracketing cell centers
      const double pos = v1 / g.dv - 0.5;
      int k = static_cast<int>(std::floor(pos));
      double w_hi = pos - k;
      if (k < 0) {
        k = 0;
        w_hi = 0.0;
      } else if (k >= g.nv - 1) {
        k = g.nv - 2;
        w_hi = 1.0;
      }
      row[k] += m * (1.0 - w_hi);
      row[k + 1] += m * w_hi;
    }
    if (old_mass > 0.0) {
      double new_mass = 0.0;
      for (double r : row) new_mass += r;
      const double scale = new_mass > 0.0 ? old_mass / new_mass : 0.0;
      for (int j = 0; j < g.nv; ++j) f.f(i, j) = row[j] * scale;
    }
  }
}

}  // namespace

SolverParams SolverParams::from(const ScenarioConfig& cfg) {
  SolverParams p;
  p.variant = cfg.variant;
  p.eps_reg = cfg.eps_reg;
  p.eps_scale = cfg.eps_scale;
  p.boundary = cfg.boundary;
  p.rho_floor = cfg.rho_floor;
  return p;
}

DistributionState step(const DistributionState& f, double dt, const SolverParams& params) {
  const PhaseGrid& g = f.grid;
  if (!(dt > 0.0)) throw ConfigError("step: need dt > 0");
  const double cfl_bound = g.dx / g.v_max;
  if (dt > cfl_bound * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "step: dt = " << dt << " violates the CFL bound dx/v_max = " << cfl_bound;
    throw ConfigError(os.str());
  }

  DistributionState out = f;
  transport(out, 0.5 * dt, params.boundary);

  MacroFields macro = compute_moments(out, params.rho_floor);
  std::vector<double> u_moll;
  if (params.variant == Variant::Regularized) {
    MollifierSpec moll{params.eps_reg};
    u_moll = mollified_velocity(macro, moll, params.eps_reg, g.dx, params.boundary);
  }
  local_velocity_step(out, dt, params, macro, u_moll);

  transport(out, 0.5 * dt, params.boundary);
  out.t = f.t + dt;
  check_finite(out, "step");
  return out;
}

RunResult run(const ScenarioConfig& cfg, const ReportSink& on_report) {
  cfg.validate();
  DistributionState state = cfg.make_initial();
  const SolverParams params = SolverParams::from(cfg);
  const double dt = cfg.step_size();
  const long n_steps = static_cast<long>(std::ceil(cfg.t_final / dt - 1e-12));

  RunResult result;
  auto emit = [&](const DistributionState& s) {
    const DiagnosticsReport rep = diagnostics(s);
    result.reports.push_back(rep);
    if (on_report) on_report(s, rep);
  };
  emit(state);
  for (long k = 0; k < n_steps; ++k) {
    const double this_dt = std::min(dt, cfg.t_final - k * dt);
    if (!(this_dt > 0.0)) break;
    state = step(state, this_dt, params);
    if ((k + 1) % cfg.output_cadence == 0 || k + 1 == n_steps) emit(state);
  }
  result.final_state = std::move(state);
  return result;
}

// --------------------------------------------------------------------------
// particle solver

double ParticleEnsemble::total_weight() const {
  double s = 0.0;
  for (double wi : w) s += wi;
  return s;
}

ParticleEnsemble sample_particles(const DistributionState& f0, int n, std::uint64_t seed) {
  if (n < 1000) throw ConfigError("sample_particles: need at least 1000 particles");
  const PhaseGrid& g = f0.grid;
  const double total = f0.mass();
  if (!(total > 0.0)) throw ConfigError("sample_particles: zero-mass initial state");

  ParticleEnsemble p;
  p.x.reserve(n);
  p.v.reserve(n);
  p.w.assign(n, total / n);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(0.0, 1.0);

  // systematic sampling: particle k sits at mass quantile (k+1/2)/n
  const double cell_area = g.dx * g.dv;
  double cum = 0.0;
  int k = 0;
  for (int i = 0; i < g.nx && k < n; ++i) {
    for (int j = 0; j < g.nv && k < n; ++j) {
      const double cell_mass = f0.f(i, j) * cell_area;
      if (cell_mass <= 0.0) continue;
      cum += cell_mass;
      while (k < n && (k + 0.5) / n * total <= cum) {
        p.x.push_back(g.x_edge(i) + jitter(rng) * g.dx);
        p.v.push_back(g.v_edge(j) + jitter(rng) * g.dv);
        ++k;
      }
    }
  }
  while (k < n) {  // numerical tail: place leftovers in the last nonzero cell
    p.x.push_back(p.x.back());
    p.v.push_back(p.v.back());
    ++k;
  }
  p.t = f0.t;
  return p;
}

namespace {

// linear deposit of particle masses onto the x grid; returns cell-average rho, m
void deposit_x(const ParticleEnsemble& p, const PhaseGrid& g, Boundary bc,
               std::vector<double>& rho, std::vector<double>& mom) {
  rho.assign(g.nx, 0.0);
  mom.assign(g.nx, 0.0);
  const double inv_dx = 1.0 / g.dx;
  for (std::size_t q = 0; q < p.x.size(); ++q) {
    const double pos = (p.x[q] - g.x_min) * inv_dx - 0.5;
    int i = static_cast<int>(std::floor(pos));
    double w_hi = pos - i;
    int i2 = i + 1;
    if (bc == Boundary::Periodic) {
      i = ((i % g.nx) + g.nx) % g.nx;
      i2 = (i + 1) % g.nx;
    } else {
      if (i < 0) {
        i = 0;
        i2 = 0;
        w_hi = 0.0;
      } else if (i >= g.nx - 1) {
        i = g.nx - 1;
        i2 = g.nx - 1;
        w_hi = 0.0;
      }
    }
    const double m = p.w[q] * inv_dx;
    rho[i] += m * (1.0 - w_hi);
    rho[i2] += m * w_hi;
    mom[i] += m * (1.0 - w_hi) * p.v[q];
    mom[i2] += m * w_hi * p.v[q];
  }
}

double lerp_field(const std::vector<double>& field, const PhaseGrid& g, Boundary bc, double x) {
  const double pos = (x - g.x_min) / g.dx - 0.5;
  int i = static_cast<int>(std::floor(pos));
  double w_hi = pos - i;
  int i2 = i + 1;
  if (bc == Boundary::Periodic) {
    i = ((i % g.nx) + g.nx) % g.nx;
    i2 = (i + 1) % g.nx;
  } else {
    i = std::clamp(i, 0, g.nx - 1);
    i2 = std::clamp(i2, 0, g.nx - 1);
    if (i == i2) w_hi = 0.0;
  }
  return field[i] * (1.0 - w_hi) + field[i2] * w_hi;
}

}  // namespace

DistributionState deposit_particles(const ParticleEnsemble& p, const PhaseGrid& g, Boundary bc) {
  DistributionState st = zero_state(g);
  st.t = p.t;
  const double inv_area = 1.0 / (g.dx * g.dv);
  for (std::size_t q = 0; q < p.x.size(); ++q) {
    const double px = (p.x[q] - g.x_min) / g.dx - 0.5;
    const double pv = p.v[q] / g.dv - 0.5;
    int i = static_cast<int>(std::floor(px));
    int j = static_cast<int>(std::floor(pv));
    double wx = px - i, wv = pv - j;
    int i2 = i + 1;
    if (bc == Boundary::Periodic) {
      i = ((i % g.nx) + g.nx) % g.nx;
      i2 = (i + 1) % g.nx;
    } else {
      if (i < 0) { i = i2 = 0; wx = 0.0; }
      else if (i >= g.nx - 1) { i = i2 = g.nx - 1; wx = 0.0; }
    }
    int j2 = j + 1;
    if (j < 0) { j = j2 = 0; wv = 0.0; }
    else if (j >= g.nv - 1) { j = j2 = g.nv - 1; wv = 0.0; }
    const double m = p.w[q] * inv_area;
    st.f(i, j) += m * (1.0 - wx) * (1.0 - wv);
    st.f(i2, j) += m * wx * (1.0 - wv);
    st.f(i, j2) += m * (1.0 - wx) * wv;
    st.f(i2, j2) += m * wx * wv;
  }
  return st;
}

ParticleRunResult particle_run(const DistributionState& f0, const ParticleRunParams& params,
                               int n_particles, std::uint64_t seed) {
  const PhaseGrid& g = f0.grid;
  ParticleEnsemble p = sample_particles(f0, n_particles, seed);
  const double w_total0 = p.total_weight();

  const double eps_moll = params.eps_moll > 0.0 ? params.eps_moll : 2.0 * g.dx;
  const MollifierSpec moll{std::max(eps_moll, 2.0 * g.dx)};
  const double dt_base = params.cfl * g.dx / g.v_max;
  const long n_steps = static_cast<long>(std::ceil(params.t_final / dt_base - 1e-12));
  const long cadence = std::max(1L, n_steps / std::max(params.samples, 1));

  ParticleRunResult result;
  auto emit = [&](const ParticleEnsemble& ens) {
    DistributionState dep = deposit_particles(ens, g, params.boundary);
    result.reports.push_back(diagnostics(dep));
    result.deposited.push_back(std::move(dep));
  };
  emit(p);

  std::vector<double> rho, mom;
  for (long k = 0; k < n_steps; ++k) {
    const double dt = std::min(dt_base, params.t_final - k * dt_base);
    if (!(dt > 0.0)) break;
    // pass 1: deposit, reconstruct fields
    deposit_x(p, g, params.boundary, rho, mom);
    MacroFields macro;
    macro.rho = rho;
    macro.momentum = mom;
    std::vector<double> u_force = mollified_velocity(macro, moll, 1e-8, g.dx, params.boundary);
    std::vector<double> rho_smooth = mollify(rho, moll, g.dx, params.boundary);
    // pass 2: exact frozen-field update of every particle
    const double decay = std::exp(-dt);
    const double relax = 1.0 - decay;
    const double L = g.x_max - g.x_min;
    for (std::size_t q = 0; q < p.x.size(); ++q) {
      const double u = lerp_field(u_force, g, params.boundary, p.x[q]);
      const double dv0 = p.v[q] - u;
      if (!params.freeze_weights) {
        const double rs = lerp_field(rho_smooth, g, params.boundary, p.x[q]);
        p.w[q] *= std::exp(-rs * dv0 * relax);
      }
      p.x[q] += u * dt + dv0 * relax;
      p.v[q] = u + dv0 * decay;
      if (params.boundary == Boundary::Periodic) {
        p.x[q] = g.x_min + std::fmod(std::fmod(p.x[q] - g.x_min, L) + L, L);
      }
    }
    p.t += dt;
    const double w_now = p.total_weight();
    if (!std::isfinite(w_now))
      throw NumericalError("particle_run: non-finite particle weights");
    if (w_now < 1e-12 * w_total0)
      throw NumericalError("particle_run: all weights collapsed below floor");
    if ((k + 1) % cadence == 0 || k + 1 == n_steps) emit(p);
  }
  result.ensemble = std::move(p);
  return result;
}

// --------------------------------------------------------------------------
// Picard iteration

namespace {

struct CoefficientTrack {
  // per time node: frozen rho, u, u_moll on the x grid
  std::vector<std::vector<double>> rho, u, u_moll;
};

CoefficientTrack coefficients_of(const std::vector<DistributionState>& traj, double eps_reg,
                                 Boundary bc) {
  CoefficientTrack c;
  const MollifierSpec moll{eps_reg};
  for (const DistributionState& s : traj) {
    MacroFields m = compute_moments(s);
    c.u_moll.push_back(mollified_velocity(m, moll, eps_reg, s.grid.dx, bc));
    c.rho.push_back(std::move(m.rho));
    c.u.push_back(std::move(m.velocity));
  }
  return c;
}

// one linearized step: same Strang machinery, coefficients from the track
DistributionState linear_step(const DistributionState& f, double dt, double eps_reg,
                              Boundary bc, const std::vector<double>& rho,
                              const std::vector<double>& u, const std::vector<double>& u_moll) {
  DistributionState out = f;
  // reuse the solver internals by hand: transport, frozen local solve, transport
  const PhaseGrid& g = f.grid;
  const double decay = std::exp(-dt);
  const double relax = 1.0 - decay;

  transport(out, 0.5 * dt, bc);

  std::vector<double> row(g.nv);
  for (int i = 0; i < g.nx; ++i) {
    const double rho_i = rho[i];
    const double u_i = u[i];
    const double ud = u_moll[i];
    const double denom = 1.0 + eps_reg * rho_i * (1.0 + u_i);
    double old_mass = 0.0;
    std::fill(row.begin(), row.end(), 0.0);
    for (int j = 0; j < g.nv; ++j) {
      const double fij = out.f(i, j);
      if (fij == 0.0) continue;
      old_mass += fij;
      const double v0 = g.v_center(j);
      const double v1 = ud + (v0 - ud) * decay;
      const double lnw = (rho_i / denom) * ((u_i - ud) * dt - (v0 - ud) * relax);
      const double m = fij * std::exp(lnw);
      const double pos = v1 / g.dv - 0.5;
      int k = static_cast<int>(std::floor(pos));
      double w_hi = pos - k;
      if (k < 0) { k = 0; w_hi = 0.0; }
      else if (k >= g.nv - 1) { k = g.nv - 2; w_hi = 1.0; }
      row[k] += m * (1.0 - w_hi);
      row[k + 1] += m * w_hi;
    }
    // NOTE: no per-cell renormalization here; the linearized equation (frozen
    // rho^n, u^n) does not conserve the mass of f^{n+1} exactly, only in the
    // fixed point.
    for (int j = 0; j < g.nv; ++j) out.f(i, j) = row[j];
  }

  transport(out, 0.5 * dt, bc);
  out.t = f.t + dt;
  check_finite(out, "picard linear_step");
  return out;
}

double sup_diff(const std::vector<DistributionState>& a, const std::vector<DistributionState>& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k)
    for (std::size_t q = 0; q < a[k].values.size(); ++q)
      d = std::max(d, std::abs(a[k].values[q] - b[k].values[q]));
  return d;
}

}  // namespace

PicardTrace picard_run(const DistributionState& f0, double eps_reg, int n_iters,
                       double t_final, double cfl, Boundary bc) {
  if (n_iters < 2) throw ConfigError("picard_run: need n_iters >= 2");
  if (!(eps_reg > 0.0)) throw ConfigError("picard_run: need eps_reg > 0");
  const PhaseGrid& g = f0.grid;
  const double dt = cfl * g.dx / g.v_max;
  const long n_steps = static_cast<long>(std::ceil(t_final / dt - 1e-12));

  // zeroth iterate: f0 held constant in time
  std::vector<DistributionState> prev(n_steps + 1, f0);
  for (long k = 0; k <= n_steps; ++k) prev[k].t = std::min(k * dt, t_final);

  PicardTrace trace;
  int grow_streak = 0;
  for (int n = 0; n < n_iters; ++n) {
    const CoefficientTrack coeff = coefficients_of(prev, eps_reg, bc);
    std::vector<DistributionState> cur;
    cur.reserve(prev.size());
    cur.push_back(f0);
    for (long k = 0; k < n_steps; ++k) {
      const double this_dt = std::min(dt, t_final - k * dt);
      cur.push_back(
          linear_step(cur.back(), this_dt, eps_reg, bc, coeff.rho[k], coeff.u[k], coeff.u_moll[k]));
    }
    const double d = sup_diff(cur, prev);
    if (!trace.d.empty() && d > trace.d.back()) {
      if (++grow_streak >= 3) trace.diverged = true;
    } else {
      grow_streak = 0;
    }
    trace.d.push_back(d);
    prev = std::move(cur);
  }
  trace.final_iterate = prev.back();
  return trace;
}

}  // namespace ktlab

#include "ktlab/kinetic_ops.hpp"

#include <algorithm>
#include <cmath>

#include "ktlab/errors.hpp"

namespace ktlab {

MacroFields compute_moments(const DistributionState& f, double rho_floor) {
  const PhaseGrid& g = f.grid;
  MacroFields m;
  m.rho.assign(g.nx, 0.0);
  m.momentum.assign(g.nx, 0.0);
  m.velocity.assign(g.nx, 0.0);
  m.energy_density.assign(g.nx, 0.0);
  m.vacuum.assign(g.nx, 1);

  if (rho_floor < 0.0) rho_floor = 1e-12 * f.mass() / (g.x_max - g.x_min);
  m.rho_floor = rho_floor;

  for (int i = 0; i < g.nx; ++i) {
    double r = 0.0, mom = 0.0, en = 0.0;
    for (int j = 0; j < g.nv; ++j) {
      const double fij = f.f(i, j);
      const double v = g.v_center(j);
      r += fij;
      mom += v * fij;
      en += v * v * fij;
    }
    m.rho[i] = r * g.dv;
    m.momentum[i] = mom * g.dv;
    m.energy_density[i] = en * g.dv;
    if (m.rho[i] > rho_floor) {
      m.vacuum[i] = 0;
      m.velocity[i] = m.momentum[i] / m.rho[i];
    }
  }
  return m;
}

std::vector<double> interaction_term(const DistributionState& f, const MacroFields& macro) {
  const PhaseGrid& g = f.grid;
  std::vector<double> out(g.cells(), 0.0);
  for (int i = 0; i < g.nx; ++i) {
    if (macro.vacuum[i]) continue;
    const double rho = macro.rho[i];
    const double u = macro.velocity[i];
    for (int j = 0; j < g.nv; ++j)
      out[static_cast<std::size_t>(i) * g.nv + j] = rho * (u - g.v_center(j)) * f.f(i, j);
  }
  return out;
}

GainLoss interaction_gain_loss(const DistributionState& f) {
  const PhaseGrid& g = f.grid;
  GainLoss gl;
  gl.gain.assign(g.cells(), 0.0);
  gl.loss.assign(g.cells(), 0.0);
  for (int i = 0; i < g.nx; ++i) {
    // prefix sums over the velocity row: below[j] = sum_{k<j} f_k and
    // vbelow[j] = sum_{k<j} v_k f_k, so both integrals come out in O(nv)
    double below = 0.0, vbelow = 0.0, total = 0.0, vtotal = 0.0;
    for (int j = 0; j < g.nv; ++j) {
      total += f.f(i, j);
      vtotal += g.v_center(j) * f.f(i, j);
    }
    for (int j = 0; j < g.nv; ++j) {
      const double fij = f.f(i, j);
      const double v = g.v_center(j);
      const double above = total - below - fij;
      const double vabove = vtotal - vbelow - v * fij;
      gl.gain[static_cast<std::size_t>(i) * g.nv + j] = fij * (vabove - v * above) * g.dv;
      gl.loss[static_cast<std::size_t>(i) * g.nv + j] = fij * (v * below - vbelow) * g.dv;
      below += fij;
      vbelow += v * fij;
    }
  }
  return gl;
}

std::vector<double> mollified_velocity(const MacroFields& macro, const MollifierSpec& moll,
                                       double eps_reg, double dx, Boundary bc) {
  if (!(eps_reg > 0.0)) throw ConfigError("mollified_velocity: need eps_reg > 0");
  std::vector<double> rho_c, mom_c;
  if (moll.eps < dx) {
    rho_c = macro.rho;
    mom_c = macro.momentum;
  } else {
    rho_c = mollify(macro.rho, moll, dx, bc);
    mom_c = mollify(macro.momentum, moll, dx, bc);
  }
  std::vector<double> u(rho_c.size(), 0.0);
  for (std::size_t i = 0; i < rho_c.size(); ++i) u[i] = mom_c[i] / (eps_reg + rho_c[i]);
  return u;
}

std::vector<double> relaxation_divergence(const DistributionState& f,
                                          const std::vector<double>& u_field) {
  const PhaseGrid& g = f.grid;
  std::vector<double> out(g.cells(), 0.0);
  for (int i = 0; i < g.nx; ++i) {
    const double u = u_field[i];
    // interface fluxes of (v-u) f, zero at the v=0 and v=v_max edges
    double flux_lo = 0.0;
    for (int j = 0; j < g.nv; ++j) {
      double flux_hi = 0.0;
      if (j + 1 < g.nv) {
        const double a = g.v_edge(j + 1) - u;
        double fup;
        if (a > 0.0)
          fup = f.f(i, j + 1);  // flux of (u-v)f moves down: donor is the upper cell
        else if (a < 0.0)
          fup = f.f(i, j);
        else
          fup = 0.5 * (f.f(i, j) + f.f(i, j + 1));
        flux_hi = a * fup;
      }
      out[static_cast<std::size_t>(i) * g.nv + j] = (flux_hi - flux_lo) / g.dv;
      flux_lo = flux_hi;
    }
  }
  return out;
}

DiagnosticsReport diagnostics(const DistributionState& f) {
  const PhaseGrid& g = f.grid;
  DiagnosticsReport r;
  r.t = f.t;
  r.linf = f.max_abs();

  const MacroFields macro = compute_moments(f);
  const double area = g.dx * g.dv;
  double mass = 0.0, mom = 0.0, en = 0.0, dqi = 0.0, dqr = 0.0;
  const double thr = kSupportThresholdFactor * r.linf;
  bool any = false;
  double rx0 = 0.0, rx1 = 0.0, rv0 = 0.0, rv1 = 0.0;
  for (int i = 0; i < g.nx; ++i) {
    const double u = macro.vacuum[i] ? 0.0 : macro.velocity[i];
    const double rho = macro.rho[i];
    for (int j = 0; j < g.nv; ++j) {
      const double fij = f.f(i, j);
      const double v = g.v_center(j);
      mass += fij;
      mom += v * fij;
      en += v * v * fij;
      const double du = u - v;
      dqr += du * du * fij;
      if (!macro.vacuum[i]) dqi += rho * du * du * fij;
      if (fij > thr) {
        const double x = g.x_center(i);
        if (!any) {
          rx0 = rx1 = x;
          rv0 = rv1 = v;
          any = true;
        } else {
          rx0 = std::min(rx0, x);
          rx1 = std::max(rx1, x);
          rv0 = std::min(rv0, v);
          rv1 = std::max(rv1, v);
        }
      }
    }
  }
  r.mass = mass * area;
  r.momentum = mom * area;
  r.energy = 0.5 * en * area;
  r.diss_qi = dqi * area;
  r.diss_qr = dqr * area;
  r.rx_min = rx0;
  r.rx_max = rx1;
  r.rv_min = rv0;
  r.rv_max = rv1;
  return r;
}

}  // namespace ktlab

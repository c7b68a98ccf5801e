#ifndef KTLAB_SOLVER_HPP
#define KTLAB_SOLVER_HPP

// Time integration of the kinetic traffic model in three variants:
//
//   unscaled      d_t f + v d_x f + d_v((u - v) f)       = rho (u - v) f
//   regularized   d_t f + v d_x f + d_v((u_moll - v) f)  = rho (u - v) f / (1 + eps rho (1 + u))
//   scaled        d_t f + v d_x f + (1/eps) d_v((u-v) f) = (1/eps) rho (u - v) f
//
// The step is Strang split: half-step upwind x transport at speed v, a full
// local velocity step with (rho, u) frozen per x cell and solved exactly
// along the characteristics v(s) = u + (v0 - u) e^{-kappa s}, then another
// transport half-step. The stiff 1/eps dynamics sits entirely inside the
// exact local solve, so the time step is not restricted by eps.

#include <cmath>
#include <functional>
#include <vector>

#include "ktlab/config.hpp"
#include "ktlab/kinetic_ops.hpp"
#include "ktlab/phase.hpp"

namespace ktlab {

struct SolverParams {
  Variant variant = Variant::Unscaled;
  double eps_reg = 0.0;    // mollifier width and denominator (regularized)
  double eps_scale = 1.0;  // kappa = 1/eps_scale (scaled)
  Boundary boundary = Boundary::FreeFlow;
  double rho_floor = -1.0;  // <0: per-state automatic floor

  static SolverParams from(const ScenarioConfig& cfg);
  double kappa() const { return variant == Variant::Scaled ? 1.0 / eps_scale : 1.0; }
};

// exact relaxation characteristic: v(t) = u + (v0 - u) e^{-t} for frozen u
inline double relax_velocity(double v0, double u, double t) {
  return u + (v0 - u) * std::exp(-t);
}

// One Strang step. Mass is conserved to roundoff per step (the conservative
// remap rescales each x cell to its pre-collision mass); nonnegativity is
// preserved. Throws ConfigError on CFL violation and NumericalError if the
// state stops being finite.
DistributionState step(const DistributionState& f, double dt, const SolverParams& params);

struct RunResult {
  DistributionState final_state;
  std::vector<DiagnosticsReport> reports;
};

using ReportSink = std::function<void(const DistributionState&, const DiagnosticsReport&)>;

// Integrates the configured scenario to t_final, emitting diagnostics every
// output_cadence steps (plus the initial and final states).
RunResult run(const ScenarioConfig& cfg, const ReportSink& on_report = {});

// --- weighted-particle solver from the characteristic formulation ---------
//
//   dX/ds = V,  dV/ds = u_moll(X) - V,  dw/ds = rho(X) (u_moll(X) - V) w,
//
// with (rho, rho u) deposited on the x grid and the force always taken from
// the mollified velocity. Velocities and weights use the same exact
// frozen-coefficient formulas as the grid solver.

struct ParticleEnsemble {
  std::vector<double> x, v, w;
  double t = 0.0;
  double total_weight() const;
};

struct ParticleRunParams {
  double t_final = 0.5;
  double cfl = 0.5;
  double eps_moll = -1.0;  // mollifier width for force reconstruction; <0: 2*dx
  Boundary boundary = Boundary::FreeFlow;
  int samples = 10;           // deposited snapshots over [0, t_final]
  bool freeze_weights = false;  // diagnostic mode: no interaction source
};

struct ParticleRunResult {
  ParticleEnsemble ensemble;
  std::vector<DiagnosticsReport> reports;     // of the deposited phase-space states
  std::vector<DistributionState> deposited;   // at sample times
};

// Particles are initialized by stratified (systematic) sampling of the cell
// masses of f0 with equal weights mass/n, jittered uniformly inside their
// cells by the seeded generator.
ParticleEnsemble sample_particles(const DistributionState& f0, int n, std::uint64_t seed);

ParticleRunResult particle_run(const DistributionState& f0, const ParticleRunParams& params,
                               int n_particles, std::uint64_t seed);

// deposit particles onto the phase grid (linear weights in both x and v)
DistributionState deposit_particles(const ParticleEnsemble& p, const PhaseGrid& grid,
                                    Boundary bc);

// --- Picard iteration for the regularized equation -------------------------
//
// Iterate n+1 solves the linear equation with coefficient fields
// (rho^n, u^n, u_moll^n) frozen from the previous iterate at each step time;
// the zeroth iterate is f0 held constant in time.

struct PicardTrace {
  std::vector<double> d;  // d[n] = sup_t ||f^{n+1} - f^n||_inf, starting with n = 0
  bool diverged = false;  // d grew for three consecutive iterates
  DistributionState final_iterate;
};

PicardTrace picard_run(const DistributionState& f0, double eps_reg, int n_iters,
                       double t_final, double cfl, Boundary bc);

}  // namespace ktlab

#endif

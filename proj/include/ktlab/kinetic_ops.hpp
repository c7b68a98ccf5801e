#ifndef KTLAB_KINETIC_OPS_HPP
#define KTLAB_KINETIC_OPS_HPP

// Pointwise and integral operators of the model: velocity moments, the
// interaction operator in both its gain/loss and reformulated rho(u-v)f
// forms, the mollified velocity, the relaxation divergence d_v((v-u)f),
// and the run diagnostics.

#include <vector>

#include "ktlab/phase.hpp"

namespace ktlab {

// One diagnostics row. Support radii are measured over cells with
// f > 1e-10 * ||f||_inf (exact zeros are not preserved by upwinding).
struct DiagnosticsReport {
  double t = 0.0;
  double mass = 0.0;      // int f dx dv
  double momentum = 0.0;  // int v f dx dv
  double energy = 0.0;    // 1/2 int v^2 f dx dv
  double linf = 0.0;
  double rx_min = 0.0, rx_max = 0.0;  // x support box
  double rv_min = 0.0, rv_max = 0.0;  // v support box
  double diss_qi = 0.0;  // int rho (u-v)^2 f dx dv
  double diss_qr = 0.0;  // int (u-v)^2 f dx dv
};

constexpr double kSupportThresholdFactor = 1e-10;

// rho_floor < 0 requests the default floor 1e-12 * mass / (x_max - x_min).
MacroFields compute_moments(const DistributionState& f, double rho_floor = -1.0);

// Reformulated interaction operator rho(x)(u(x) - v) f(x,v); zero in vacuum.
std::vector<double> interaction_term(const DistributionState& f, const MacroFields& macro);

struct GainLoss {
  std::vector<double> gain;  // f int_{v_* > v} (v_* - v) f dv_*
  std::vector<double> loss;  // f int_{v_* < v} (v - v_*) f dv_*
};
GainLoss interaction_gain_loss(const DistributionState& f);

// u_moll(x) = ((rho u) * theta_eps) / (eps_reg + rho * theta_eps); bounded by
// the largest supported velocity, zero where both convolutions vanish.
std::vector<double> mollified_velocity(const MacroFields& macro, const MollifierSpec& moll,
                                       double eps_reg, double dx, Boundary bc);

// Conservative upwind divergence in v of the flux (v - u) f with zero-flux
// edges; the per-cell velocity sum of the output telescopes to zero.
std::vector<double> relaxation_divergence(const DistributionState& f,
                                          const std::vector<double>& u_field);

DiagnosticsReport diagnostics(const DistributionState& f);

}  // namespace ktlab

#endif

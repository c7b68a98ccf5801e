#ifndef KTLAB_METRICS_HPP
#define KTLAB_METRICS_HPP

// Distances and entropy functionals: the 1D Wasserstein-1 (MKR) distance via
// exact CDF-difference integration, the relative entropy rho(u - ubar)^2 / 2
// of the pressureless system, the relative flux norm, the monokinetic
// deviation bound, and log-log rate fitting.

#include <utility>
#include <vector>

#include "ktlab/euler.hpp"
#include "ktlab/kinetic_ops.hpp"
#include "ktlab/phase.hpp"

namespace ktlab {

// A 1D measure as atoms plus piecewise-constant cells; the CDF is a step
// function plus linear ramps, so W1 integrates exactly on the union of
// breakpoints.
struct Measure1D {
  struct Atom {
    double x = 0.0, w = 0.0;
  };
  struct Cell {
    double lo = 0.0, hi = 0.0, mass = 0.0;
  };
  std::vector<Atom> atoms;
  std::vector<Cell> cells;

  double total_mass() const;
  // CDF limits from the right/left at x
  double cdf_right(double x) const;
  double cdf_left(double x) const;
};

Measure1D measure_from_cells(const EulerGrid& grid, const std::vector<double>& rho);
Measure1D measure_from_particles(const std::vector<EulerParticle>& ps);
Measure1D measure_from_euler(const EulerState& st);

// Both measures are normalized by their own total mass first; throws on a
// zero-mass input. Symmetric, satisfies the triangle inequality, zero iff
// the CDFs agree.
double wasserstein1_1d(const Measure1D& a, const Measure1D& b);

// int rho_eps (u - u_eps)^2 / 2 dx by midpoint quadrature. rho/u is the
// strong solution: throws if rho vanishes under rho_eps above floor.
double relative_entropy(const MacroFields& ueps, const std::vector<double>& rho,
                        const std::vector<double>& u, double dx);

// int |A(U_eps|U)| dx = int rho_eps (u_eps - u)^2 dx; equals twice the
// relative entropy.
double relative_flux_norm(const MacroFields& ueps, const std::vector<double>& rho,
                          const std::vector<double>& u, double dx);

// The upper-bound decomposition of the distance between f_eps and the
// monokinetic profile rho x delta_u for unit-Lipschitz test functions:
//   term1 = (1/mass) int |v - u(x)| f_eps dx dv,
//   term2 = W1(rho_eps_hat, rho_hat)  (normalized densities),
//   bound = term1 + (1 + Lip(u)) term2.
struct MonokineticDeviation {
  double term1 = 0.0, term2 = 0.0, bound = 0.0;
};
MonokineticDeviation monokinetic_deviation(const DistributionState& feps, const EulerGrid& grid,
                                           const std::vector<double>& rho,
                                           const std::vector<double>& u);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // rms of log-space residuals
};

// Least squares on (log eps, log err). Needs >= 2 positive pairs.
SlopeFit fit_loglog_slope(const std::vector<std::pair<double, double>>& pairs);

// per-eps error table of a hydrodynamic sweep
struct ConvergenceRecord {
  struct Row {
    double eps = 0.0;
    double w1_sup = 0.0;
    double re_sup = 0.0;
    double mono_sup = 0.0;
  };
  std::vector<Row> rows;
  SlopeFit w1_fit, re_fit, mono_fit;

  void fit();  // fills the three fits from rows
};

}  // namespace ktlab

#endif

#ifndef KTLAB_EULER_HPP
#define KTLAB_EULER_HPP

// Pressureless Euler system
//
//   d_t rho + d_x (rho u)      = 0,
//   d_t (rho u) + d_x (rho u^2) = 0,
//
// solved two ways: event-driven sticky particles (free flight, merge on
// collision conserving mass and momentum) and first-order upwind finite
// volume for the smooth pre-shock window.

#include <vector>

#include "ktlab/phase.hpp"

namespace ktlab {

struct EulerGrid {
  double x_min = 0.0, x_max = 1.0;
  int nx = 2;
  double dx = 0.5;
  double x_center(int i) const { return x_min + (i + 0.5) * dx; }
  double length() const { return x_max - x_min; }
};

EulerGrid make_euler_grid(double x_min, double x_max, int nx);

struct EulerParticle {
  double x = 0.0;
  double m = 0.0;
  double v = 0.0;
};

// Solution carrier: a sticky-particle list (sorted by x) or finite-volume
// (rho, m) arrays on the grid, depending on which solver produced it.
struct EulerState {
  double t = 0.0;
  std::vector<EulerParticle> particles;
  std::vector<double> rho, m;
  EulerGrid grid;
  bool shock_flagged = false;  // FV only: u steepened beyond 1/dx

  bool is_particle() const { return !particles.empty(); }
  double total_mass() const;
  double total_momentum() const;
};

// Event-driven sticky evolution of an explicit particle list. Periodic
// domains treat neighbors cyclically (positions are kept unwrapped
// internally and reported wrapped). Snapshots are taken at sample_times,
// which must be nondecreasing.
std::vector<EulerState> sticky_evolve(std::vector<EulerParticle> particles,
                                      const std::vector<double>& sample_times, Boundary bc,
                                      const EulerGrid& grid);

// One particle per grid cell: mass rho0(x_i) dx at the cell center with
// velocity u0(x_i).
std::vector<EulerState> sticky_run(const EulerGrid& grid, const std::vector<double>& rho0,
                                   const std::vector<double>& u0,
                                   const std::vector<double>& sample_times, Boundary bc);

// First-order conservative upwind update of (rho, m) with vacuum-safe
// velocity reconstruction. A detected shock (u steepening beyond 1/dx) sets
// shock_flagged on that snapshot and all later ones.
std::vector<EulerState> fv_run(const EulerGrid& grid, const std::vector<double>& rho0,
                               const std::vector<double>& u0,
                               const std::vector<double>& sample_times, Boundary bc,
                               double cfl = 0.5);

// (rho, u) arrays on the grid: FV states pass through, particle states are
// mass-averaged into cells.
struct EulerFields {
  std::vector<double> rho, u;
};
EulerFields euler_fields_on_grid(const EulerState& st, Boundary bc);

// First crossing time 1/max(-u0') of the smooth characteristics, estimated
// from one-sided differences; infinity if u0 is nondecreasing.
double crossing_time(const EulerGrid& grid, const std::vector<double>& u0, Boundary bc);

}  // namespace ktlab

#endif

#ifndef KTLAB_PHASE_HPP
#define KTLAB_PHASE_HPP

// Phase-space discretization and initial data for the kinetic traffic model
//
//   d_t f + v d_x f = d_v((v - u) f) + rho (u - v) f,
//
// where f = f(x, v, t) is the vehicle distribution on (x, v) in
// [x_min, x_max] x [0, v_max], rho(x) = int f dv the local density and
// u(x) = int v f dv / rho the local mean velocity. Cells store averages of f;
// all velocity quadrature is midpoint on cell centers.

#include <cstdint>
#include <functional>
#include <vector>

namespace ktlab {

enum class Boundary { FreeFlow, Periodic };

struct PhaseGrid {
  double x_min = 0.0, x_max = 0.0;  // position bounds
  double v_max = 0.0;               // velocity cutoff, domain [0, v_max]
  int nx = 0, nv = 0;               // cell counts
  double dx = 0.0, dv = 0.0;

  double x_center(int i) const { return x_min + (i + 0.5) * dx; }
  double v_center(int j) const { return (j + 0.5) * dv; }
  double x_edge(int i) const { return x_min + i * dx; }
  double v_edge(int j) const { return j * dv; }
  std::size_t cells() const { return static_cast<std::size_t>(nx) * nv; }
};

PhaseGrid build_grid(double x_min, double x_max, double v_max, int nx, int nv);

// Nonnegative cell averages of f at one time instant. Row-major in x:
// values[i*nv + j] is the cell centered at (x_center(i), v_center(j)).
struct DistributionState {
  PhaseGrid grid;
  std::vector<double> values;
  double t = 0.0;

  double& f(int i, int j) { return values[static_cast<std::size_t>(i) * grid.nv + j]; }
  double f(int i, int j) const { return values[static_cast<std::size_t>(i) * grid.nv + j]; }
  double mass() const;
  double max_abs() const;
};

DistributionState zero_state(const PhaseGrid& grid);

// Macroscopic fields on the x grid. velocity is m/rho where rho exceeds the
// vacuum floor and 0 elsewhere (vacuum flag set); all source terms that need
// u are switched off in vacuum cells.
struct MacroFields {
  std::vector<double> rho;             // int f dv
  std::vector<double> momentum;        // int v f dv
  std::vector<double> velocity;        // m/rho above floor, else 0
  std::vector<double> energy_density;  // int v^2 f dv
  std::vector<std::uint8_t> vacuum;    // 1 where rho <= floor
  double rho_floor = 0.0;
};

// Mollifier theta_eps(x) = theta(x/eps)/eps built from the standard bump
// exp(-1/(1-s^2)) on (-1,1). The discrete kernel is renormalized on the grid
// so its integral is exactly 1.
struct MollifierSpec {
  double eps = 0.0;
};

// Kernel weights at offsets k*dx, k = -K..K, with dx * sum(w) == 1.
// For eps < dx the kernel degenerates to a single spike (identity
// convolution); a warning is emitted once per call site in mollify.
std::vector<double> mollifier_kernel(const MollifierSpec& spec, double dx);

// Discrete convolution of an x-grid field with theta_eps. Preserves the
// integral (exactly for periodic; for free-flow provided the field vanishes
// within eps of the domain ends) and nonnegativity.
std::vector<double> mollify(const std::vector<double>& field, const MollifierSpec& spec,
                            double dx, Boundary bc);

// f = height on [x_lo,x_hi] x [v_lo,v_hi] with partially covered cells
// weighted by overlap, so the total mass is exact. Requires v_lo > 0 so that
// f vanishes at v = 0.
DistributionState init_rectangle(const PhaseGrid& grid, double x_lo, double x_hi,
                                 double v_lo, double v_hi, double height);

struct WellPreparedOptions {
  double bump_scale = 1.0;    // sigma = bump_scale * sqrt(eps_scale)
  double offset_amp = 0.0;    // bump center u0(x) + offset_amp*sqrt(eps)*cos(2 pi offset_freq x)
  double offset_freq = 1.0;
  bool fixed_spread = false;  // ill-prepared control: sigma = bump_scale, independent of eps
};

// f0(x,v) = rho0(x) g_sigma(v - uc(x)) with g the compactly supported quartic
// kernel of standard deviation sigma = bump_scale*sqrt(eps_scale) and
// uc = u0 + offset. Per-cell velocity mass is renormalized so the discrete
// density equals rho0 exactly. Throws if the bump support would leak past
// v = 0 or v = v_max.
DistributionState init_well_prepared(const PhaseGrid& grid,
                                     const std::function<double(double)>& rho0,
                                     const std::function<double(double)>& u0,
                                     double eps_scale,
                                     const WellPreparedOptions& opt = {});

// Quartic (biweight) kernel with unit mass and standard deviation sigma:
// support [-sigma*sqrt(7), sigma*sqrt(7)].
double quartic_bump(double w, double sigma);

}  // namespace ktlab

#endif

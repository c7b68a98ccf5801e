#include "ktlab/phase.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "ktlab/errors.hpp"

namespace ktlab {

PhaseGrid build_grid(double x_min, double x_max, double v_max, int nx, int nv) {
  if (!(x_max > x_min)) throw ConfigError("build_grid: need x_max > x_min");
  if (!(v_max > 0.0)) throw ConfigError("build_grid: need v_max > 0");
  if (nx < 2) throw ConfigError("build_grid: need nx >= 2");
  if (nv < 2) throw ConfigError("build_grid: need nv >= 2");
  PhaseGrid g;
  g.x_min = x_min;
  g.x_max = x_max;
  g.v_max = v_max;
  g.nx = nx;
  g.nv = nv;
  g.dx = (x_max - x_min) / nx;
  g.dv = v_max / nv;
  return g;
}

double DistributionState::mass() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s * grid.dx * grid.dv;
}

double DistributionState::max_abs() const {
  double s = 0.0;
  for (double v : values) s = std::max(s, std::abs(v));
  return s;
}

DistributionState zero_state(const PhaseGrid& grid) {
  DistributionState st;
  st.grid = grid;
  st.values.assign(grid.cells(), 0.0);
  st.t = 0.0;
  return st;
}

std::vector<double> mollifier_kernel(const MollifierSpec& spec, double dx) {
  if (!(spec.eps > 0.0)) throw ConfigError("mollifier_kernel: need eps > 0");
  const int half = static_cast<int>(std::ceil(spec.eps / dx)) - 1;
  std::vector<double> w(2 * std::max(half, 0) + 1, 0.0);
  const int k0 = static_cast<int>(w.size()) / 2;
  double sum = 0.0;
  for (int k = -k0; k <= k0; ++k) {
    const double s = k * dx / spec.eps;
    if (std::abs(s) < 1.0) w[k0 + k] = std::exp(-1.0 / (1.0 - s * s));
    sum += w[k0 + k];
  }
  // renormalize so dx * sum(w) == 1 exactly
  for (double& wk : w) wk /= (sum * dx);
  return w;
}

std::vector<double> mollify(const std::vector<double>& field, const MollifierSpec& spec,
                            double dx, Boundary bc) {
  if (spec.eps < dx) {
    std::fprintf(stderr,
                 "ktlab: mollifier width %.3g below cell size %.3g, falling back to identity\n",
                 spec.eps, dx);
    return field;
  }
  const std::vector<double> w = mollifier_kernel(spec, dx);
  const int k0 = static_cast<int>(w.size()) / 2;
  const int n = static_cast<int>(field.size());
  std::vector<double> out(field.size(), 0.0);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int k = -k0; k <= k0; ++k) {
      int src = i - k;
      if (bc == Boundary::Periodic) {
        src = ((src % n) + n) % n;
      } else if (src < 0 || src >= n) {
        continue;  // zero padding
      }
      s += w[k0 + k] * field[src];
    }
    out[i] = s * dx;
  }
  return out;
}

DistributionState init_rectangle(const PhaseGrid& grid, double x_lo, double x_hi,
                                 double v_lo, double v_hi, double height) {
  if (!(v_lo > 0.0)) throw ConfigError("init_rectangle: v_box must stay away from v = 0");
  if (!(x_lo < x_hi) || !(v_lo < v_hi)) throw ConfigError("init_rectangle: empty box");
  if (x_lo < grid.x_min || x_hi > grid.x_max || v_hi > grid.v_max)
    throw ConfigError("init_rectangle: box outside grid");
  if (height < 0.0) throw ConfigError("init_rectangle: height must be >= 0");

  DistributionState st = zero_state(grid);
  for (int i = 0; i < grid.nx; ++i) {
    const double x0 = std::max(grid.x_edge(i), x_lo);
    const double x1 = std::min(grid.x_edge(i + 1), x_hi);
    if (x1 <= x0) continue;
    const double fx = (x1 - x0) / grid.dx;
    for (int j = 0; j < grid.nv; ++j) {
      const double v0 = std::max(grid.v_edge(j), v_lo);
      const double v1 = std::min(grid.v_edge(j + 1), v_hi);
      if (v1 <= v0) continue;
      st.f(i, j) = height * fx * (v1 - v0) / grid.dv;
    }
  }
  return st;
}

double quartic_bump(double w, double sigma) {
  // biweight kernel (15/16)(1-s^2)^2 on (-1,1) has variance 1/7; rescale so
  // the standard deviation is sigma
  const double h = sigma * std::sqrt(7.0);
  const double s = w / h;
  if (std::abs(s) >= 1.0) return 0.0;
  const double q = 1.0 - s * s;
  return (15.0 / 16.0) * q * q / h;
}

DistributionState init_well_prepared(const PhaseGrid& grid,
                                     const std::function<double(double)>& rho0,
                                     const std::function<double(double)>& u0,
                                     double eps_scale,
                                     const WellPreparedOptions& opt) {
  if (!(eps_scale > 0.0)) throw ConfigError("init_well_prepared: need eps_scale > 0");
  const double sqeps = std::sqrt(eps_scale);
  const double sigma = opt.fixed_spread ? opt.bump_scale : opt.bump_scale * sqeps;
  if (!(sigma > 0.0)) throw ConfigError("init_well_prepared: need positive bump width");
  const double half_width = sigma * std::sqrt(7.0);

  DistributionState st = zero_state(grid);
  constexpr double two_pi = 6.283185307179586476925286766559;
  for (int i = 0; i < grid.nx; ++i) {
    const double x = grid.x_center(i);
    const double rho = rho0(x);
    if (rho < 0.0) throw ConfigError("init_well_prepared: rho0 must be >= 0");
    if (rho == 0.0) continue;
    const double uc = u0(x) + opt.offset_amp * sqeps * std::cos(two_pi * opt.offset_freq * x);
    if (uc - half_width <= 0.0 || uc + half_width >= grid.v_max)
      throw ConfigError("init_well_prepared: velocity bump leaks past v=0 or v=v_max");
    double cell_sum = 0.0;
    for (int j = 0; j < grid.nv; ++j) {
      const double g = quartic_bump(grid.v_center(j) - uc, sigma);
      st.f(i, j) = g;
      cell_sum += g;
    }
    if (cell_sum <= 0.0)
      throw ConfigError("init_well_prepared: bump unresolved by the velocity grid");
    // renormalize so the discrete density equals rho0(x) exactly
    const double scale = rho / (cell_sum * grid.dv);
    for (int j = 0; j < grid.nv; ++j) st.f(i, j) *= scale;
  }
  return st;
}

}  // namespace ktlab

#include "ktlab/euler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ktlab/errors.hpp"

namespace ktlab {

EulerGrid make_euler_grid(double x_min, double x_max, int nx) {
  if (!(x_max > x_min)) throw ConfigError("make_euler_grid: need x_max > x_min");
  if (nx < 2) throw ConfigError("make_euler_grid: need nx >= 2");
  EulerGrid g;
  g.x_min = x_min;
  g.x_max = x_max;
  g.nx = nx;
  g.dx = (x_max - x_min) / nx;
  return g;
}

double EulerState::total_mass() const {
  double s = 0.0;
  if (is_particle()) {
    for (const auto& p : particles) s += p.m;
  } else {
    for (double r : rho) s += r * grid.dx;
  }
  return s;
}

double EulerState::total_momentum() const {
  double s = 0.0;
  if (is_particle()) {
    for (const auto& p : particles) s += p.m * p.v;
  } else {
    for (double mi : m) s += mi * grid.dx;
  }
  return s;
}

namespace {

struct StickySystem {
  std::vector<EulerParticle> ps;  // positions unwrapped, strictly increasing
  double t = 0.0;
  bool periodic = false;
  double L = 0.0;

  int n() const { return static_cast<int>(ps.size()); }

  // collision time of neighbor pair (k, k+1 cyclic), infinity if receding
  double pair_time(int k) const {
    const int k2 = (k + 1) % n();
    double gap = ps[k2].x - ps[k].x;
    if (periodic && k2 == 0) gap += L;
    const double close = ps[k].v - ps[k2].v;
    if (close <= 0.0) return std::numeric_limits<double>::infinity();
    return t + gap / close;
  }

  void advance_to(double tt) {
    const double dt = tt - t;
    for (auto& p : ps) p.x += p.v * dt;
    t = tt;
  }

  // merge pair (k, k+1 cyclic) at the current time; particles coincide
  void merge(int k) {
    const int k2 = (k + 1) % n();
    EulerParticle merged;
    merged.m = ps[k].m + ps[k2].m;
    merged.v = (ps[k].m * ps[k].v + ps[k2].m * ps[k2].v) / merged.m;
    merged.x = ps[k].x;  // collision point (k2 sits at the same point mod L)
    ps[k] = merged;
    ps.erase(ps.begin() + k2);
  }

  void run_until(double tt) {
    while (true) {
      if (n() <= 1) break;
      int best = -1;
      double best_t = std::numeric_limits<double>::infinity();
      const int last_pair = periodic ? n() : n() - 1;
      for (int k = 0; k < last_pair; ++k) {
        const double ct = pair_time(k);
        if (ct < best_t) {
          best_t = ct;
          best = k;
        }
      }
      if (best < 0 || best_t > tt) break;
      advance_to(best_t);
      merge(best);
    }
    advance_to(tt);
  }

  EulerState snapshot(const EulerGrid& grid) const {
    EulerState st;
    st.t = t;
    st.grid = grid;
    st.particles = ps;
    if (periodic) {
      for (auto& p : st.particles)
        p.x = grid.x_min + std::fmod(std::fmod(p.x - grid.x_min, L) + L, L);
      std::sort(st.particles.begin(), st.particles.end(),
                [](const EulerParticle& a, const EulerParticle& b) { return a.x < b.x; });
    }
    return st;
  }
};

}  // namespace

std::vector<EulerState> sticky_evolve(std::vector<EulerParticle> particles,
                                      const std::vector<double>& sample_times, Boundary bc,
                                      const EulerGrid& grid) {
  StickySystem sys;
  sys.periodic = bc == Boundary::Periodic;
  sys.L = grid.length();
  std::sort(particles.begin(), particles.end(),
            [](const EulerParticle& a, const EulerParticle& b) { return a.x < b.x; });
  // coincident particles merge immediately
  for (std::size_t k = 0; k + 1 < particles.size();) {
    if (particles[k + 1].x - particles[k].x <= 0.0) {
      const double m = particles[k].m + particles[k + 1].m;
      particles[k].v = (particles[k].m * particles[k].v + particles[k + 1].m * particles[k + 1].v) / m;
      particles[k].m = m;
      particles.erase(particles.begin() + k + 1);
    } else {
      ++k;
    }
  }
  sys.ps = std::move(particles);

  std::vector<EulerState> out;
  for (double tt : sample_times) {
    if (tt < sys.t) throw ConfigError("sticky_evolve: sample times must be nondecreasing");
    sys.run_until(tt);
    out.push_back(sys.snapshot(grid));
  }
  return out;
}

std::vector<EulerState> sticky_run(const EulerGrid& grid, const std::vector<double>& rho0,
                                   const std::vector<double>& u0,
                                   const std::vector<double>& sample_times, Boundary bc) {
  std::vector<EulerParticle> ps;
  for (int i = 0; i < grid.nx; ++i) {
    if (rho0[i] <= 0.0) continue;
    ps.push_back({grid.x_center(i), rho0[i] * grid.dx, u0[i]});
  }
  if (ps.empty()) throw ConfigError("sticky_run: zero-mass initial data");
  return sticky_evolve(std::move(ps), sample_times, bc, grid);
}

std::vector<EulerState> fv_run(const EulerGrid& grid, const std::vector<double>& rho0,
                               const std::vector<double>& u0,
                               const std::vector<double>& sample_times, Boundary bc,
                               double cfl) {
  const int n = grid.nx;
  std::vector<double> rho = rho0, m(n);
  double mass0 = 0.0;
  for (int i = 0; i < n; ++i) {
    m[i] = rho0[i] * u0[i];
    mass0 += rho0[i];
  }
  const double floor = 1e-12 * mass0 / n;

  double umax = 0.0;
  for (int i = 0; i < n; ++i) umax = std::max(umax, std::abs(u0[i]));
  const double dt_base = umax > 0.0 ? cfl * grid.dx / umax : sample_times.back();

  auto velocity = [&](int i) { return rho[i] > floor ? m[i] / rho[i] : 0.0; };

  bool shocked = false;
  auto check_shock = [&]() {
    for (int i = 0; i + 1 < n; ++i)
      if (velocity(i) - velocity(i + 1) > 1.0) return true;
    if (bc == Boundary::Periodic && velocity(n - 1) - velocity(0) > 1.0) return true;
    return false;
  };

  std::vector<EulerState> out;
  double t = 0.0;
  std::vector<double> frho(n + 1), fm(n + 1);
  for (double tt : sample_times) {
    if (tt < t) throw ConfigError("fv_run: sample times must be nondecreasing");
    while (t < tt - 1e-15) {
      const double dt = std::min(dt_base, tt - t);
      // interface fluxes, upwinded by the interface velocity sign
      for (int e = 0; e <= n; ++e) {
        int il = e - 1, ir = e;
        if (bc == Boundary::Periodic) {
          il = (il + n) % n;
          ir = ir % n;
        } else {
          if (e == 0 || e == n) {  // zero inflow, free outflow handled below
            frho[e] = 0.0;
            fm[e] = 0.0;
            if (e == 0) continue;
            // outflow at the right edge
            const double ul = velocity(n - 1);
            if (ul > 0.0) {
              frho[e] = ul * rho[n - 1];
              fm[e] = ul * m[n - 1];
            }
            continue;
          }
        }
        const double ubar = 0.5 * (velocity(il) + velocity(ir));
        if (ubar > 0.0) {
          frho[e] = ubar * rho[il];
          fm[e] = ubar * m[il];
        } else if (ubar < 0.0) {
          frho[e] = ubar * rho[ir];
          fm[e] = ubar * m[ir];
        } else {
          frho[e] = 0.0;
          fm[e] = 0.0;
        }
      }
      const double lam = dt / grid.dx;
      for (int i = 0; i < n; ++i) {
        rho[i] -= lam * (frho[i + 1] - frho[i]);
        m[i] -= lam * (fm[i + 1] - fm[i]);
        if (rho[i] < 0.0) rho[i] = 0.0;  // roundoff guard
      }
      t += dt;
      if (!shocked && check_shock()) shocked = true;
    }
    EulerState st;
    st.t = tt;
    st.grid = grid;
    st.rho = rho;
    st.m = m;
    st.shock_flagged = shocked;
    out.push_back(std::move(st));
    t = tt;
  }
  return out;
}

EulerFields euler_fields_on_grid(const EulerState& st, Boundary bc) {
  const EulerGrid& g = st.grid;
  EulerFields f;
  f.rho.assign(g.nx, 0.0);
  f.u.assign(g.nx, 0.0);
  if (!st.is_particle()) {
    f.rho = st.rho;
    double mass = 0.0;
    for (double r : st.rho) mass += r * g.dx;
    const double floor = 1e-12 * mass / g.nx;
    for (int i = 0; i < g.nx; ++i) f.u[i] = st.rho[i] > floor ? st.m[i] / st.rho[i] : 0.0;
    return f;
  }
  std::vector<double> mom(g.nx, 0.0);
  for (const auto& p : st.particles) {
    double pos = (p.x - g.x_min) / g.dx;
    int i = static_cast<int>(std::floor(pos));
    if (bc == Boundary::Periodic)
      i = ((i % g.nx) + g.nx) % g.nx;
    else
      i = std::clamp(i, 0, g.nx - 1);
    f.rho[i] += p.m / g.dx;
    mom[i] += p.m * p.v / g.dx;
  }
  for (int i = 0; i < g.nx; ++i)
    if (f.rho[i] > 0.0) f.u[i] = mom[i] / f.rho[i];
  return f;
}

double crossing_time(const EulerGrid& grid, const std::vector<double>& u0, Boundary bc) {
  double steepest = 0.0;
  for (int i = 0; i + 1 < grid.nx; ++i)
    steepest = std::max(steepest, (u0[i] - u0[i + 1]) / grid.dx);
  if (bc == Boundary::Periodic)
    steepest = std::max(steepest, (u0[grid.nx - 1] - u0[0]) / grid.dx);
  if (steepest <= 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / steepest;
}

}  // namespace ktlab

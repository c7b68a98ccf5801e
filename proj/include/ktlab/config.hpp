#ifndef KTLAB_CONFIG_HPP
#define KTLAB_CONFIG_HPP

// Scenario configuration and its JSON form. Field names in the JSON document
// mirror the struct fields; see configs/ for examples.

#include <optional>
#include <string>
#include <vector>

#include "ktlab/phase.hpp"

namespace ktlab {

enum class Variant { Unscaled, Regularized, Scaled };

std::string to_string(Variant v);
std::string to_string(Boundary b);

// Analytic x profile: constant, or mean + amp * sin(2 pi freq x), or
// mean + amp * cos(2 pi freq x).
struct ProfileSpec {
  enum class Kind { Constant, Sine, Cosine } kind = Kind::Constant;
  double value = 0.0;  // constant value or mean
  double amp = 0.0;
  double freq = 1.0;

  double operator()(double x) const;
};

struct InitialSpec {
  enum class Kind { Rectangle, WellPrepared } kind = Kind::Rectangle;
  // rectangle
  double x_lo = 0.0, x_hi = 1.0, v_lo = 1.0, v_hi = 2.0, height = 1.0;
  // well-prepared family
  ProfileSpec rho0;
  ProfileSpec u0;
  WellPreparedOptions well;
};

struct GridSpecConfig {
  double x_min = 0.0, x_max = 1.0, v_max = 1.0;
  int nx = 2, nv = 2;
};

struct ScenarioConfig {
  GridSpecConfig grid;
  InitialSpec initial;
  Variant variant = Variant::Unscaled;
  double eps_reg = 0.0;    // regularization (mollifier width and denominators)
  double eps_scale = 0.0;  // Euler scaling parameter (kappa = 1/eps_scale)
  double t_final = 1.0;
  double cfl = 0.5;                 // dt = cfl * dx / v_max unless dt given
  std::optional<double> dt;         // explicit step override
  int output_cadence = 10;          // diagnostics every this many steps
  double rho_floor = -1.0;          // <0: automatic
  Boundary boundary = Boundary::FreeFlow;

  void validate() const;  // throws ConfigError
  PhaseGrid make_grid() const;
  DistributionState make_initial() const;
  double step_size() const;
};

ScenarioConfig scenario_from_json_file(const std::string& path);
ScenarioConfig scenario_from_json_text(const std::string& text);
std::string scenario_to_json_text(const ScenarioConfig& cfg);

// epsilon sweep for the hydrodynamic-limit experiment
struct SweepConfig {
  GridSpecConfig grid;
  std::vector<double> eps_list;  // strictly decreasing
  ProfileSpec rho0;
  ProfileSpec u0;
  double bump_scale = 0.3;
  double offset_amp = 0.3;
  double offset_freq = 1.0;
  bool ill_prepared = false;  // negative control: eps-independent spread, no offset
  double t_final = 0.2;
  double cfl = 0.5;
  int samples = 50;
  Boundary boundary = Boundary::Periodic;
  double w1_slope_lo = 0.3, w1_slope_hi = 0.8;
  double re_slope_lo = 0.7, re_slope_hi = 1.3;

  void validate() const;
};

SweepConfig sweep_from_json_file(const std::string& path);
SweepConfig sweep_from_json_text(const std::string& text);

struct PicardConfig {
  ScenarioConfig scenario;  // variant forced to Regularized
  int n_iters = 6;

  void validate() const;
};

PicardConfig picard_from_json_file(const std::string& path);
PicardConfig picard_from_json_text(const std::string& text);

struct CompareConfig {
  enum class Mode { Kinetic, Euler } mode = Mode::Kinetic;
  ScenarioConfig scenario;  // kinetic mode: shared initial data and grid
  // kinetic mode
  int n_particles = 100000;
  double eps_moll = -1.0;  // <0: 2*dx
  double w1_bound = 0.05;  // frozen regression bound
  // euler mode
  ProfileSpec rho0;
  ProfileSpec u0;
  double bound_factor = 2.0;  // W1(fv, sticky) <= bound_factor * dx

  void validate() const;
};

CompareConfig compare_from_json_file(const std::string& path);
CompareConfig compare_from_json_text(const std::string& text);

}  // namespace ktlab

#endif

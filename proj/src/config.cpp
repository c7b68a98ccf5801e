#include "ktlab/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ktlab/errors.hpp"

namespace ktlab {

using nlohmann::json;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("invalid JSON in " + path + ": " + e.what());
  }
  return j;
}

json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
}

double get_num(const json& j, const std::string& key, double fallback, bool required = false) {
  if (!j.contains(key)) {
    if (required) throw ConfigError("missing config field: " + key);
    return fallback;
  }
  if (!j[key].is_number()) throw ConfigError("config field must be a number: " + key);
  return j[key].get<double>();
}

int get_int(const json& j, const std::string& key, int fallback, bool required = false) {
  if (!j.contains(key)) {
    if (required) throw ConfigError("missing config field: " + key);
    return fallback;
  }
  if (!j[key].is_number_integer()) throw ConfigError("config field must be an integer: " + key);
  return j[key].get<int>();
}

ProfileSpec profile_from(const json& j, const std::string& what) {
  if (!j.is_object()) throw ConfigError("profile must be an object: " + what);
  ProfileSpec p;
  const std::string kind = j.value("type", "constant");
  if (kind == "constant") {
    p.kind = ProfileSpec::Kind::Constant;
    p.value = get_num(j, "value", 0.0, true);
  } else if (kind == "sine" || kind == "cosine") {
    p.kind = kind == "sine" ? ProfileSpec::Kind::Sine : ProfileSpec::Kind::Cosine;
    p.value = get_num(j, "mean", 0.0, true);
    p.amp = get_num(j, "amp", 0.0, true);
    p.freq = get_num(j, "freq", 1.0);
  } else {
    throw ConfigError("unknown profile type '" + kind + "' in " + what);
  }
  return p;
}

json profile_to(const ProfileSpec& p) {
  json j;
  switch (p.kind) {
    case ProfileSpec::Kind::Constant:
      j["type"] = "constant";
      j["value"] = p.value;
      break;
    case ProfileSpec::Kind::Sine:
    case ProfileSpec::Kind::Cosine:
      j["type"] = p.kind == ProfileSpec::Kind::Sine ? "sine" : "cosine";
      j["mean"] = p.value;
      j["amp"] = p.amp;
      j["freq"] = p.freq;
      break;
  }
  return j;
}

GridSpecConfig grid_from(const json& j) {
  if (!j.is_object()) throw ConfigError("grid must be an object");
  GridSpecConfig g;
  g.x_min = get_num(j, "x_min", 0.0, true);
  g.x_max = get_num(j, "x_max", 0.0, true);
  g.v_max = get_num(j, "v_max", 0.0, true);
  g.nx = get_int(j, "nx", 0, true);
  g.nv = get_int(j, "nv", 0, true);
  return g;
}

Boundary boundary_from(const json& j, Boundary fallback) {
  if (!j.contains("boundary")) return fallback;
  const std::string b = j["boundary"].get<std::string>();
  if (b == "free") return Boundary::FreeFlow;
  if (b == "periodic") return Boundary::Periodic;
  throw ConfigError("boundary must be 'free' or 'periodic', got '" + b + "'");
}

}  // namespace

std::string to_string(Variant v) {
  switch (v) {
    case Variant::Unscaled: return "unscaled";
    case Variant::Regularized: return "regularized";
    case Variant::Scaled: return "scaled";
  }
  return "?";
}

std::string to_string(Boundary b) {
  return b == Boundary::Periodic ? "periodic" : "free";
}

double ProfileSpec::operator()(double x) const {
  switch (kind) {
    case Kind::Constant: return value;
    case Kind::Sine: return value + amp * std::sin(kTwoPi * freq * x);
    case Kind::Cosine: return value + amp * std::cos(kTwoPi * freq * x);
  }
  return 0.0;
}

void ScenarioConfig::validate() const {
  if (!(t_final > 0.0)) throw ConfigError("t_final must be > 0");
  if (!(cfl > 0.0) || cfl > 1.0) throw ConfigError("cfl must lie in (0, 1]");
  if (variant == Variant::Regularized && !(eps_reg > 0.0))
    throw ConfigError("regularized variant needs eps_reg > 0");
  if (variant == Variant::Scaled && !(eps_scale > 0.0))
    throw ConfigError("scaled variant needs eps_scale > 0");
  const PhaseGrid g = make_grid();
  if (dt) {
    const double bound = cfl * g.dx / g.v_max;
    if (*dt > bound * (1.0 + 1e-12)) {
      std::ostringstream os;
      os << "dt = " << *dt << " violates the CFL bound cfl*dx/v_max = " << bound;
      throw ConfigError(os.str());
    }
  }
  if (initial.kind == InitialSpec::Kind::Rectangle && initial.height > 0.0) {
    // headroom so the velocity support never grows past the cutoff
    if (g.v_max < 1.2 * initial.v_hi)
      throw ConfigError("v_max must be at least 1.2x the initial velocity support maximum");
  }
  if (output_cadence < 1) throw ConfigError("output_cadence must be >= 1");
}

PhaseGrid ScenarioConfig::make_grid() const {
  return build_grid(grid.x_min, grid.x_max, grid.v_max, grid.nx, grid.nv);
}

DistributionState ScenarioConfig::make_initial() const {
  const PhaseGrid g = make_grid();
  if (initial.kind == InitialSpec::Kind::Rectangle) {
    if (initial.height == 0.0) return zero_state(g);
    return init_rectangle(g, initial.x_lo, initial.x_hi, initial.v_lo, initial.v_hi,
                          initial.height);
  }
  const double eps = variant == Variant::Scaled ? eps_scale : eps_reg;
  return init_well_prepared(
      g, [&](double x) { return initial.rho0(x); }, [&](double x) { return initial.u0(x); },
      eps, initial.well);
}

double ScenarioConfig::step_size() const {
  if (dt) return *dt;
  const PhaseGrid g = make_grid();
  return cfl * g.dx / g.v_max;
}

static ScenarioConfig scenario_from(const json& j) {
  ScenarioConfig c;
  if (!j.contains("grid")) throw ConfigError("missing config field: grid");
  c.grid = grid_from(j["grid"]);

  if (!j.contains("initial")) throw ConfigError("missing config field: initial");
  const json& ji = j["initial"];
  const std::string kind = ji.value("type", "rectangle");
  if (kind == "rectangle") {
    c.initial.kind = InitialSpec::Kind::Rectangle;
    if (ji.contains("x_box")) {
      c.initial.x_lo = ji["x_box"].at(0).get<double>();
      c.initial.x_hi = ji["x_box"].at(1).get<double>();
    }
    if (ji.contains("v_box")) {
      c.initial.v_lo = ji["v_box"].at(0).get<double>();
      c.initial.v_hi = ji["v_box"].at(1).get<double>();
    }
    c.initial.height = get_num(ji, "height", 1.0);
  } else if (kind == "well_prepared") {
    c.initial.kind = InitialSpec::Kind::WellPrepared;
    if (!ji.contains("rho0") || !ji.contains("u0"))
      throw ConfigError("well_prepared initial data needs rho0 and u0 profiles");
    c.initial.rho0 = profile_from(ji["rho0"], "initial.rho0");
    c.initial.u0 = profile_from(ji["u0"], "initial.u0");
    c.initial.well.bump_scale = get_num(ji, "bump_scale", 1.0);
    c.initial.well.offset_amp = get_num(ji, "offset_amp", 0.0);
    c.initial.well.offset_freq = get_num(ji, "offset_freq", 1.0);
    c.initial.well.fixed_spread = ji.value("fixed_spread", false);
  } else {
    throw ConfigError("unknown initial type '" + kind + "'");
  }

  const std::string variant = j.value("variant", "unscaled");
  if (variant == "unscaled")
    c.variant = Variant::Unscaled;
  else if (variant == "regularized")
    c.variant = Variant::Regularized;
  else if (variant == "scaled")
    c.variant = Variant::Scaled;
  else
    throw ConfigError("unknown variant '" + variant + "'");

  c.eps_reg = get_num(j, "eps_reg", 0.0);
  c.eps_scale = get_num(j, "eps_scale", 0.0);
  c.t_final = get_num(j, "t_final", 1.0, true);
  c.cfl = get_num(j, "cfl", 0.5);
  if (j.contains("dt")) c.dt = get_num(j, "dt", 0.0, true);
  c.output_cadence = get_int(j, "output_cadence", 10);
  c.rho_floor = get_num(j, "rho_floor", -1.0);
  c.boundary = boundary_from(j, Boundary::FreeFlow);
  c.validate();
  return c;
}

ScenarioConfig scenario_from_json_file(const std::string& path) {
  return scenario_from(parse_file(path));
}

ScenarioConfig scenario_from_json_text(const std::string& text) {
  return scenario_from(parse_text(text));
}

std::string scenario_to_json_text(const ScenarioConfig& c) {
  json j;
  j["grid"] = {{"x_min", c.grid.x_min}, {"x_max", c.grid.x_max}, {"v_max", c.grid.v_max},
               {"nx", c.grid.nx},       {"nv", c.grid.nv}};
  json ji;
  if (c.initial.kind == InitialSpec::Kind::Rectangle) {
    ji["type"] = "rectangle";
    ji["x_box"] = {c.initial.x_lo, c.initial.x_hi};
    ji["v_box"] = {c.initial.v_lo, c.initial.v_hi};
    ji["height"] = c.initial.height;
  } else {
    ji["type"] = "well_prepared";
    ji["rho0"] = profile_to(c.initial.rho0);
    ji["u0"] = profile_to(c.initial.u0);
    ji["bump_scale"] = c.initial.well.bump_scale;
    ji["offset_amp"] = c.initial.well.offset_amp;
    ji["offset_freq"] = c.initial.well.offset_freq;
    ji["fixed_spread"] = c.initial.well.fixed_spread;
  }
  j["initial"] = ji;
  j["variant"] = to_string(c.variant);
  j["eps_reg"] = c.eps_reg;
  j["eps_scale"] = c.eps_scale;
  j["t_final"] = c.t_final;
  j["cfl"] = c.cfl;
  if (c.dt) j["dt"] = *c.dt;
  j["output_cadence"] = c.output_cadence;
  j["rho_floor"] = c.rho_floor;
  j["boundary"] = to_string(c.boundary);
  return j.dump(2);
}

void SweepConfig::validate() const {
  if (eps_list.size() < 4) throw ConfigError("sweep needs at least 4 eps_scale values");
  for (std::size_t k = 0; k < eps_list.size(); ++k) {
    if (!(eps_list[k] > 0.0)) throw ConfigError("sweep eps values must be > 0");
    if (k > 0 && !(eps_list[k] < eps_list[k - 1]))
      throw ConfigError("sweep eps values must be strictly decreasing");
  }
  if (!(t_final > 0.0)) throw ConfigError("t_final must be > 0");
  if (samples < 2) throw ConfigError("samples must be >= 2");
}

static SweepConfig sweep_from(const json& j) {
  SweepConfig c;
  if (!j.contains("grid")) throw ConfigError("missing config field: grid");
  c.grid = grid_from(j["grid"]);
  if (!j.contains("eps_list")) throw ConfigError("missing config field: eps_list");
  for (const auto& e : j["eps_list"]) c.eps_list.push_back(e.get<double>());
  if (!j.contains("rho0") || !j.contains("u0"))
    throw ConfigError("sweep needs rho0 and u0 profiles");
  c.rho0 = profile_from(j["rho0"], "rho0");
  c.u0 = profile_from(j["u0"], "u0");
  c.bump_scale = get_num(j, "bump_scale", 0.3);
  c.offset_amp = get_num(j, "offset_amp", 0.3);
  c.offset_freq = get_num(j, "offset_freq", 1.0);
  c.ill_prepared = j.value("ill_prepared", false);
  c.t_final = get_num(j, "t_final", 0.2, true);
  c.cfl = get_num(j, "cfl", 0.5);
  c.samples = get_int(j, "samples", 50);
  c.boundary = boundary_from(j, Boundary::Periodic);
  if (j.contains("w1_slope_window")) {
    c.w1_slope_lo = j["w1_slope_window"].at(0).get<double>();
    c.w1_slope_hi = j["w1_slope_window"].at(1).get<double>();
  }
  if (j.contains("re_slope_window")) {
    c.re_slope_lo = j["re_slope_window"].at(0).get<double>();
    c.re_slope_hi = j["re_slope_window"].at(1).get<double>();
  }
  c.validate();
  return c;
}

SweepConfig sweep_from_json_file(const std::string& path) { return sweep_from(parse_file(path)); }
SweepConfig sweep_from_json_text(const std::string& text) { return sweep_from(parse_text(text)); }

void PicardConfig::validate() const {
  if (n_iters < 2) throw ConfigError("picard needs n_iters >= 2");
  if (!(scenario.eps_reg > 0.0)) throw ConfigError("picard needs eps_reg > 0");
}

static PicardConfig picard_from(const json& j) {
  PicardConfig c;
  c.scenario = scenario_from(j);
  c.scenario.variant = Variant::Regularized;
  c.n_iters = get_int(j, "n_iters", 6);
  c.validate();
  return c;
}

PicardConfig picard_from_json_file(const std::string& path) {
  return picard_from(parse_file(path));
}
PicardConfig picard_from_json_text(const std::string& text) {
  return picard_from(parse_text(text));
}

void CompareConfig::validate() const {
  if (mode == Mode::Kinetic) {
    if (n_particles < 1000) throw ConfigError("compare needs at least 1000 particles");
    if (!(w1_bound > 0.0)) throw ConfigError("compare needs w1_bound > 0");
  } else {
    if (!(bound_factor > 0.0)) throw ConfigError("compare needs bound_factor > 0");
  }
}

static CompareConfig compare_from(const json& j) {
  CompareConfig c;
  const std::string mode = j.value("mode", "kinetic");
  if (mode == "kinetic")
    c.mode = CompareConfig::Mode::Kinetic;
  else if (mode == "euler")
    c.mode = CompareConfig::Mode::Euler;
  else
    throw ConfigError("compare mode must be 'kinetic' or 'euler'");

  if (c.mode == CompareConfig::Mode::Kinetic) {
    c.scenario = scenario_from(j);
    c.n_particles = get_int(j, "n_particles", 100000);
    c.eps_moll = get_num(j, "eps_moll", -1.0);
    c.w1_bound = get_num(j, "w1_bound", 0.05);
  } else {
    // only the x grid and run horizon matter in euler mode
    if (!j.contains("grid")) throw ConfigError("missing config field: grid");
    const json& jg = j["grid"];
    c.scenario.grid.x_min = get_num(jg, "x_min", 0.0, true);
    c.scenario.grid.x_max = get_num(jg, "x_max", 0.0, true);
    c.scenario.grid.nx = get_int(jg, "nx", 0, true);
    c.scenario.grid.v_max = get_num(jg, "v_max", 1.0);
    c.scenario.grid.nv = get_int(jg, "nv", 2);
    c.scenario.t_final = get_num(j, "t_final", 0.2, true);
    c.scenario.cfl = get_num(j, "cfl", 0.5);
    c.scenario.boundary = boundary_from(j, Boundary::Periodic);
    if (!j.contains("rho0") || !j.contains("u0"))
      throw ConfigError("euler compare needs rho0 and u0 profiles");
    c.rho0 = profile_from(j["rho0"], "rho0");
    c.u0 = profile_from(j["u0"], "u0");
    c.bound_factor = get_num(j, "bound_factor", 2.0);
  }
  c.validate();
  return c;
}

CompareConfig compare_from_json_file(const std::string& path) {
  return compare_from(parse_file(path));
}
CompareConfig compare_from_json_text(const std::string& text) {
  return compare_from(parse_text(text));
}

}  // namespace ktlab

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "ktlab/experiments.hpp"

using namespace ktlab;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("ktlab_test_" + tag);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string write_config(const TempDir& dir, const std::string& name, const std::string& body) {
  const fs::path p = dir.path / name;
  std::ofstream out(p);
  out << body;
  return p.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

const char* kSmallRectangle = R"({
  "grid": {"x_min": 0.0, "x_max": 4.0, "v_max": 2.5, "nx": 48, "nv": 48},
  "initial": {"type": "rectangle", "x_box": [0.0, 1.0], "v_box": [1.0, 2.0], "height": 1.0},
  "variant": "unscaled",
  "t_final": 0.5,
  "cfl": 0.5,
  "output_cadence": 8,
  "boundary": "free"
})";

}  // namespace

TEST_CASE("simulate exits 0 on the rectangle scenario") {
  TempDir dir("sim_ok");
  const std::string cfg = write_config(dir, "cfg.json", kSmallRectangle);
  CHECK(cmd_simulate(cfg, (dir.path / "out").string()) == kExitPass);
  CHECK(fs::exists(dir.path / "out" / "diagnostics.csv"));
  CHECK(fs::exists(dir.path / "out" / "manifest.json"));

  // pinned file formats
  std::ifstream diag(dir.path / "out" / "diagnostics.csv");
  std::string header;
  std::getline(diag, header);
  CHECK(header == "t,mass,momentum,energy,linf,rX_min,rX_max,rV_min,rV_max,diss_Qi,diss_Qr");
  std::ifstream snap(dir.path / "out" / "snapshot_0.csv");
  std::getline(snap, header);
  CHECK(header == "x,v,f");

  // manifest invariants: every listed output exists, every assertion has an
  // outcome
  nlohmann::json manifest;
  std::ifstream(dir.path / "out" / "manifest.json") >> manifest;
  REQUIRE(manifest.contains("outputs"));
  for (const auto& name : manifest["outputs"])
    CHECK(fs::exists(dir.path / "out" / name.get<std::string>()));
  REQUIRE(manifest.contains("assertions"));
  CHECK(!manifest["assertions"].empty());
  for (const auto& a : manifest["assertions"]) {
    CHECK(a.contains("name"));
    CHECK(a.contains("pass"));
  }
  CHECK(manifest["version"].get<std::string>() == kVersion);
}

TEST_CASE("simulate exits 2 when dt violates the CFL bound") {
  TempDir dir("sim_cfl");
  const std::string cfg = write_config(dir, "cfg.json", R"({
    "grid": {"x_min": 0.0, "x_max": 4.0, "v_max": 2.5, "nx": 48, "nv": 48},
    "initial": {"type": "rectangle", "x_box": [0.0, 1.0], "v_box": [1.0, 2.0], "height": 1.0},
    "variant": "unscaled",
    "t_final": 0.5,
    "dt": 0.5
  })");
  CHECK(cmd_simulate(cfg, (dir.path / "out").string()) == kExitConfig);
  const std::string manifest = slurp(dir.path / "out" / "manifest.json");
  CHECK(manifest.find("CFL") != std::string::npos);  // message names the bound
}

TEST_CASE("simulate exits 0 on zero initial data with all-zero diagnostics") {
  TempDir dir("sim_zero");
  const std::string cfg = write_config(dir, "cfg.json", R"({
    "grid": {"x_min": 0.0, "x_max": 4.0, "v_max": 2.5, "nx": 48, "nv": 48},
    "initial": {"type": "rectangle", "x_box": [0.0, 1.0], "v_box": [1.0, 2.0], "height": 0.0},
    "variant": "unscaled",
    "t_final": 0.25
  })");
  CHECK(cmd_simulate(cfg, (dir.path / "out").string()) == kExitPass);
  std::ifstream diag(dir.path / "out" / "diagnostics.csv");
  std::string line;
  std::getline(diag, line);  // header
  while (std::getline(diag, line)) {
    std::stringstream ss(line);
    std::string field;
    std::getline(ss, field, ',');  // t may be nonzero
    while (std::getline(ss, field, ',')) CHECK(std::stod(field) == 0.0);
  }
}

TEST_CASE("simulate exits 3 on numerical blowup and keeps a dump") {
  TempDir dir("sim_nan");
  const std::string cfg = write_config(dir, "cfg.json", R"({
    "grid": {"x_min": 0.0, "x_max": 4.0, "v_max": 2.5, "nx": 16, "nv": 16},
    "initial": {"type": "rectangle", "x_box": [0.0, 1.0], "v_box": [1.0, 2.0], "height": 4000.0},
    "variant": "scaled",
    "eps_scale": 1e-8,
    "t_final": 0.5
  })");
  CHECK(cmd_simulate(cfg, (dir.path / "out").string()) == kExitNumerical);
  CHECK(fs::exists(dir.path / "out" / "failure_dump.csv"));
}

TEST_CASE("sweep exits 2 when fewer than four eps values are given") {
  TempDir dir("sweep_short");
  const std::string cfg = write_config(dir, "cfg.json", R"({
    "grid": {"x_min": 0.0, "x_max": 1.0, "v_max": 2.0, "nx": 32, "nv": 64},
    "eps_list": [0.1],
    "rho0": {"type": "sine", "mean": 1.0, "amp": 0.2, "freq": 1.0},
    "u0": {"type": "sine", "mean": 1.0, "amp": 0.1, "freq": 1.0},
    "t_final": 0.1
  })");
  CHECK(cmd_sweep(cfg, (dir.path / "out").string()) == kExitConfig);
}

TEST_CASE("picard exits 0 on the rectangle scenario and writes the trace") {
  TempDir dir("picard_ok");
  const std::string cfg = write_config(dir, "cfg.json", R"({
    "grid": {"x_min": 0.0, "x_max": 3.0, "v_max": 2.5, "nx": 48, "nv": 50},
    "initial": {"type": "rectangle", "x_box": [0.0, 1.0], "v_box": [1.0, 2.0], "height": 1.0},
    "variant": "regularized",
    "eps_reg": 0.1,
    "t_final": 0.25,
    "n_iters": 6
  })");
  CHECK(cmd_picard(cfg, (dir.path / "out").string()) == kExitPass);
  const std::string trace = slurp(dir.path / "out" / "picard_trace.csv");
  CHECK(trace.rfind("n,d_n", 0) == 0);
}

TEST_CASE("picard exits 0 with an all-zero trace on zero data") {
  TempDir dir("picard_zero");
  const std::string cfg = write_config(dir, "cfg.json", R"({
    "grid": {"x_min": 0.0, "x_max": 3.0, "v_max": 2.5, "nx": 32, "nv": 32},
    "initial": {"type": "rectangle", "x_box": [0.0, 1.0], "v_box": [1.0, 2.0], "height": 0.0},
    "variant": "regularized",
    "eps_reg": 0.1,
    "t_final": 0.25,
    "n_iters": 4
  })");
  CHECK(cmd_picard(cfg, (dir.path / "out").string()) == kExitPass);
}

TEST_CASE("compare is deterministic and exits 1 on an impossible bound") {
  const char* body = R"({
    "mode": "kinetic",
    "grid": {"x_min": 0.0, "x_max": 4.0, "v_max": 2.5, "nx": 32, "nv": 32},
    "initial": {"type": "rectangle", "x_box": [0.0, 1.0], "v_box": [1.0, 2.0], "height": 1.0},
    "variant": "unscaled",
    "t_final": 0.25,
    "n_particles": 4000,
    "w1_bound": 0.5
  })";
  TempDir dir("compare_det");
  const std::string cfg = write_config(dir, "cfg.json", body);
  CHECK(cmd_compare(cfg, (dir.path / "a").string(), 99) == kExitPass);
  CHECK(cmd_compare(cfg, (dir.path / "b").string(), 99) == kExitPass);
  // fixed config + fixed seed: byte-identical CSVs
  for (const char* name :
       {"grid_diagnostics.csv", "particle_diagnostics.csv", "grid_final.csv",
        "particle_final.csv"}) {
    CHECK(slurp(dir.path / "a" / name) == slurp(dir.path / "b" / name));
  }

  // same scenario with an unattainable bound fails the assertion
  std::string strict(body);
  const auto pos = strict.find("\"w1_bound\": 0.5");
  strict.replace(pos, std::string("\"w1_bound\": 0.5").size(), "\"w1_bound\": 1e-15");
  const std::string cfg2 = write_config(dir, "cfg2.json", strict);
  CHECK(cmd_compare(cfg2, (dir.path / "c").string(), 99) == kExitAssertion);
}

TEST_CASE("sweep lands the predicted rates at desk resolution") {
  TempDir dir("sweep_coarse");
  const std::string cfg = write_config(dir, "cfg.json", R"({
    "grid": {"x_min": 0.0, "x_max": 1.0, "v_max": 2.0, "nx": 64, "nv": 128},
    "eps_list": [0.2, 0.1, 0.05, 0.025],
    "rho0": {"type": "sine", "mean": 1.0, "amp": 0.2, "freq": 1.0},
    "u0": {"type": "sine", "mean": 1.0, "amp": 0.1, "freq": 1.0},
    "bump_scale": 0.3,
    "offset_amp": 0.3,
    "t_final": 0.2,
    "samples": 25,
    "boundary": "periodic"
  })");
  CHECK(cmd_sweep(cfg, (dir.path / "out").string()) == kExitPass);

  nlohmann::json slopes;
  std::ifstream(dir.path / "out" / "slopes.json") >> slopes;
  // the monokinetic deviation bound follows the sqrt(eps) rate
  const double mono = slopes["monokinetic"]["slope"].get<double>();
  CHECK(mono > 0.35);
  CHECK(mono < 0.65);

  std::ifstream csv(dir.path / "out" / "convergence.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "eps,w1_sup,re_sup,mono_sup");
}

TEST_CASE("compare euler mode stays within the fv/sticky bound") {
  TempDir dir("compare_euler");
  const std::string cfg = write_config(dir, "cfg.json", R"({
    "mode": "euler",
    "grid": {"x_min": 0.0, "x_max": 1.0, "nx": 128},
    "rho0": {"type": "sine", "mean": 1.0, "amp": 0.2, "freq": 1.0},
    "u0": {"type": "sine", "mean": 1.0, "amp": 0.1, "freq": 1.0},
    "t_final": 0.2,
    "boundary": "periodic",
    "bound_factor": 2.0
  })");
  CHECK(cmd_compare(cfg, (dir.path / "out").string(), 1) == kExitPass);
  CHECK(fs::exists(dir.path / "out" / "fv_trajectory.csv"));
  CHECK(fs::exists(dir.path / "out" / "sticky_particles.csv"));
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "tmc/simulation.hpp"

using namespace tmc;
namespace fs = std::filesystem;

namespace {

Matrix3 random_rotation(std::mt19937& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Eigen::Quaterniond q(d(rng), d(rng), d(rng), d(rng));
  q.normalize();
  return q.toRotationMatrix();
}

nlohmann::json minimal_config() {
  return nlohmann::json::parse(R"({
    "scenario": {"kind": "box_self_contact", "nx": 4, "ny": 3, "nz": 1},
    "materials": {
      "solids": [{"body": 0, "K": 20.0, "mu": 10.0}],
      "third_medium": {"K": 20.0, "mu": 10.0, "gamma": 1e-4, "alpha_r": 10.0}
    },
    "bcs": {"dirichlet": [
      {"node_set": "bottom_fixed", "components": "xyz"},
      {"node_set": "front_back_z", "components": "z"},
      {"node_set": "top_load", "components": "y", "value": [0.0, -0.05, 0.0]}
    ]},
    "schedule": {"n_steps": 2},
    "outputs": {"directory": "out_test", "basename": "t",
                "probes": [{"name": "gap", "point_a": [1.0, 0.4, 0.0], "point_b": [1.0, 0.1, 0.0]}]}
  })");
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("von Mises stress") {
  CHECK(von_mises(3.7 * Matrix3::Identity()) == doctest::Approx(0.0).scale(1));

  Matrix3 uni = Matrix3::Zero();
  uni(0, 0) = 2.5;
  CHECK(von_mises(uni) == doctest::Approx(2.5).epsilon(1e-13));

  Matrix3 shear = Matrix3::Zero();
  shear(0, 1) = shear(1, 0) = 0.8;
  CHECK(von_mises(shear) == doctest::Approx(std::sqrt(3.0) * 0.8).epsilon(1e-13));

  SUBCASE("rotation invariance") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (int t = 0; t < 20; ++t) {
      Matrix3 s;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j <= i; ++j) s(i, j) = s(j, i) = d(rng);
      const Matrix3 Q = random_rotation(rng);
      const double a = von_mises(s);
      const double b = von_mises(Q * s * Q.transpose());
      CHECK(std::abs(a - b) / std::max(a, 1e-12) < 1e-10);
    }
  }

  SUBCASE("asymmetric input rejected") {
    Matrix3 bad = Matrix3::Identity();
    bad(0, 1) = 0.5;
    CHECK_THROWS_AS(von_mises(bad), std::invalid_argument);
  }
}

TEST_CASE("gap probe") {
  const Mesh mesh = build_box_self_contact({});
  const GapProbe probe = make_gap_probe(mesh, Vector3(1.0, 0.4, 0.0), Vector3(1.0, 0.1, 0.0));

  Eigen::VectorXd u = Eigen::VectorXd::Zero(3 * mesh.nodes.size());
  CHECK(gap_measure(mesh, u, probe) == doctest::Approx(0.3).epsilon(1e-13));

  SUBCASE("rigid translation leaves the gap unchanged") {
    for (size_t n = 0; n < mesh.nodes.size(); ++n) u.segment<3>(3 * n) = Vector3(0.3, -1.2, 0.8);
    CHECK(gap_measure(mesh, u, probe) == doctest::Approx(0.3).epsilon(1e-13));
  }

  SUBCASE("invalid probe nodes rejected") {
    GapProbe bad;
    bad.node_a = -1;
    bad.node_b = 2;
    CHECK_THROWS_AS(gap_measure(mesh, u, bad), MeshError);
  }
}

TEST_CASE("cavity volume at rest equals the reference cavity volume") {
  const Mesh mesh = build_pneumatic_box({});
  const AssemblyCache cache = build_assembly_cache(mesh);
  const Eigen::VectorXd u = Eigen::VectorXd::Zero(3 * mesh.nodes.size());
  CHECK(cavity_volume(mesh, cache, u) == doctest::Approx(0.5 * 0.5 * 0.5).epsilon(1e-12));
}

TEST_CASE("vtk export") {
  const Mesh mesh = build_box_self_contact({.L = 2, .H = 0.5, .W = 0.3, .t = 0.1, .g0 = 0.3,
                                            .nx = 3, .ny = 3, .nz = 1,
                                            .load_halfwidth = 0.2, .pad_z = 0.0});
  const AssemblyCache cache = build_assembly_cache(mesh);
  Materials mats;
  mats.solids[0] = SolidParams{20, 10};
  mats.medium = ThirdMediumParams{20, 10, 1e-4, 10, 0.0, RegKind::SkewGradient};

  Eigen::VectorXd u(3 * mesh.nodes.size());
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> d(-1e-3, 1e-3);
  for (int i = 0; i < u.size(); ++i) u[i] = d(rng);

  const FieldOutput fields = compute_fields(mesh, cache, mats, u, 1.0);
  REQUIRE(fields.von_mises_avg.size() == mesh.elements.size());
  for (double v : fields.von_mises_avg) CHECK(v >= 0.0);
  for (double j : fields.j_min) CHECK(j > 0.0);

  TempDir dir("tmc_vtk_test");
  const std::string path = (dir.path / "out.vtk").string();
  export_vtk(mesh, u, fields, path);

  SUBCASE("structure and coordinate round-trip") {
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "# vtk DataFile Version 3.0");
    std::getline(in, line);
    std::getline(in, line);
    CHECK(line == "ASCII");
    std::getline(in, line);
    CHECK(line == "DATASET UNSTRUCTURED_GRID");
    size_t npoints = 0;
    in >> line >> npoints >> line;
    CHECK(npoints == mesh.nodes.size());
    for (size_t n = 0; n < npoints; ++n) {
      Vector3 x;
      in >> x.x() >> x.y() >> x.z();
      CHECK((x - mesh.nodes[n].X).cwiseAbs().maxCoeff() < 1e-12);
    }
    std::string cells_kw;
    size_t ncells = 0, nints = 0;
    in >> cells_kw >> ncells >> nints;
    CHECK(cells_kw == "CELLS");
    CHECK(ncells == mesh.elements.size());
    CHECK(nints == 21 * mesh.elements.size());
    int count = 0;
    in >> count;
    CHECK(count == 20);
  }

  SUBCASE("byte determinism") {
    const std::string path2 = (dir.path / "out2.vtk").string();
    export_vtk(mesh, u, fields, path2);
    CHECK(slurp(path) == slurp(path2));
  }
}

TEST_CASE("config parsing") {
  SUBCASE("valid minimal config") {
    const SimulationConfig cfg = parse_config(minimal_config());
    CHECK(cfg.scenario_kind == "box_self_contact");
    CHECK(cfg.box.nx == 4);
    CHECK(cfg.materials.medium.gamma == 1e-4);
    CHECK(cfg.schedule.n_steps == 2);
    CHECK(cfg.probes.size() == 1);
  }

  SUBCASE("unknown keys rejected") {
    nlohmann::json j = minimal_config();
    j["scenario"]["wibble"] = 1;
    CHECK_THROWS_AS(parse_config(j), ConfigError);
    j = minimal_config();
    j["typo_section"] = {};
    CHECK_THROWS_AS(parse_config(j), ConfigError);
  }

  SUBCASE("invalid values rejected") {
    nlohmann::json j = minimal_config();
    j["materials"]["third_medium"]["gamma"] = 0.0;
    CHECK_THROWS_AS(parse_config(j), ConfigError);
    j = minimal_config();
    j["schedule"]["n_steps"] = 0;
    CHECK_THROWS_AS(parse_config(j), ConfigError);
    j = minimal_config();
    j["bcs"]["dirichlet"][0]["components"] = "q";
    CHECK_THROWS_AS(parse_config(j), ConfigError);
  }

  SUBCASE("overrides") {
    nlohmann::json j = minimal_config();
    apply_override(j, "schedule.n_steps=7");
    apply_override(j, "materials.third_medium.gamma=1e-6");
    apply_override(j, "outputs.basename=abc");
    const SimulationConfig cfg = parse_config(j);
    CHECK(cfg.schedule.n_steps == 7);
    CHECK(cfg.materials.medium.gamma == 1e-6);
    CHECK(cfg.outputs.basename == "abc");
    CHECK_THROWS_AS(apply_override(j, "no_equals_sign"), ConfigError);
  }
}

TEST_CASE("missing node set fails before any output is written") {
  nlohmann::json j = minimal_config();
  j["bcs"]["dirichlet"][0]["node_set"] = "does_not_exist";
  TempDir dir("tmc_cfg_test");
  j["outputs"]["directory"] = (dir.path / "run_out").string();

  const SimulationConfig cfg = parse_config(j);
  CHECK_THROWS_AS(prepare_simulation(cfg), MeshError);
  CHECK(!fs::exists(dir.path / "run_out"));
}

TEST_CASE("probe outside the mesh bounds is a config error") {
  nlohmann::json j = minimal_config();
  j["outputs"]["probes"][0]["point_a"] = {50.0, 0.0, 0.0};
  CHECK_THROWS_AS(prepare_simulation(parse_config(j)), ConfigError);
}

TEST_CASE("simulation writes probe csv with monotone lambda ending at one") {
  nlohmann::json j = minimal_config();
  TempDir dir("tmc_sim_test");
  j["outputs"]["directory"] = (dir.path / "run").string();
  j["outputs"]["vtk_every"] = 1;

  const SimulationSetup setup = prepare_simulation(parse_config(j));
  const RunResult result = run_simulation(setup, true);
  CHECK(result.report.completed);

  const std::string csv = slurp((dir.path / "run" / "t_probe.csv").string());
  std::istringstream lines(csv);
  std::string header;
  std::getline(lines, header);
  CHECK(header == "step,lambda,gap,newton_iters,bisections");
  double last_lambda = -1.0, lambda = 0.0, gap = 0.0;
  int step = 0, iters = 0, bis = 0;
  char comma;
  std::string row;
  while (std::getline(lines, row)) {
    std::istringstream rs(row);
    rs >> step >> comma >> lambda >> comma >> gap >> comma >> iters >> comma >> bis;
    CHECK(lambda >= last_lambda);
    CHECK(gap > 0.0);
    last_lambda = lambda;
  }
  CHECK(last_lambda == 1.0);

  CHECK(fs::exists(dir.path / "run" / "t_report.json"));
  CHECK(fs::exists(dir.path / "run" / "t_0000.vtk"));
  CHECK(fs::exists(dir.path / "run" / "t_0002.vtk"));

  SUBCASE("second run produces byte-identical csv and vtk") {
    nlohmann::json j2 = minimal_config();
    j2["outputs"]["directory"] = (dir.path / "run2").string();
    j2["outputs"]["vtk_every"] = 1;
    const SimulationSetup setup2 = prepare_simulation(parse_config(j2));
    run_simulation(setup2, true);
    CHECK(slurp((dir.path / "run" / "t_probe.csv").string()) ==
          slurp((dir.path / "run2" / "t_probe.csv").string()));
    CHECK(slurp((dir.path / "run" / "t_0002.vtk").string()) ==
          slurp((dir.path / "run2" / "t_0002.vtk").string()));
  }
}

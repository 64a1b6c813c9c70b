#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "tmc/mesh.hpp"
#include "tmc/mesh_io.hpp"
#include "tmc/shape.hpp"

using namespace tmc;

namespace {

double reference_volume(const Mesh& mesh, bool medium_only = false) {
  const QuadratureRule rule = gauss_rule(3);
  double vol = 0.0;
  for (const Hex20Element& el : mesh.elements) {
    if (medium_only && !el.tag.is_medium()) continue;
    const auto X = mesh.element_coords(el.id);
    for (size_t q = 0; q < rule.points.size(); ++q)
      vol += rule.weights[q] * jacobian(X, rule.points[q]).detG;
  }
  return vol;
}

Mesh single_unit_cube() {
  Mesh mesh;
  const auto& ref = q2s_node_coords();
  for (int I = 0; I < 20; ++I)
    mesh.nodes.push_back({I, 0.5 * ref[I] + Vector3(0.5, 0.5, 0.5)});
  Hex20Element el;
  el.id = 0;
  for (int I = 0; I < 20; ++I) el.nodes[I] = I;
  el.tag = DomainTag::solid(0);
  mesh.elements.push_back(el);
  return mesh;
}

bool identical_meshes(const Mesh& a, const Mesh& b) {
  if (a.nodes.size() != b.nodes.size() || a.elements.size() != b.elements.size()) return false;
  for (size_t i = 0; i < a.nodes.size(); ++i)
    if (a.nodes[i].X != b.nodes[i].X) return false;  // bitwise
  for (size_t e = 0; e < a.elements.size(); ++e)
    if (a.elements[e].nodes != b.elements[e].nodes || !(a.elements[e].tag == b.elements[e].tag))
      return false;
  return a.node_sets == b.node_sets;
}

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("axis counts distribute proportionally with a floor of one") {
  const LatticeAxis ax = make_axis({0.0, 0.1, 1.9, 2.0}, 16);
  CHECK(ax.counts == std::vector<int>{1, 14, 1});
  const LatticeAxis minimal = make_axis({0.0, 0.1, 1.9, 2.0}, 1);
  CHECK(minimal.counts == std::vector<int>{1, 1, 1});
}

TEST_CASE("box self-contact mesh") {
  BoxSelfContactParams p;
  const Mesh mesh = build_box_self_contact(p);

  SUBCASE("validates cleanly with positive jacobians") {
    const ValidationReport rep = validate_mesh(mesh);
    CHECK(rep.ok);
    CHECK(rep.conforming);
    CHECK(rep.min_detG > 0.0);
  }

  SUBCASE("total volume matches the bounding box") {
    CHECK(reference_volume(mesh) == doctest::Approx(p.L * p.H * p.W).epsilon(1e-10));
  }

  SUBCASE("medium exactly tiles the cavity") {
    const double cavity = (p.L - 2 * p.t) * (p.H - 2 * p.t) * p.W;
    CHECK(reference_volume(mesh, true) == doctest::Approx(cavity).epsilon(1e-10));
    // Plate gap: the medium spans y in [t, H - t].
    double ymin = 1e30, ymax = -1e30;
    for (const Hex20Element& el : mesh.elements) {
      if (!el.tag.is_medium()) continue;
      for (int id : el.nodes) {
        ymin = std::min(ymin, mesh.nodes[id].X.y());
        ymax = std::max(ymax, mesh.nodes[id].X.y());
      }
    }
    CHECK(ymin == doctest::Approx(p.t));
    CHECK(ymax == doctest::Approx(p.H - p.t));
    CHECK(ymax - ymin == doctest::Approx(p.g0));
  }

  SUBCASE("required node sets exist and are plausible") {
    for (const char* name : {"top_load", "bottom_fixed", "front_back_z"})
      CHECK(!mesh.node_set(name).empty());
    for (int id : mesh.node_set("top_load")) CHECK(mesh.nodes[id].X.y() == doctest::Approx(p.H));
    for (int id : mesh.node_set("bottom_fixed")) CHECK(mesh.nodes[id].X.y() == doctest::Approx(0.0));
  }

  SUBCASE("probe anchor nodes exist at the plate mid-surface points") {
    const int a = nearest_node(mesh, Vector3(1.0, 0.4, 0.0));
    const int b = nearest_node(mesh, Vector3(1.0, 0.1, 0.0));
    CHECK((mesh.nodes[a].X - Vector3(1.0, 0.4, 0.0)).norm() < 1e-12);
    CHECK((mesh.nodes[b].X - Vector3(1.0, 0.1, 0.0)).norm() < 1e-12);
  }

  SUBCASE("minimal subdivision still validates") {
    BoxSelfContactParams pmin = p;
    pmin.nx = pmin.ny = pmin.nz = 1;
    const Mesh m = build_box_self_contact(pmin);
    CHECK(validate_mesh(m).ok);
    CHECK(reference_volume(m) == doctest::Approx(p.L * p.H * p.W).epsilon(1e-10));
  }

  SUBCASE("padding adds medium on the z faces") {
    BoxSelfContactParams ppad = p;
    ppad.pad_z = 0.1;
    ppad.nz = 3;
    const Mesh m = build_box_self_contact(ppad);
    CHECK(validate_mesh(m).ok);
    const double vol = p.L * p.H * (p.W + 2 * ppad.pad_z);
    CHECK(reference_volume(m) == doctest::Approx(vol).epsilon(1e-10));
    const double medium = (p.L - 2 * p.t) * (p.H - 2 * p.t) * p.W + p.L * p.H * 2 * ppad.pad_z;
    CHECK(reference_volume(m, true) == doctest::Approx(medium).epsilon(1e-10));
  }

  SUBCASE("parameter validation") {
    BoxSelfContactParams bad = p;
    bad.t = 0.3;
    bad.g0 = bad.H - 2 * bad.t;
    CHECK_THROWS_AS(build_box_self_contact(bad), MeshError);
    bad = p;
    bad.g0 = 0.25;
    CHECK_THROWS_AS(build_box_self_contact(bad), MeshError);
    bad = p;
    bad.nx = 0;
    CHECK_THROWS_AS(build_box_self_contact(bad), MeshError);
  }
}

TEST_CASE("builders are deterministic") {
  const Mesh a = build_box_self_contact({});
  const Mesh b = build_box_self_contact({});
  CHECK(identical_meshes(a, b));
  const Mesh c = build_pneumatic_box({});
  const Mesh d = build_pneumatic_box({});
  CHECK(identical_meshes(c, d));
}

TEST_CASE("pneumatic box mesh") {
  PneumaticBoxParams p;

  SUBCASE("one-eighth model with symmetry sets") {
    const Mesh m = build_pneumatic_box(p);
    CHECK(validate_mesh(m).ok);
    for (const char* name : {"sym_x", "sym_y", "sym_z"}) CHECK(!m.node_set(name).empty());
    CHECK(reference_volume(m) == doctest::Approx(p.L * p.H * p.W).epsilon(1e-10));
    const double cavity_octant = (p.L - p.t) * (p.H - p.t) * (p.W - p.t);
    CHECK(reference_volume(m, true) == doctest::Approx(cavity_octant).epsilon(1e-10));
  }

  SUBCASE("full model: conforming, analytic cavity volume") {
    PneumaticBoxParams pf = p;
    pf.one_eighth = false;
    const Mesh m = build_pneumatic_box(pf);
    const ValidationReport rep = validate_mesh(m);
    CHECK(rep.ok);
    CHECK(rep.conforming);
    const double cavity = 8.0 * (p.L - p.t) * (p.H - p.t) * (p.W - p.t);
    CHECK(reference_volume(m, true) == doctest::Approx(cavity).epsilon(1e-10));
    CHECK(reference_volume(m) == doctest::Approx(8.0 * p.L * p.H * p.W).epsilon(1e-10));
  }
}

TEST_CASE("validate_mesh details") {
  SUBCASE("unit cube element has det(G) = 1/8 everywhere") {
    const ValidationReport rep = validate_mesh(single_unit_cube());
    CHECK(rep.ok);
    REQUIRE(rep.jacobians.size() == 1);
    CHECK(rep.jacobians[0].min_detG == doctest::Approx(0.125).epsilon(1e-13));
  }

  SUBCASE("duplicated node in connectivity is reported") {
    Mesh m = single_unit_cube();
    m.elements[0].nodes[1] = m.elements[0].nodes[0];
    const ValidationReport rep = validate_mesh(m);
    CHECK(!rep.ok);
    bool found = false;
    for (const auto& f : rep.failures) found = found || f.find("duplicated") != std::string::npos;
    CHECK(found);
  }

  SUBCASE("inverted element is reported with its id") {
    Mesh m = single_unit_cube();
    std::swap(m.elements[0].nodes[0], m.elements[0].nodes[1]);
    const ValidationReport rep = validate_mesh(m);
    CHECK(!rep.ok);
    bool found = false;
    for (const auto& f : rep.failures)
      found = found || (f.find("element 0") != std::string::npos &&
                        f.find("jacobian") != std::string::npos);
    CHECK(found);
  }

  SUBCASE("invalid node set reference is reported") {
    Mesh m = single_unit_cube();
    m.node_sets["broken"] = {99};
    CHECK(!validate_mesh(m).ok);
  }
}

TEST_CASE("mesh file round-trip") {
  BoxSelfContactParams p;
  p.nx = 6;
  p.ny = 3;
  p.nz = 1;
  const Mesh mesh = build_box_self_contact(p);
  const std::string path = temp_path("roundtrip.tmcmesh");
  save_mesh(mesh, path);
  const Mesh loaded = load_mesh(path);
  CHECK(identical_meshes(mesh, loaded));
  std::remove(path.c_str());
}

TEST_CASE("mesh file rejects malformed input") {
  auto write_file = [](const std::string& path, const std::string& body) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    std::fputs(body.c_str(), f);
    std::fclose(f);
  };
  const std::string path = temp_path("bad.tmcmesh");

  SUBCASE("21-node element record") {
    write_file(path,
               "tmcmesh 1\nnodes 0\nelements 1\n"
               "element 0 solid:0 21 0 1 2 3 4 5 6 7 8 9 10 11 12 13 14 15 16 17 18 19 20\nend\n");
    CHECK_THROWS_WITH_AS(static_cast<void>(load_mesh(path)),
                         doctest::Contains("unsupported element type"), MeshError);
  }
  SUBCASE("unknown field") {
    write_file(path, "tmcmesh 1\nnodes 0\nelements 0\nwidgets 3\nend\n");
    CHECK_THROWS_WITH_AS(static_cast<void>(load_mesh(path)), doctest::Contains("unknown field"),
                         MeshError);
  }
  SUBCASE("count mismatch") {
    write_file(path, "tmcmesh 1\nnodes 2\nelements 0\nnode 0 0 0 0\nend\n");
    CHECK_THROWS_AS(static_cast<void>(load_mesh(path)), MeshError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(static_cast<void>(load_mesh(temp_path("does_not_exist.tmcmesh"))), MeshError);
  }
  SUBCASE("non-conforming connectivity fails validation on load") {
    Mesh m = single_unit_cube();
    std::swap(m.elements[0].nodes[0], m.elements[0].nodes[1]);
    save_mesh(m, path);
    CHECK_THROWS_WITH_AS(static_cast<void>(load_mesh(path)), doctest::Contains("validation"),
                         MeshError);
  }
  std::remove(path.c_str());
}

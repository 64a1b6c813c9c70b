#pragma once

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "tmc/types.hpp"

namespace tmc {

struct Node {
  int id = -1;
  Vector3 X = Vector3::Zero();
};

struct DomainTag {
  enum Kind { SolidBody, ThirdMedium } kind = SolidBody;
  int body_id = 0;  // meaningful for SolidBody only

  static DomainTag solid(int body = 0) { return {SolidBody, body}; }
  static DomainTag medium() { return {ThirdMedium, 0}; }
  bool is_medium() const { return kind == ThirdMedium; }
  bool operator==(const DomainTag& o) const { return kind == o.kind && body_id == o.body_id; }
};

struct Hex20Element {
  int id = -1;
  std::array<int, 20> nodes{};
  DomainTag tag;
};

struct SideRef {
  int element = -1;
  int face = -1;  // 0..5, see hex20_face_nodes()
  bool operator==(const SideRef& o) const { return element == o.element && face == o.face; }
};

struct Mesh {
  std::vector<Node> nodes;
  std::vector<Hex20Element> elements;
  std::map<std::string, std::vector<int>> node_sets;
  std::map<std::string, std::vector<SideRef>> side_sets;

  Eigen::Matrix<double, 20, 3> element_coords(int e) const;
  const std::vector<int>& node_set(const std::string& name) const;
};

/// Local node ids of the 8-node quadratic face f (4 corners then 4 mid-edges).
const std::array<std::array<int, 8>, 6>& hex20_face_nodes();

// --- scenario builders ------------------------------------------------------

/// Hollow box of outer size L x H x W (x in [0,L], y in [0,H], z in
/// [-W/2,W/2]) with wall thickness t; the through-cavity is filled with
/// third-medium elements. g0 must equal H - 2t (the plate gap).
///
/// The paper-style crush load needs material to move past the support plane,
/// so the load is a strip of half-width load_halfwidth centered on the top
/// surface and the supports sit under the side walls:
///   "top_load"     top-surface nodes with |x - L/2| <= load_halfwidth
///   "bottom_fixed" bottom-surface nodes under the walls (x <= t or x >= L-t)
///   "front_back_z" all nodes on the outer z faces
///   "left_face", "right_face"  solid nodes on x = 0 / x = L
/// pad_z > 0 adds a third-medium layer of that thickness on the front and
/// back faces (used by the rotation scenario, where free surfaces meet).
struct BoxSelfContactParams {
  double L = 2.0, H = 0.5, W = 0.3, t = 0.1;
  double g0 = 0.3;
  int nx = 16, ny = 5, nz = 1;
  double load_halfwidth = 0.2;
  double pad_z = 0.0;
};
Mesh build_box_self_contact(const BoxSelfContactParams& p);

/// Hollow cube of half-dimensions L, H, W and wall thickness t, cavity filled
/// with third medium. one_eighth builds the symmetric octant [0,L]x[0,H]x[0,W]
/// with node sets "sym_x", "sym_y", "sym_z"; the full model spans [-L,L] etc.
/// Both provide "face_x", "face_y", "face_z" (outer face solid nodes).
struct PneumaticBoxParams {
  double L = 1.0, H = 1.0, W = 1.0, t = 0.5;
  int nx = 2, ny = 2, nz = 2;
  bool one_eighth = true;
};
Mesh build_pneumatic_box(const PneumaticBoxParams& p);

// --- generic lattice --------------------------------------------------------

/// Axis-aligned block lattice: per axis, interval breakpoints plus a target
/// element count distributed over the intervals proportionally to length
/// (at least one per interval). Tags come from a cell-center predicate.
struct LatticeAxis {
  std::vector<double> breaks;
  std::vector<int> counts;
};
LatticeAxis make_axis(std::vector<double> breaks, int target_count);

using TagFn = std::function<DomainTag(const Vector3& cell_center)>;
Mesh build_lattice(const LatticeAxis& ax, const LatticeAxis& ay, const LatticeAxis& az,
                   const TagFn& tag_fn);

/// Sorted ids of nodes selected by a coordinate predicate.
std::vector<int> select_nodes(const Mesh& mesh,
                              const std::function<bool(const Vector3&)>& pred);
/// Same, restricted to nodes used by solid elements.
std::vector<int> select_solid_nodes(const Mesh& mesh,
                                    const std::function<bool(const Vector3&)>& pred);
/// Boundary faces (appearing in exactly one element) whose centroid passes.
std::vector<SideRef> select_boundary_faces(const Mesh& mesh,
                                           const std::function<bool(const Vector3&)>& pred);

// --- validation -------------------------------------------------------------

struct ElementJacobianCheck {
  int element_id = -1;
  double min_detG = 0.0;
};

struct ValidationReport {
  bool ok = true;
  bool conforming = true;
  double min_detG = 0.0;
  std::vector<ElementJacobianCheck> jacobians;
  std::vector<std::string> failures;
};

ValidationReport validate_mesh(const Mesh& mesh);

/// Nearest node to a reference-configuration point.
int nearest_node(const Mesh& mesh, const Vector3& point);

}  // namespace tmc

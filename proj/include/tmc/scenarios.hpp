#pragma once

#include "tmc/mesh.hpp"

namespace tmc {

/// Conforming multi-block mesher for mapped geometries. Each block is a
/// smooth map from the unit cube; blocks sharing a surface must sample it
/// with matching subdivision counts and parameterizations (nodes are merged
/// by coordinate).
class BlockMesher {
 public:
  using MapFn = std::function<Vector3(double u, double v, double w)>;

  void add_block(const MapFn& map, int nu, int nv, int nw, DomainTag tag);
  Mesh finish();

 private:
  int node_id(const Vector3& x);

  std::map<std::array<long long, 3>, int> ids_;
  Mesh mesh_;
};

/// Quarter model of a hemispherical punch over a block, the gap filled by a
/// third medium. y is the vertical axis; x = 0 and z = 0 are the symmetry
/// planes. The medium and punch footprint is clipped slightly inside the
/// sphere equator to keep element Jacobians away from the vertical tangent.
/// Node sets: "sym_x", "sym_z", "block_bottom", "punch_top".
struct PunchParams {
  double block_L = 2.0;      // block extent along x and z (quarter model)
  double block_H = 1.0;      // block height
  double radius = 1.0;       // punch radius
  double gap = 0.5;          // initial clearance between pole and block top
  double footprint_clip = 0.96;  // footprint radius as a fraction of the punch radius
  double core_frac = 0.4;    // O-grid core half-size as a fraction of the footprint
  int n_tangential = 2;
  int n_radial = 2;
  int n_outer = 2;
  int n_block_layers = 2;
  int n_medium_layers = 3;
  int n_punch_layers = 3;
};
Mesh build_punch(const PunchParams& p);

/// Straight pneumatic bending actuator: a slab with a row of internal
/// chambers near the top and a thicker passive bottom layer; the chambers
/// are filled with third medium and pressurized through pbar. Node sets:
/// "clamp" (x = 0 face), "tip" (x = L solid nodes).
struct ActuatorParams {
  int n_chambers = 3;
  double chamber_len = 0.4;
  double wall = 0.15;   // end and inter-chamber walls
  double height = 1.0;  // slab height
  double base = 0.3;    // passive bottom layer
  double cap = 0.15;    // top cap above the chambers
  double width = 0.7;   // slab width in z
  double side = 0.15;   // side walls in z
  int nx_chamber = 2, ny_chamber = 2, nz_chamber = 2;
};
Mesh build_actuator(const ActuatorParams& p);

}  // namespace tmc

#include "tmc/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "tmc/shape.hpp"

namespace tmc {

Eigen::Matrix<double, 20, 3> Mesh::element_coords(int e) const {
  Eigen::Matrix<double, 20, 3> X;
  const Hex20Element& el = elements.at(e);
  for (int I = 0; I < 20; ++I) X.row(I) = nodes.at(el.nodes[I]).X.transpose();
  return X;
}

const std::vector<int>& Mesh::node_set(const std::string& name) const {
  const auto it = node_sets.find(name);
  if (it == node_sets.end()) throw MeshError("unknown node set '" + name + "'");
  return it->second;
}

const std::array<std::array<int, 8>, 6>& hex20_face_nodes() {
  static const std::array<std::array<int, 8>, 6> faces = {{
      {0, 4, 7, 3, 16, 15, 19, 11},  // x-
      {1, 2, 6, 5, 9, 18, 13, 17},   // x+
      {0, 1, 5, 4, 8, 17, 12, 16},   // y-
      {3, 7, 6, 2, 19, 14, 18, 10},  // y+
      {0, 3, 2, 1, 11, 10, 9, 8},    // z-
      {4, 5, 6, 7, 12, 13, 14, 15},  // z+
  }};
  return faces;
}

LatticeAxis make_axis(std::vector<double> breaks, int target_count) {
  if (breaks.size() < 2) throw MeshError("axis needs at least two breakpoints");
  if (target_count < 1) throw MeshError("axis element count must be >= 1");
  LatticeAxis ax;
  ax.breaks = std::move(breaks);
  const double total = ax.breaks.back() - ax.breaks.front();
  for (size_t s = 0; s + 1 < ax.breaks.size(); ++s) {
    const double len = ax.breaks[s + 1] - ax.breaks[s];
    if (!(len > 0.0)) throw MeshError("axis breakpoints must be strictly increasing");
    ax.counts.push_back(std::max(1, static_cast<int>(std::lround(target_count * len / total))));
  }
  return ax;
}

namespace {

// Node tick coordinates along one axis: corner positions at even indices,
// cell midpoints at odd ones.
std::vector<double> axis_ticks(const LatticeAxis& ax) {
  std::vector<double> t;
  t.push_back(ax.breaks.front());
  for (size_t s = 0; s + 1 < ax.breaks.size(); ++s) {
    const double a = ax.breaks[s], b = ax.breaks[s + 1];
    const int n = ax.counts[s];
    for (int c = 0; c < n; ++c) {
      const double lo = a + (b - a) * c / n;
      const double hi = a + (b - a) * (c + 1) / n;
      t.push_back(0.5 * (lo + hi));
      t.push_back(hi);
    }
  }
  return t;
}

}  // namespace

Mesh build_lattice(const LatticeAxis& ax, const LatticeAxis& ay, const LatticeAxis& az,
                   const TagFn& tag_fn) {
  const std::vector<double> tx = axis_ticks(ax), ty = axis_ticks(ay), tz = axis_ticks(az);
  const int mx = static_cast<int>(tx.size()), my = static_cast<int>(ty.size()),
            mz = static_cast<int>(tz.size());

  // Global ids for tick points with at most one odd index (corner and
  // mid-edge positions of the hex20 lattice).
  std::vector<int> grid_id(static_cast<size_t>(mx) * my * mz, -1);
  auto grid_index = [&](int a, int b, int c) { return (static_cast<size_t>(c) * my + b) * mx + a; };

  Mesh mesh;
  for (int c = 0; c < mz; ++c)
    for (int b = 0; b < my; ++b)
      for (int a = 0; a < mx; ++a) {
        const int odd = (a % 2) + (b % 2) + (c % 2);
        if (odd > 1) continue;
        const int id = static_cast<int>(mesh.nodes.size());
        grid_id[grid_index(a, b, c)] = id;
        mesh.nodes.push_back({id, Vector3(tx[a], ty[b], tz[c])});
      }

  // Local tick offsets of the 20 nodes, matching q2s_node_coords().
  static const int off[20][3] = {
      {0, 0, 0}, {2, 0, 0}, {2, 2, 0}, {0, 2, 0}, {0, 0, 2}, {2, 0, 2}, {2, 2, 2}, {0, 2, 2},
      {1, 0, 0}, {2, 1, 0}, {1, 2, 0}, {0, 1, 0}, {1, 0, 2}, {2, 1, 2}, {1, 2, 2}, {0, 1, 2},
      {0, 0, 1}, {2, 0, 1}, {2, 2, 1}, {0, 2, 1}};

  const int ncx = (mx - 1) / 2, ncy = (my - 1) / 2, ncz = (mz - 1) / 2;
  for (int ck = 0; ck < ncz; ++ck)
    for (int cj = 0; cj < ncy; ++cj)
      for (int ci = 0; ci < ncx; ++ci) {
        Hex20Element el;
        el.id = static_cast<int>(mesh.elements.size());
        for (int I = 0; I < 20; ++I) {
          const int a = 2 * ci + off[I][0], b = 2 * cj + off[I][1], c = 2 * ck + off[I][2];
          el.nodes[I] = grid_id[grid_index(a, b, c)];
        }
        el.tag = tag_fn(Vector3(tx[2 * ci + 1], ty[2 * cj + 1], tz[2 * ck + 1]));
        mesh.elements.push_back(el);
      }
  return mesh;
}

std::vector<int> select_nodes(const Mesh& mesh,
                              const std::function<bool(const Vector3&)>& pred) {
  std::vector<int> ids;
  for (const Node& n : mesh.nodes)
    if (pred(n.X)) ids.push_back(n.id);
  return ids;
}

std::vector<int> select_solid_nodes(const Mesh& mesh,
                                    const std::function<bool(const Vector3&)>& pred) {
  std::vector<char> in_solid(mesh.nodes.size(), 0);
  for (const Hex20Element& el : mesh.elements)
    if (!el.tag.is_medium())
      for (int id : el.nodes) in_solid[id] = 1;
  std::vector<int> ids;
  for (const Node& n : mesh.nodes)
    if (in_solid[n.id] && pred(n.X)) ids.push_back(n.id);
  return ids;
}

std::vector<SideRef> select_boundary_faces(const Mesh& mesh,
                                           const std::function<bool(const Vector3&)>& pred) {
  std::map<std::array<int, 4>, std::vector<SideRef>> by_corners;
  const auto& faces = hex20_face_nodes();
  for (const Hex20Element& el : mesh.elements)
    for (int f = 0; f < 6; ++f) {
      std::array<int, 4> key{el.nodes[faces[f][0]], el.nodes[faces[f][1]], el.nodes[faces[f][2]],
                             el.nodes[faces[f][3]]};
      std::sort(key.begin(), key.end());
      by_corners[key].push_back({el.id, f});
    }
  std::vector<SideRef> out;
  for (const auto& [key, refs] : by_corners) {
    if (refs.size() != 1) continue;
    const SideRef& sr = refs.front();
    Vector3 centroid = Vector3::Zero();
    for (int loc = 0; loc < 8; ++loc)
      centroid += mesh.nodes[mesh.elements[sr.element].nodes[faces[sr.face][loc]]].X;
    centroid /= 8.0;
    if (pred(centroid)) out.push_back(sr);
  }
  std::sort(out.begin(), out.end(), [](const SideRef& a, const SideRef& b) {
    return a.element != b.element ? a.element < b.element : a.face < b.face;
  });
  return out;
}

Mesh build_box_self_contact(const BoxSelfContactParams& p) {
  if (!(p.L > 0 && p.H > 0 && p.W > 0 && p.t > 0)) throw MeshError("box dimensions must be positive");
  if (!(p.t < p.H / 2)) throw MeshError("wall thickness t must be below H/2");
  if (std::abs(p.g0 - (p.H - 2 * p.t)) > 1e-12)
    throw MeshError("inconsistent gap: g0 must equal H - 2t");
  if (p.nx < 1 || p.ny < 1 || p.nz < 1) throw MeshError("subdivision counts must be >= 1");

  const LatticeAxis ax = make_axis({0.0, p.t, p.L - p.t, p.L}, p.nx);
  const LatticeAxis ay = make_axis({0.0, p.t, p.H - p.t, p.H}, p.ny);
  std::vector<double> zb;
  if (p.pad_z > 0.0)
    zb = {-p.W / 2 - p.pad_z, -p.W / 2, p.W / 2, p.W / 2 + p.pad_z};
  else
    zb = {-p.W / 2, p.W / 2};
  const LatticeAxis az = make_axis(zb, p.nz);

  Mesh mesh = build_lattice(ax, ay, az, [&](const Vector3& c) {
    const bool in_cavity = c.x() > p.t && c.x() < p.L - p.t && c.y() > p.t && c.y() < p.H - p.t;
    const bool in_pad = std::abs(c.z()) > p.W / 2;
    return (in_cavity || in_pad) ? DomainTag::medium() : DomainTag::solid(0);
  });

  const double tol = 1e-9 * std::max({p.L, p.H, p.W});
  mesh.node_sets["top_load"] = select_nodes(mesh, [&](const Vector3& X) {
    return std::abs(X.y() - p.H) < tol && std::abs(X.x() - p.L / 2) <= p.load_halfwidth + tol &&
           std::abs(X.z()) <= p.W / 2 + tol;
  });
  mesh.node_sets["bottom_fixed"] = select_nodes(mesh, [&](const Vector3& X) {
    return std::abs(X.y()) < tol && (X.x() <= p.t + tol || X.x() >= p.L - p.t - tol) &&
           std::abs(X.z()) <= p.W / 2 + tol;
  });
  const double zout = p.W / 2 + p.pad_z;
  mesh.node_sets["front_back_z"] =
      select_nodes(mesh, [&](const Vector3& X) { return std::abs(std::abs(X.z()) - zout) < tol; });
  mesh.node_sets["left_face"] =
      select_solid_nodes(mesh, [&](const Vector3& X) { return std::abs(X.x()) < tol; });
  mesh.node_sets["right_face"] =
      select_solid_nodes(mesh, [&](const Vector3& X) { return std::abs(X.x() - p.L) < tol; });
  return mesh;
}

Mesh build_pneumatic_box(const PneumaticBoxParams& p) {
  if (!(p.L > 0 && p.H > 0 && p.W > 0 && p.t > 0)) throw MeshError("box dimensions must be positive");
  if (!(p.t < std::min({p.L, p.H, p.W}))) throw MeshError("wall thickness exceeds box half-size");
  if (p.nx < 1 || p.ny < 1 || p.nz < 1) throw MeshError("subdivision counts must be >= 1");

  auto axis = [&](double half, int n) {
    if (p.one_eighth) return make_axis({0.0, half - p.t, half}, n);
    return make_axis({-half, -(half - p.t), half - p.t, half}, 2 * n);
  };
  const LatticeAxis ax = axis(p.L, p.nx), ay = axis(p.H, p.ny), az = axis(p.W, p.nz);

  Mesh mesh = build_lattice(ax, ay, az, [&](const Vector3& c) {
    const bool in_cavity = std::abs(c.x()) < p.L - p.t && std::abs(c.y()) < p.H - p.t &&
                           std::abs(c.z()) < p.W - p.t;
    return in_cavity ? DomainTag::medium() : DomainTag::solid(0);
  });

  const double tol = 1e-9 * std::max({p.L, p.H, p.W});
  if (p.one_eighth) {
    mesh.node_sets["sym_x"] =
        select_nodes(mesh, [&](const Vector3& X) { return std::abs(X.x()) < tol; });
    mesh.node_sets["sym_y"] =
        select_nodes(mesh, [&](const Vector3& X) { return std::abs(X.y()) < tol; });
    mesh.node_sets["sym_z"] =
        select_nodes(mesh, [&](const Vector3& X) { return std::abs(X.z()) < tol; });
  }
  mesh.node_sets["face_x"] =
      select_solid_nodes(mesh, [&](const Vector3& X) { return std::abs(X.x() - p.L) < tol; });
  mesh.node_sets["face_y"] =
      select_solid_nodes(mesh, [&](const Vector3& X) { return std::abs(X.y() - p.H) < tol; });
  mesh.node_sets["face_z"] =
      select_solid_nodes(mesh, [&](const Vector3& X) { return std::abs(X.z() - p.W) < tol; });
  return mesh;
}

ValidationReport validate_mesh(const Mesh& mesh) {
  ValidationReport rep;
  rep.min_detG = std::numeric_limits<double>::infinity();

  const int n_nodes = static_cast<int>(mesh.nodes.size());
  for (int i = 0; i < n_nodes; ++i) {
    if (mesh.nodes[i].id != i) {
      rep.failures.push_back("node ids not dense at position " + std::to_string(i));
      break;
    }
    if (!mesh.nodes[i].X.allFinite())
      rep.failures.push_back("non-finite coordinates at node " + std::to_string(i));
  }

  const QuadratureRule rule = gauss_rule(3);
  for (const Hex20Element& el : mesh.elements) {
    bool ids_ok = true;
    std::set<int> unique_ids;
    for (int id : el.nodes) {
      if (id < 0 || id >= n_nodes) {
        rep.failures.push_back("element " + std::to_string(el.id) + " references invalid node " +
                               std::to_string(id));
        ids_ok = false;
        break;
      }
      unique_ids.insert(id);
    }
    if (!ids_ok) continue;
    if (unique_ids.size() != 20)
      rep.failures.push_back("element " + std::to_string(el.id) + " has duplicated nodes");

    // Reported minimum is over the quadrature points; the nodal points and
    // center are sampled too because corner permutations invert the map there
    // first.
    const auto X = mesh.element_coords(el.id);
    double mn = std::numeric_limits<double>::infinity();
    bool inverted = false;
    try {
      for (const Vector3& xi : rule.points) mn = std::min(mn, jacobian(X, xi, el.id).detG);
      for (const Vector3& xi : q2s_node_coords()) jacobian(X, xi, el.id);
      jacobian(X, Vector3::Zero(), el.id);
    } catch (const InvertedElement& e) {
      inverted = true;
      mn = std::min(mn, e.detG);
      rep.failures.push_back("element " + std::to_string(el.id) +
                             " has non-positive jacobian, det(G) = " + std::to_string(e.detG));
    }
    if (!inverted) rep.jacobians.push_back({el.id, mn});
    rep.min_detG = std::min(rep.min_detG, mn);
  }

  // Conformity: interior faces must be shared by exactly two elements and
  // agree on all eight face nodes.
  std::map<std::array<int, 4>, std::vector<std::pair<SideRef, std::array<int, 8>>>> face_map;
  const auto& faces = hex20_face_nodes();
  for (const Hex20Element& el : mesh.elements) {
    bool valid = true;
    for (int id : el.nodes) valid = valid && id >= 0 && id < n_nodes;
    if (!valid) continue;
    for (int f = 0; f < 6; ++f) {
      std::array<int, 8> fn;
      for (int loc = 0; loc < 8; ++loc) fn[loc] = el.nodes[faces[f][loc]];
      std::array<int, 4> key{fn[0], fn[1], fn[2], fn[3]};
      std::sort(key.begin(), key.end());
      face_map[key].push_back({{el.id, f}, fn});
    }
  }
  for (const auto& [key, refs] : face_map) {
    if (refs.size() == 1) continue;
    if (refs.size() > 2) {
      rep.conforming = false;
      rep.failures.push_back("face shared by more than two elements near element " +
                             std::to_string(refs[0].first.element));
      continue;
    }
    std::array<int, 8> a = refs[0].second, b = refs[1].second;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) {
      rep.conforming = false;
      rep.failures.push_back("elements " + std::to_string(refs[0].first.element) + " and " +
                             std::to_string(refs[1].first.element) +
                             " share corners but not mid-edge nodes");
    }
  }

  for (const auto& [name, ids] : mesh.node_sets)
    for (int id : ids)
      if (id < 0 || id >= n_nodes)
        rep.failures.push_back("node set '" + name + "' references invalid node");
  for (const auto& [name, refs] : mesh.side_sets)
    for (const SideRef& sr : refs)
      if (sr.element < 0 || sr.element >= static_cast<int>(mesh.elements.size()) || sr.face < 0 ||
          sr.face > 5)
        rep.failures.push_back("side set '" + name + "' references invalid side");

  rep.ok = rep.failures.empty() && rep.conforming && rep.min_detG > 0.0;
  return rep;
}

int nearest_node(const Mesh& mesh, const Vector3& point) {
  if (mesh.nodes.empty()) throw MeshError("nearest_node on empty mesh");
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (const Node& n : mesh.nodes) {
    const double d = (n.X - point).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = n.id;
    }
  }
  return best;
}

}  // namespace tmc

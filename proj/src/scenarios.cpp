#include "tmc/scenarios.hpp"

#include <cmath>

namespace tmc {

int BlockMesher::node_id(const Vector3& x) {
  std::array<long long, 3> key;
  for (int c = 0; c < 3; ++c) key[c] = std::llround(x[c] * 1e9);
  const auto it = ids_.find(key);
  if (it != ids_.end()) return it->second;
  const int id = static_cast<int>(mesh_.nodes.size());
  ids_.emplace(key, id);
  mesh_.nodes.push_back({id, x});
  return id;
}

void BlockMesher::add_block(const MapFn& map, int nu, int nv, int nw, DomainTag tag) {
  if (nu < 1 || nv < 1 || nw < 1) throw MeshError("block subdivision counts must be >= 1");

  // Tick grid with mid positions; nodes exist where at most one index is odd.
  const int mu = 2 * nu + 1, mv = 2 * nv + 1, mw = 2 * nw + 1;
  std::vector<int> ids(static_cast<size_t>(mu) * mv * mw, -1);
  auto at = [&](int a, int b, int c) -> int& {
    return ids[(static_cast<size_t>(c) * mv + b) * mu + a];
  };
  for (int c = 0; c < mw; ++c)
    for (int b = 0; b < mv; ++b)
      for (int a = 0; a < mu; ++a) {
        if (a % 2 + b % 2 + c % 2 > 1) continue;
        at(a, b, c) = node_id(map(a / (2.0 * nu), b / (2.0 * nv), c / (2.0 * nw)));
      }

  static const int off[20][3] = {
      {0, 0, 0}, {2, 0, 0}, {2, 2, 0}, {0, 2, 0}, {0, 0, 2}, {2, 0, 2}, {2, 2, 2}, {0, 2, 2},
      {1, 0, 0}, {2, 1, 0}, {1, 2, 0}, {0, 1, 0}, {1, 0, 2}, {2, 1, 2}, {1, 2, 2}, {0, 1, 2},
      {0, 0, 1}, {2, 0, 1}, {2, 2, 1}, {0, 2, 1}};

  for (int ck = 0; ck < nw; ++ck)
    for (int cj = 0; cj < nv; ++cj)
      for (int ci = 0; ci < nu; ++ci) {
        Hex20Element el;
        el.id = static_cast<int>(mesh_.elements.size());
        for (int I = 0; I < 20; ++I)
          el.nodes[I] = at(2 * ci + off[I][0], 2 * cj + off[I][1], 2 * ck + off[I][2]);
        el.tag = tag;
        mesh_.elements.push_back(el);
      }
}

Mesh BlockMesher::finish() { return std::move(mesh_); }

namespace {

// 2D transfinite patch between an inner and an outer curve; the s-lines are
// straight. Returns footprint coordinates (x, z).
struct Patch {
  std::function<Eigen::Vector2d(double)> inner, outer;
  Eigen::Vector2d operator()(double s, double t) const {
    return (1.0 - s) * inner(t) + s * outer(t);
  }
};

}  // namespace

Mesh build_punch(const PunchParams& p) {
  if (!(p.radius > 0 && p.gap > 0 && p.block_H > 0 && p.block_L > 0))
    throw MeshError("punch dimensions must be positive");
  if (!(p.footprint_clip > 0.3 && p.footprint_clip < 1.0))
    throw MeshError("footprint_clip must be in (0.3, 1)");
  const double rc = p.footprint_clip * p.radius;  // footprint radius
  if (!(p.block_L > rc)) throw MeshError("block must be wider than the punch footprint");
  const double b = p.core_frac * rc;  // O-grid core half-size
  const double cy = p.block_H + p.gap + p.radius;  // sphere center height
  const double quarter = M_PI / 4.0;

  // Footprint patches (x, z), all with positive orientation handled by the
  // vertical map below.
  const Patch core{[b](double t) { return Eigen::Vector2d(0.0, b * t); },
                   [b](double t) { return Eigen::Vector2d(b, b * t); }};
  const Patch ringx{[b](double t) { return Eigen::Vector2d(b, b * t); },
                    [rc, quarter](double t) {
                      return Eigen::Vector2d(rc * std::cos(t * quarter), rc * std::sin(t * quarter));
                    }};
  const Patch ringz{[b](double t) { return Eigen::Vector2d(b * (1.0 - t), b); },
                    [rc, quarter](double t) {
                      const double th = (1.0 + t) * quarter;
                      return Eigen::Vector2d(rc * std::cos(th), rc * std::sin(th));
                    }};
  const Patch outerx{[rc, quarter](double t) {
                       return Eigen::Vector2d(rc * std::cos(t * quarter), rc * std::sin(t * quarter));
                     },
                     [&p](double t) { return Eigen::Vector2d(p.block_L, p.block_L * t); }};
  const Patch outerz{[rc, quarter](double t) {
                       const double th = (1.0 + t) * quarter;
                       return Eigen::Vector2d(rc * std::cos(th), rc * std::sin(th));
                     },
                     [&p](double t) { return Eigen::Vector2d(p.block_L * (1.0 - t), p.block_L); }};

  const double R2 = p.radius * p.radius;
  auto sphere_low = [&](const Eigen::Vector2d& xz) {
    return cy - std::sqrt(R2 - xz.squaredNorm());
  };

  BlockMesher bm;
  using SurfaceFn = std::function<double(const Eigen::Vector2d&)>;
  auto flat = [](double y) {
    return SurfaceFn([y](const Eigen::Vector2d&) { return y; });
  };
  // u runs tangentially and v radially; this pairing keeps det(G) positive
  // with y as the vertical axis.
  auto add_zone = [&](const Patch& patch, int n_rad, int n_tan, const SurfaceFn& y_bot,
                      const SurfaceFn& y_top, int nw, DomainTag tag) {
    bm.add_block(
        [&patch, &y_bot, &y_top](double u, double v, double w) {
          const Eigen::Vector2d xz = patch(v, u);
          const double y = (1.0 - w) * y_bot(xz) + w * y_top(xz);
          return Vector3(xz[0], y, xz[1]);
        },
        n_tan, n_rad, nw, tag);
  };

  // Block: all five footprint patches from y = 0 to block_H.
  for (const Patch* patch : {&core, &ringx, &ringz})
    add_zone(*patch, patch == &core ? p.n_tangential : p.n_radial, p.n_tangential, flat(0.0),
             flat(p.block_H), p.n_block_layers, DomainTag::solid(0));
  for (const Patch* patch : {&outerx, &outerz})
    add_zone(*patch, p.n_outer, p.n_tangential, flat(0.0), flat(p.block_H), p.n_block_layers,
             DomainTag::solid(0));

  // Medium: disk footprint from block top to the lower sphere surface.
  for (const Patch* patch : {&core, &ringx, &ringz})
    add_zone(*patch, patch == &core ? p.n_tangential : p.n_radial, p.n_tangential,
             flat(p.block_H), sphere_low, p.n_medium_layers, DomainTag::medium());

  // Punch: disk footprint from the sphere surface up to the flat equator.
  for (const Patch* patch : {&core, &ringx, &ringz})
    add_zone(*patch, patch == &core ? p.n_tangential : p.n_radial, p.n_tangential, sphere_low,
             flat(cy), p.n_punch_layers, DomainTag::solid(1));

  Mesh mesh = bm.finish();
  const double tol = 1e-9 * (p.block_L + cy);
  mesh.node_sets["sym_x"] =
      select_nodes(mesh, [tol](const Vector3& X) { return std::abs(X.x()) < tol; });
  mesh.node_sets["sym_z"] =
      select_nodes(mesh, [tol](const Vector3& X) { return std::abs(X.z()) < tol; });
  mesh.node_sets["block_bottom"] =
      select_nodes(mesh, [tol](const Vector3& X) { return std::abs(X.y()) < tol; });
  mesh.node_sets["punch_top"] =
      select_nodes(mesh, [&](const Vector3& X) { return std::abs(X.y() - cy) < tol; });
  return mesh;
}

Mesh build_actuator(const ActuatorParams& p) {
  if (p.n_chambers < 1) throw MeshError("actuator needs at least one chamber");
  if (!(p.base + p.cap < p.height) || !(2 * p.side < p.width))
    throw MeshError("actuator walls exceed the slab size");

  LatticeAxis ax;
  ax.breaks.push_back(0.0);
  for (int i = 0; i < p.n_chambers; ++i) {
    ax.breaks.push_back(ax.breaks.back() + p.wall);
    ax.counts.push_back(1);
    ax.breaks.push_back(ax.breaks.back() + p.chamber_len);
    ax.counts.push_back(p.nx_chamber);
  }
  ax.breaks.push_back(ax.breaks.back() + p.wall);
  ax.counts.push_back(1);

  LatticeAxis ay{{0.0, p.base, p.height - p.cap, p.height}, {1, p.ny_chamber, 1}};
  LatticeAxis az{{0.0, p.side, p.width - p.side, p.width}, {1, p.nz_chamber, 1}};

  const double period = p.chamber_len + p.wall;
  Mesh mesh = build_lattice(ax, ay, az, [&](const Vector3& c) {
    const bool in_y = c.y() > p.base && c.y() < p.height - p.cap;
    const bool in_z = c.z() > p.side && c.z() < p.width - p.side;
    if (in_y && in_z) {
      const double local = std::fmod(c.x(), period);
      if (local > p.wall) return DomainTag::medium();
    }
    return DomainTag::solid(0);
  });

  const double total_len = ax.breaks.back();
  const double tol = 1e-9 * std::max(total_len, p.height);
  mesh.node_sets["clamp"] =
      select_nodes(mesh, [tol](const Vector3& X) { return std::abs(X.x()) < tol; });
  mesh.node_sets["tip"] = select_solid_nodes(
      mesh, [&](const Vector3& X) { return std::abs(X.x() - total_len) < tol; });
  return mesh;
}

}  // namespace tmc

#include "tmc/assembly.hpp"

#include <Eigen/Geometry>

#include <cmath>

namespace tmc {

BOperators build_b_operators(const Eigen::Matrix<double, 20, 3>& dN_dX,
                             const std::array<Matrix3, 20>& d2N_dX2) {
  BOperators b;
  b.B1.setZero();
  b.B2.setZero();
  for (int I = 0; I < 20; ++I)
    for (int c = 0; c < 3; ++c) {
      const int dof = 3 * I + c;
      for (int j = 0; j < 3; ++j) {
        b.B1(flat9(c, j), dof) = dN_dX(I, j);
        for (int k = 0; k < 3; ++k) b.B2(flat27(c, j, k), dof) = d2N_dX2[I](j, k);
      }
    }
  return b;
}

const SolidParams& Materials::solid_for(int body_id) const {
  const auto it = solids.find(body_id);
  if (it == solids.end())
    throw ConfigError("no solid material for body id " + std::to_string(body_id));
  return it->second;
}

AssemblyCache build_assembly_cache(const Mesh& mesh, int quad_points_per_axis) {
  AssemblyCache cache;
  cache.rule = gauss_rule(quad_points_per_axis);
  std::vector<ShapeEval> shapes;
  shapes.reserve(cache.rule.points.size());
  for (const Vector3& xi : cache.rule.points) shapes.push_back(q2s_eval(xi));

  cache.elements.resize(mesh.elements.size());
  for (const Hex20Element& el : mesh.elements) {
    const auto X = mesh.element_coords(el.id);
    auto& qps = cache.elements[el.id];
    qps.resize(shapes.size());
    for (size_t q = 0; q < shapes.size(); ++q) {
      const JacobianData jd = jacobian(X, shapes[q], el.id);
      physical_derivatives(X, shapes[q], qps[q].dN_dX, qps[q].d2N_dX2, el.id);
      qps[q].wdetG = cache.rule.weights[q] * jd.detG;
      qps[q].Gm = qps[q].dN_dX.transpose();
      for (int I = 0; I < 20; ++I)
        for (int k = 0; k < 3; ++k)
          for (int j = 0; j < 3; ++j) qps[q].D(j + 3 * k, I) = qps[q].d2N_dX2[I](j, k);
    }
  }
  return cache;
}

Vector60 gather_element(const Mesh& mesh, int element, const Eigen::VectorXd& u_full) {
  Vector60 u;
  const Hex20Element& el = mesh.elements[element];
  for (int I = 0; I < 20; ++I) u.segment<3>(3 * I) = u_full.segment<3>(3 * el.nodes[I]);
  return u;
}

namespace {

ThirdMediumParams scaled_medium(const Materials& materials, double load_factor) {
  ThirdMediumParams p = materials.medium;
  p.pbar *= load_factor;
  return p;
}

}  // namespace

ElementContribution element_contribution(const Mesh& mesh, const AssemblyCache& cache, int element,
                                         const Vector60& u_element, const Materials& materials,
                                         double load_factor) {
  const Hex20Element& el = mesh.elements[element];
  const bool medium = el.tag.is_medium();
  const ThirdMediumParams med = scaled_medium(materials, load_factor);
  const SolidParams* solid = medium ? nullptr : &materials.solid_for(el.tag.body_id);

  ElementContribution out;
  const auto U = Eigen::Map<const Eigen::Matrix<double, 3, 20>>(u_element.data());
  auto Rm = Eigen::Map<Eigen::Matrix<double, 3, 20>>(out.residual.data());

  // All products work on per-component blocks: tangent block (c, c') of the
  // node-major 60x60 matrix is a strided 20x20 view.
  using BlockMap = Eigen::Map<Eigen::Matrix<double, 20, 20>, 0, Eigen::Stride<180, 3>>;
  using CMap = Eigen::Map<const Matrix3, 0, Eigen::Stride<27, 3>>;
  using BMap = Eigen::Map<const Eigen::Matrix<double, 9, 9>, 0, Eigen::Stride<81, 3>>;
  using AMap = Eigen::Map<const Eigen::Matrix<double, 9, 3>, 0, Eigen::Stride<81, 3>>;

  const auto& qps = cache.elements[element];
  for (size_t q = 0; q < qps.size(); ++q) {
    const auto& qp = qps[q];
    const double w = qp.wdetG;
    const Matrix3 F = Matrix3::Identity() + U * qp.Gm.transpose();

    try {
      if (medium) {
        const Eigen::Matrix<double, 3, 9> Hm = U * qp.D.transpose();
        const KinematicState s{F, Eigen::Map<const Vector27>(Hm.data())};
        const auto [resp, tan] = third_medium_response(s, med, materials.mode);

        Rm.noalias() += w * (unflatten9(resp.Phat) * qp.Gm);
        Rm.noalias() += w * (Eigen::Map<const Eigen::Matrix<double, 3, 9>>(resp.That.data()) * qp.D);

        const bool have_cross = !tan.Ahat.isZero(0.0);
        for (int cc = 0; cc < 3; ++cc)
          for (int cr = 0; cr < 3; ++cr) {
            const CMap Cb(tan.Chat.data() + cr + 9 * cc);
            const BMap Bb(tan.Bhat.data() + cr + 27 * cc);
            Eigen::Matrix<double, 20, 20> M;
            M.noalias() = qp.Gm.transpose() * (w * Cb) * qp.Gm;
            M.noalias() += qp.D.transpose() * (w * Bb) * qp.D;
            BlockMap(out.tangent.data() + cr + 60 * cc) += M;
            if (have_cross) {
              const AMap Ab(tan.Ahat.data() + cr + 27 * cc);
              const Eigen::Matrix<double, 20, 20> X =
                  qp.D.transpose() * (w * Ab) * qp.Gm;
              BlockMap(out.tangent.data() + cr + 60 * cc) += X;
              BlockMap(out.tangent.data() + cc + 60 * cr) += X.transpose();
            }
          }
      } else {
        const SolidResponse r = solid_response(F, *solid, materials.mode);
        Rm.noalias() += w * (unflatten9(r.Phat) * qp.Gm);
        for (int cc = 0; cc < 3; ++cc)
          for (int cr = 0; cr < 3; ++cr) {
            const CMap Cb(r.Chat.data() + cr + 9 * cc);
            BlockMap(out.tangent.data() + cr + 60 * cc).noalias() +=
                qp.Gm.transpose() * (w * Cb) * qp.Gm;
          }
      }
    } catch (const BarrierViolation& e) {
      throw BarrierViolation(e.J, el.id, static_cast<int>(q));
    }
  }
  out.tangent = (0.5 * (out.tangent + out.tangent.transpose())).eval();
  return out;
}

double element_energy(const Mesh& mesh, const AssemblyCache& cache, int element,
                      const Vector60& u_element, const Materials& materials, double load_factor) {
  const Hex20Element& el = mesh.elements[element];
  const bool medium = el.tag.is_medium();
  const ThirdMediumParams med = scaled_medium(materials, load_factor);
  const auto U = Eigen::Map<const Eigen::Matrix<double, 3, 20>>(u_element.data());

  double energy = 0.0;
  const auto& qps = cache.elements[element];
  for (size_t q = 0; q < qps.size(); ++q) {
    const Matrix3 F = Matrix3::Identity() + U * qps[q].Gm.transpose();
    try {
      if (medium) {
        const Eigen::Matrix<double, 3, 9> Hm = U * qps[q].D.transpose();
        const KinematicState s{F, Eigen::Map<const Vector27>(Hm.data())};
        energy += qps[q].wdetG * psi_third_medium(s, med);
      } else {
        energy += qps[q].wdetG * psi_solid(F, materials.solid_for(el.tag.body_id));
      }
    } catch (const BarrierViolation& e) {
      throw BarrierViolation(e.J, el.id, static_cast<int>(q));
    }
  }
  return energy;
}

DofMap build_dof_map(const Mesh& mesh, const BoundaryConditions& bcs) {
  DofMap map;
  map.n_dofs = 3 * static_cast<int>(mesh.nodes.size());
  map.full_to_free.assign(map.n_dofs, 0);

  // Track full-load values to detect conflicting double prescriptions.
  std::map<int, double> prescribed;
  auto constrain = [&](int node, int comp, double full_value) {
    const int dof = 3 * node + comp;
    const auto it = prescribed.find(dof);
    if (it != prescribed.end() && std::abs(it->second - full_value) > 1e-12)
      throw ConfigError("dof " + std::to_string(dof) +
                        " prescribed twice with conflicting values");
    prescribed[dof] = full_value;
    map.full_to_free[dof] = -1;
  };

  for (const DirichletSpec& d : bcs.dirichlet) {
    const std::vector<int>& ids = mesh.node_set(d.node_set);
    for (int id : ids) {
      if (d.kind == DirichletSpec::Rotation) {
        const Eigen::AngleAxisd rot(d.angle_deg * M_PI / 180.0, d.axis.normalized());
        const Vector3 u = rot * (mesh.nodes[id].X - d.center) + d.center - mesh.nodes[id].X;
        for (int c = 0; c < 3; ++c) constrain(id, c, u[c]);
      } else {
        for (int c = 0; c < 3; ++c)
          if (d.components[c]) constrain(id, c, d.value[c]);
      }
    }
  }

  for (int dof = 0; dof < map.n_dofs; ++dof) {
    if (map.full_to_free[dof] < 0) continue;
    map.full_to_free[dof] = static_cast<int>(map.free_to_full.size());
    map.free_to_full.push_back(dof);
  }
  return map;
}

void apply_dirichlet(const Mesh& mesh, const BoundaryConditions& bcs, double lambda,
                     Eigen::VectorXd& u_full) {
  for (const DirichletSpec& d : bcs.dirichlet) {
    for (int id : mesh.node_set(d.node_set)) {
      if (d.kind == DirichletSpec::Rotation) {
        const Eigen::AngleAxisd rot(lambda * d.angle_deg * M_PI / 180.0, d.axis.normalized());
        const Vector3 u = rot * (mesh.nodes[id].X - d.center) + d.center - mesh.nodes[id].X;
        u_full.segment<3>(3 * id) = u;
      } else {
        for (int c = 0; c < 3; ++c)
          if (d.components[c]) u_full[3 * id + c] = lambda * d.value[c];
      }
    }
  }
}

namespace {

// 8-node serendipity quad, used for traction integration on element faces.
// Node order: corners (-1,-1),(1,-1),(1,1),(-1,1), then edge midpoints.
void q8_eval(double s, double t, Eigen::Matrix<double, 8, 1>& N, Eigen::Matrix<double, 8, 2>& dN) {
  static const double c[8][2] = {{-1, -1}, {1, -1}, {1, 1}, {-1, 1},
                                 {0, -1},  {1, 0},  {0, 1}, {-1, 0}};
  for (int I = 0; I < 8; ++I) {
    const double a = c[I][0], b = c[I][1];
    if (I < 4) {
      N[I] = 0.25 * (1 + a * s) * (1 + b * t) * (a * s + b * t - 1);
      dN(I, 0) = 0.25 * a * (1 + b * t) * (2 * a * s + b * t);
      dN(I, 1) = 0.25 * b * (1 + a * s) * (a * s + 2 * b * t);
    } else if (a == 0.0) {
      N[I] = 0.5 * (1 - s * s) * (1 + b * t);
      dN(I, 0) = -s * (1 + b * t);
      dN(I, 1) = 0.5 * b * (1 - s * s);
    } else {
      N[I] = 0.5 * (1 + a * s) * (1 - t * t);
      dN(I, 0) = 0.5 * a * (1 - t * t);
      dN(I, 1) = -t * (1 + a * s);
    }
  }
}

}  // namespace

Eigen::VectorXd external_force(const Mesh& mesh, const AssemblyCache& cache,
                               const BoundaryConditions& bcs) {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(3 * mesh.nodes.size());

  // Face tractions: 3x3 Gauss on the quadratic face.
  const auto& faces = hex20_face_nodes();
  static const double gp[3] = {-std::sqrt(3.0 / 5.0), 0.0, std::sqrt(3.0 / 5.0)};
  static const double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  for (const TractionSpec& spec : bcs.tractions) {
    const auto it = mesh.side_sets.find(spec.side_set);
    if (it == mesh.side_sets.end()) throw ConfigError("unknown side set '" + spec.side_set + "'");
    for (const SideRef& sr : it->second) {
      const Hex20Element& el = mesh.elements[sr.element];
      Eigen::Matrix<double, 8, 3> Xf;
      for (int loc = 0; loc < 8; ++loc)
        Xf.row(loc) = mesh.nodes[el.nodes[faces[sr.face][loc]]].X.transpose();
      for (int qa = 0; qa < 3; ++qa)
        for (int qb = 0; qb < 3; ++qb) {
          Eigen::Matrix<double, 8, 1> N;
          Eigen::Matrix<double, 8, 2> dN;
          q8_eval(gp[qa], gp[qb], N, dN);
          const Vector3 ts = Xf.transpose() * dN.col(0);
          const Vector3 tt = Xf.transpose() * dN.col(1);
          const double dA = ts.cross(tt).norm();
          const double w = gw[qa] * gw[qb] * dA;
          for (int loc = 0; loc < 8; ++loc)
            f.segment<3>(3 * el.nodes[faces[sr.face][loc]]) += w * N[loc] * spec.traction;
        }
    }
  }

  // Body force over the volume.
  if (bcs.body_force != Vector3::Zero()) {
    std::vector<ShapeEval> shapes;
    for (const Vector3& xi : cache.rule.points) shapes.push_back(q2s_eval(xi));
    for (const Hex20Element& el : mesh.elements) {
      const auto& qps = cache.elements[el.id];
      for (size_t q = 0; q < qps.size(); ++q)
        for (int I = 0; I < 20; ++I)
          f.segment<3>(3 * el.nodes[I]) += qps[q].wdetG * shapes[q].N[I] * bcs.body_force;
    }
  }
  return f;
}

GlobalSystem assemble(const Mesh& mesh, const AssemblyCache& cache, const DofMap& dofs,
                      const Materials& materials, const BoundaryConditions& bcs,
                      const Eigen::VectorXd& u_full, double load_factor) {
  GlobalSystem sys;
  const int nf = dofs.n_free();
  Eigen::VectorXd r_full = Eigen::VectorXd::Zero(dofs.n_dofs);

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(mesh.elements.size() * 60 * 60 / 2);

  for (const Hex20Element& el : mesh.elements) {
    const Vector60 u_e = gather_element(mesh, el.id, u_full);
    const ElementContribution ec =
        element_contribution(mesh, cache, el.id, u_e, materials, load_factor);
    for (int p = 0; p < 60; ++p) {
      const int gp = 3 * el.nodes[p / 3] + p % 3;
      r_full[gp] += ec.residual[p];
      const int fp = dofs.full_to_free[gp];
      if (fp < 0) continue;
      for (int q = 0; q < 60; ++q) {
        const int gq = 3 * el.nodes[q / 3] + q % 3;
        const int fq = dofs.full_to_free[gq];
        if (fq >= 0) triplets.emplace_back(fp, fq, ec.tangent(p, q));
      }
    }
  }

  const bool has_external = !bcs.tractions.empty() || bcs.body_force != Vector3::Zero();
  if (has_external) r_full -= load_factor * external_force(mesh, cache, bcs);

  sys.K.resize(nf, nf);
  sys.K.setFromTriplets(triplets.begin(), triplets.end());
  sys.K.makeCompressed();

  sys.R.resize(nf);
  for (int i = 0; i < nf; ++i) sys.R[i] = r_full[dofs.free_to_full[i]];

  sys.reactions = Eigen::VectorXd::Zero(dofs.n_dofs);
  for (int dof = 0; dof < dofs.n_dofs; ++dof)
    if (dofs.constrained(dof)) sys.reactions[dof] = r_full[dof];
  return sys;
}

double total_energy(const Mesh& mesh, const AssemblyCache& cache, const Materials& materials,
                    const BoundaryConditions& bcs, const Eigen::VectorXd& u_full,
                    double load_factor) {
  double energy = 0.0;
  for (const Hex20Element& el : mesh.elements)
    energy +=
        element_energy(mesh, cache, el.id, gather_element(mesh, el.id, u_full), materials,
                       load_factor);
  const bool has_external = !bcs.tractions.empty() || bcs.body_force != Vector3::Zero();
  if (has_external) energy -= load_factor * external_force(mesh, cache, bcs).dot(u_full);
  return energy;
}

double min_jacobian(const Mesh& mesh, const AssemblyCache& cache, const Eigen::VectorXd& u_full) {
  double mn = std::numeric_limits<double>::infinity();
  for (const Hex20Element& el : mesh.elements) {
    const Vector60 u_e = gather_element(mesh, el.id, u_full);
    const auto U = Eigen::Map<const Eigen::Matrix<double, 3, 20>>(u_e.data());
    for (const auto& qp : cache.elements[el.id]) {
      const Matrix3 F = Matrix3::Identity() + U * qp.Gm.transpose();
      mn = std::min(mn, F.determinant());
    }
  }
  return mn;
}

}  // namespace tmc

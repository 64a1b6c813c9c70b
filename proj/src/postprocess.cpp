#include "tmc/postprocess.hpp"

#include <cmath>
#include <cstdio>

namespace tmc {

double von_mises(const Matrix3& sigma) {
  const double scale = std::max(sigma.cwiseAbs().maxCoeff(), 1e-300);
  const double asym = (sigma - sigma.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-8 * scale)
    throw std::invalid_argument("von_mises: input is not symmetric (relative asymmetry " +
                                std::to_string(asym / scale) + ")");
  const Matrix3 s = 0.5 * (sigma + sigma.transpose());
  const Matrix3 dev = s - (s.trace() / 3.0) * Matrix3::Identity();
  return std::sqrt(1.5 * dev.squaredNorm());
}

GapProbe make_gap_probe(const Mesh& mesh, const Vector3& point_a, const Vector3& point_b,
                        const std::string& name) {
  GapProbe probe;
  probe.name = name;
  probe.node_a = nearest_node(mesh, point_a);
  probe.node_b = nearest_node(mesh, point_b);
  return probe;
}

double gap_measure(const Mesh& mesh, const Eigen::VectorXd& u_full, const GapProbe& probe) {
  if (probe.node_a < 0 || probe.node_b < 0 ||
      probe.node_a >= static_cast<int>(mesh.nodes.size()) ||
      probe.node_b >= static_cast<int>(mesh.nodes.size()))
    throw MeshError("gap probe references nodes outside the mesh");
  const Vector3 a = mesh.nodes[probe.node_a].X + u_full.segment<3>(3 * probe.node_a);
  const Vector3 b = mesh.nodes[probe.node_b].X + u_full.segment<3>(3 * probe.node_b);
  return (a - b).norm();
}

FieldOutput compute_fields(const Mesh& mesh, const AssemblyCache& cache,
                           const Materials& materials, const Eigen::VectorXd& u_full,
                           double load_factor) {
  FieldOutput out;
  const size_t ne = mesh.elements.size();
  out.von_mises_avg.assign(ne, 0.0);
  out.j_min.assign(ne, 0.0);
  out.domain_tag.assign(ne, 0);

  ThirdMediumParams med = materials.medium;
  med.pbar *= load_factor;

  for (const Hex20Element& el : mesh.elements) {
    const Vector60 u_e = gather_element(mesh, el.id, u_full);
    const bool medium = el.tag.is_medium();
    out.domain_tag[el.id] = medium ? -1 : el.tag.body_id;

    double vm_sum = 0.0;
    double jmin = std::numeric_limits<double>::infinity();
    const auto& qps = cache.elements[el.id];
    for (const auto& qp : qps) {
      const BOperators b = build_b_operators(qp.dN_dX, qp.d2N_dX2);
      const Matrix3 F = Matrix3::Identity() + unflatten9(Vector9(b.B1 * u_e));
      jmin = std::min(jmin, F.determinant());
      Vector9 Phat;
      if (medium) {
        const KinematicState s{F, Vector27(b.B2 * u_e)};
        Phat = third_medium_response(s, med, materials.mode).first.Phat;
      } else {
        Phat = solid_response(F, materials.solid_for(el.tag.body_id), materials.mode).Phat;
      }
      vm_sum += von_mises(cauchy_from_pk1(F, Phat));
    }
    out.von_mises_avg[el.id] = vm_sum / static_cast<double>(qps.size());
    out.j_min[el.id] = jmin;
  }
  return out;
}

double cavity_volume(const Mesh& mesh, const AssemblyCache& cache, const Eigen::VectorXd& u_full) {
  double vol = 0.0;
  for (const Hex20Element& el : mesh.elements) {
    if (!el.tag.is_medium()) continue;
    const Vector60 u_e = gather_element(mesh, el.id, u_full);
    for (const auto& qp : cache.elements[el.id]) {
      Matrix3 F = Matrix3::Identity();
      for (int I = 0; I < 20; ++I) F += u_e.segment<3>(3 * I) * qp.dN_dX.row(I);
      vol += qp.wdetG * F.determinant();
    }
  }
  return vol;
}

void export_vtk(const Mesh& mesh, const Eigen::VectorXd& u_full, const FieldOutput& fields,
                const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot write VTK file '" + path + "'");

  const size_t nn = mesh.nodes.size(), ne = mesh.elements.size();
  std::fprintf(f, "# vtk DataFile Version 3.0\n");
  std::fprintf(f, "third medium contact output\n");
  std::fprintf(f, "ASCII\n");
  std::fprintf(f, "DATASET UNSTRUCTURED_GRID\n");

  std::fprintf(f, "POINTS %zu double\n", nn);
  for (const Node& n : mesh.nodes)
    std::fprintf(f, "%.17g %.17g %.17g\n", n.X.x(), n.X.y(), n.X.z());

  std::fprintf(f, "CELLS %zu %zu\n", ne, ne * 21);
  for (const Hex20Element& el : mesh.elements) {
    std::fprintf(f, "20");
    for (int id : el.nodes) std::fprintf(f, " %d", id);
    std::fprintf(f, "\n");
  }
  std::fprintf(f, "CELL_TYPES %zu\n", ne);
  for (size_t e = 0; e < ne; ++e) std::fprintf(f, "25\n");

  std::fprintf(f, "POINT_DATA %zu\n", nn);
  std::fprintf(f, "VECTORS displacement double\n");
  for (size_t n = 0; n < nn; ++n)
    std::fprintf(f, "%.17g %.17g %.17g\n", u_full[3 * n], u_full[3 * n + 1], u_full[3 * n + 2]);

  std::fprintf(f, "CELL_DATA %zu\n", ne);
  std::fprintf(f, "SCALARS von_mises double 1\nLOOKUP_TABLE default\n");
  for (size_t e = 0; e < ne; ++e) std::fprintf(f, "%.17g\n", fields.von_mises_avg[e]);
  std::fprintf(f, "SCALARS j_min double 1\nLOOKUP_TABLE default\n");
  for (size_t e = 0; e < ne; ++e) std::fprintf(f, "%.17g\n", fields.j_min[e]);
  std::fprintf(f, "SCALARS domain_tag int 1\nLOOKUP_TABLE default\n");
  for (size_t e = 0; e < ne; ++e) std::fprintf(f, "%d\n", fields.domain_tag[e]);

  std::fclose(f);
}

}  // namespace tmc

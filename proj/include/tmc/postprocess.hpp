#pragma once

#include <string>
#include <vector>

#include "tmc/assembly.hpp"

namespace tmc {

/// sqrt(3/2 s:s) with s the deviator. Inputs asymmetric beyond 1e-8
/// (relative) are rejected; smaller asymmetry is symmetrized away.
double von_mises(const Matrix3& sigma);

/// Two material points tracked through the deformation, stored as the nodes
/// nearest the requested reference coordinates.
struct GapProbe {
  std::string name = "gap";
  int node_a = -1;
  int node_b = -1;
};

GapProbe make_gap_probe(const Mesh& mesh, const Vector3& point_a, const Vector3& point_b,
                        const std::string& name = "gap");

/// Current-configuration distance between the probe points.
double gap_measure(const Mesh& mesh, const Eigen::VectorXd& u_full, const GapProbe& probe);

struct FieldOutput {
  std::vector<double> von_mises_avg;  // per element, quadrature average
  std::vector<double> j_min;          // per element
  std::vector<int> domain_tag;        // body id, or -1 for the third medium
};

FieldOutput compute_fields(const Mesh& mesh, const AssemblyCache& cache,
                           const Materials& materials, const Eigen::VectorXd& u_full,
                           double load_factor);

/// Current cavity volume: quadrature integral of det(F) over third-medium
/// elements in the reference configuration.
double cavity_volume(const Mesh& mesh, const AssemblyCache& cache, const Eigen::VectorXd& u_full);

/// Legacy ASCII VTK unstructured grid (quadratic hexahedra, 17 significant
/// digits). Bytes are identical for identical inputs.
void export_vtk(const Mesh& mesh, const Eigen::VectorXd& u_full, const FieldOutput& fields,
                const std::string& path);

}  // namespace tmc

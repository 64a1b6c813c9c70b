#pragma once

#include <Eigen/Sparse>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tmc/material.hpp"
#include "tmc/mesh.hpp"
#include "tmc/shape.hpp"

namespace tmc {

/// Strain-displacement operators at one quadrature point. Element DOFs are
/// node-major: dof 3I+c is displacement component c of local node I.
/// B1 row i+3j carries dF(i,j) = dN_I/dX_j; B2 row i+3j+9k carries
/// dH(i,j,k) = d2N_I/dX_j dX_k.
struct BOperators {
  Eigen::Matrix<double, 9, 60> B1;
  Eigen::Matrix<double, 27, 60> B2;
};

BOperators build_b_operators(const Eigen::Matrix<double, 20, 3>& dN_dX,
                             const std::array<Matrix3, 20>& d2N_dX2);

struct Materials {
  std::map<int, SolidParams> solids;  // keyed by body id
  ThirdMediumParams medium;           // pbar holds the full-load value
  DerivativeMode mode = DerivativeMode::Analytic;

  const SolidParams& solid_for(int body_id) const;
};

struct ElementContribution {
  Vector60 residual = Vector60::Zero();
  Matrix60 tangent = Matrix60::Zero();
};

/// Reference-configuration quadrature data, fixed for the whole run.
/// Gm packs the gradient component-wise (Gm(j, I) = dN_I/dX_j) and D the
/// Hessian (D(j + 3k, I) = d2N_I/dX_j dX_k); the element operators B1/B2 act
/// independently per displacement component, so all element products reduce
/// to these 3x20 and 9x20 factors.
struct AssemblyCache {
  struct QuadPoint {
    Eigen::Matrix<double, 20, 3> dN_dX;
    std::array<Matrix3, 20> d2N_dX2;
    Eigen::Matrix<double, 3, 20> Gm;
    Eigen::Matrix<double, 9, 20> D;
    double wdetG = 0.0;
  };
  QuadratureRule rule;
  std::vector<std::vector<QuadPoint>> elements;  // [element][qp]
};

AssemblyCache build_assembly_cache(const Mesh& mesh, int quad_points_per_axis = 3);

ElementContribution element_contribution(const Mesh& mesh, const AssemblyCache& cache, int element,
                                         const Vector60& u_element, const Materials& materials,
                                         double load_factor);

double element_energy(const Mesh& mesh, const AssemblyCache& cache, int element,
                      const Vector60& u_element, const Materials& materials, double load_factor);

// --- boundary conditions ------------------------------------------------

struct DirichletSpec {
  std::string node_set;
  std::array<bool, 3> components{false, false, false};
  Vector3 value = Vector3::Zero();  // full-load prescribed displacement

  enum Kind { Linear, Rotation } kind = Linear;
  // Rotation constraints prescribe all three components:
  // u(lambda) = R(lambda * angle) (X - center) + center - X.
  Vector3 axis = Vector3::UnitX();
  Vector3 center = Vector3::Zero();
  double angle_deg = 0.0;
};

struct TractionSpec {
  std::string side_set;
  Vector3 traction = Vector3::Zero();  // full-load reference traction
};

struct BoundaryConditions {
  std::vector<DirichletSpec> dirichlet;
  std::vector<TractionSpec> tractions;
  Vector3 body_force = Vector3::Zero();
};

struct DofMap {
  int n_dofs = 0;
  std::vector<int> full_to_free;  // -1 where constrained
  std::vector<int> free_to_full;

  int n_free() const { return static_cast<int>(free_to_full.size()); }
  bool constrained(int full_dof) const { return full_to_free[full_dof] < 0; }
};

/// Throws ConfigError if a DOF is prescribed twice with conflicting values.
DofMap build_dof_map(const Mesh& mesh, const BoundaryConditions& bcs);

/// Writes the prescribed displacement values at load factor lambda into the
/// constrained entries of u_full.
void apply_dirichlet(const Mesh& mesh, const BoundaryConditions& bcs, double lambda,
                     Eigen::VectorXd& u_full);

struct GlobalSystem {
  Eigen::SparseMatrix<double> K;  // over free DOFs
  Eigen::VectorXd R;              // over free DOFs
  Eigen::VectorXd reactions;      // over all DOFs, nonzero at constrained ones
};

/// Residual R = d(Pi)/du with Pi = internal energy - lambda * external work.
/// Element contributions are accumulated in element-id order; results are
/// bit-reproducible for identical inputs.
GlobalSystem assemble(const Mesh& mesh, const AssemblyCache& cache, const DofMap& dofs,
                      const Materials& materials, const BoundaryConditions& bcs,
                      const Eigen::VectorXd& u_full, double load_factor);

/// Total potential energy (internal minus lambda-scaled external work).
double total_energy(const Mesh& mesh, const AssemblyCache& cache, const Materials& materials,
                    const BoundaryConditions& bcs, const Eigen::VectorXd& u_full,
                    double load_factor);

/// Consistent nodal forces of the traction and body-force terms at full load.
Eigen::VectorXd external_force(const Mesh& mesh, const AssemblyCache& cache,
                               const BoundaryConditions& bcs);

/// Minimum det(F) over all quadrature points at the given displacement.
double min_jacobian(const Mesh& mesh, const AssemblyCache& cache, const Eigen::VectorXd& u_full);

/// Gathers the 60 element DOFs from a full displacement vector.
Vector60 gather_element(const Mesh& mesh, int element, const Eigen::VectorXd& u_full);

}  // namespace tmc

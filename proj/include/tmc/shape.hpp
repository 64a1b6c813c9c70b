#pragma once

#include <array>
#include <vector>

#include "tmc/types.hpp"

namespace tmc {

/// Shape values and reference-coordinate derivatives of the 20-node
/// serendipity hexahedron (Q2S) at one local coordinate.
struct ShapeEval {
  Eigen::Matrix<double, 20, 1> N;
  Eigen::Matrix<double, 20, 3> dN_dxi;
  std::array<Matrix3, 20> d2N_dxi2;  // symmetric in the two derivative indices
};

/// Jacobian machinery at one local coordinate. Layout: G(i,k) = dX_k / dxi_i,
/// so Ginv(i,k) = dxi_k / dX_i. Gstar is the adjugate, Ginv = Gstar / detG,
/// and dGinv_dxi[l] = d(Ginv)/dxi_l assembled from the adjugate and
/// determinant derivatives in closed form.
struct JacobianData {
  Matrix3 G;
  double detG = 0.0;
  Matrix3 Gstar;
  Matrix3 Ginv;
  std::array<Matrix3, 3> dGinv_dxi;
};

struct QuadratureRule {
  std::vector<Vector3> points;
  std::vector<double> weights;
};

using ElementCoords = Eigen::Matrix<double, 20, 3>;  // row I = reference position of node I

/// Reference positions of the 20 nodes: corners 0-7 (counterclockwise bottom,
/// then top), mid-edge nodes 8-19 in legacy-VTK quadratic-hexahedron order
/// (bottom ring, top ring, then vertical edges).
const std::array<Vector3, 20>& q2s_node_coords();

ShapeEval q2s_eval(const Vector3& xi);

/// Tensor-product Gauss-Legendre rule with 2, 3 or 4 points per axis.
/// Point ordering: xi fastest, then eta, then zeta.
QuadratureRule gauss_rule(int points_per_axis);

/// Throws InvertedElement if det(G) <= 0.
JacobianData jacobian(const ElementCoords& X, const ShapeEval& shape, int element_id = -1);
JacobianData jacobian(const ElementCoords& X, const Vector3& xi, int element_id = -1);

/// First and second shape-function derivatives with respect to the reference
/// configuration. The returned Hessians are symmetrized over the two
/// derivative indices.
void physical_derivatives(const ElementCoords& X, const ShapeEval& shape,
                          Eigen::Matrix<double, 20, 3>& dN_dX,
                          std::array<Matrix3, 20>& d2N_dX2, int element_id = -1);

Matrix3 adjugate(const Matrix3& a);

}  // namespace tmc

#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace tmc {

using Vector3 = Eigen::Vector3d;
using Matrix3 = Eigen::Matrix3d;
using Vector9 = Eigen::Matrix<double, 9, 1>;
using Vector27 = Eigen::Matrix<double, 27, 1>;
using Vector60 = Eigen::Matrix<double, 60, 1>;
using Matrix9 = Eigen::Matrix<double, 9, 9>;
using Matrix27 = Eigen::Matrix<double, 27, 27>;
using Matrix27x9 = Eigen::Matrix<double, 27, 9>;
using Matrix60 = Eigen::Matrix<double, 60, 60>;

// Flattening conventions, used identically everywhere:
//   second-order tensor  A(i,j)   -> 9-vector slot  i + 3*j   (first index fastest)
//   third-order tensor   H(i,j,k) -> 27-vector slot i + 3*j + 9*k
// For H built from a displacement field, H(i,j,k) = d^2 u_i / dX_j dX_k.
inline constexpr int flat9(int i, int j) { return i + 3 * j; }
inline constexpr int flat27(int i, int j, int k) { return i + 3 * j + 9 * k; }

// Eigen stores Matrix3 column-major, which is exactly the i + 3*j layout.
inline Vector9 flatten(const Matrix3& a) {
  return Eigen::Map<const Vector9>(a.data());
}

inline Matrix3 unflatten9(const Vector9& v) {
  return Eigen::Map<const Matrix3>(v.data());
}

/// Volume map became non-positive at a material point. The solver catches
/// this to trigger load-step bisection.
class BarrierViolation : public std::runtime_error {
 public:
  BarrierViolation(double J, int element_id = -1, int qp = -1)
      : std::runtime_error("barrier violation: J = " + std::to_string(J) +
                           (element_id >= 0 ? " in element " + std::to_string(element_id) : "") +
                           (qp >= 0 ? " at quadrature point " + std::to_string(qp) : "")),
        J(J),
        element_id(element_id),
        qp(qp) {}

  double J;
  int element_id;
  int qp;
};

/// Reference-configuration Jacobian determinant was non-positive.
class InvertedElement : public std::runtime_error {
 public:
  InvertedElement(double detG, int element_id = -1)
      : std::runtime_error("inverted element: det(G) = " + std::to_string(detG) +
                           (element_id >= 0 ? " in element " + std::to_string(element_id) : "")),
        detG(detG),
        element_id(element_id) {}

  double detG;
  int element_id;
};

class MeshError : public std::runtime_error {
 public:
  explicit MeshError(const std::string& what) : std::runtime_error(what) {}
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace tmc

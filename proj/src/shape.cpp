#include "tmc/shape.hpp"

#include <cmath>
#include <stdexcept>

namespace tmc {

const std::array<Vector3, 20>& q2s_node_coords() {
  static const std::array<Vector3, 20> coords = {{
      {-1, -1, -1}, {1, -1, -1}, {1, 1, -1}, {-1, 1, -1},   // bottom corners
      {-1, -1, 1},  {1, -1, 1},  {1, 1, 1},  {-1, 1, 1},    // top corners
      {0, -1, -1},  {1, 0, -1},  {0, 1, -1}, {-1, 0, -1},   // bottom mid-edges
      {0, -1, 1},   {1, 0, 1},   {0, 1, 1},  {-1, 0, 1},    // top mid-edges
      {-1, -1, 0},  {1, -1, 0},  {1, 1, 0},  {-1, 1, 0},    // vertical mid-edges
  }};
  return coords;
}

ShapeEval q2s_eval(const Vector3& xi) {
  ShapeEval out;
  const double x = xi[0], y = xi[1], z = xi[2];
  const auto& nodes = q2s_node_coords();

  for (int I = 0; I < 20; ++I) {
    const double a = nodes[I][0], b = nodes[I][1], c = nodes[I][2];
    Matrix3& H = out.d2N_dxi2[I];

    if (I < 8) {
      // Corner: N = 1/8 (1+ax)(1+by)(1+cz)(ax+by+cz-2)
      const double fx = 1.0 + a * x, fy = 1.0 + b * y, fz = 1.0 + c * z;
      const double s = a * x + b * y + c * z;
      out.N[I] = 0.125 * fx * fy * fz * (s - 2.0);
      out.dN_dxi(I, 0) = 0.125 * a * fy * fz * (2.0 * a * x + b * y + c * z - 1.0);
      out.dN_dxi(I, 1) = 0.125 * b * fx * fz * (a * x + 2.0 * b * y + c * z - 1.0);
      out.dN_dxi(I, 2) = 0.125 * c * fx * fy * (a * x + b * y + 2.0 * c * z - 1.0);
      H(0, 0) = 0.25 * fy * fz;
      H(1, 1) = 0.25 * fx * fz;
      H(2, 2) = 0.25 * fx * fy;
      H(0, 1) = H(1, 0) = 0.125 * a * b * fz * (2.0 * a * x + 2.0 * b * y + c * z);
      H(0, 2) = H(2, 0) = 0.125 * a * c * fy * (2.0 * a * x + b * y + 2.0 * c * z);
      H(1, 2) = H(2, 1) = 0.125 * b * c * fx * (a * x + 2.0 * b * y + 2.0 * c * z);
    } else if (a == 0.0) {
      // Mid-edge on a xi-direction edge: N = 1/4 (1-x^2)(1+by)(1+cz)
      const double fy = 1.0 + b * y, fz = 1.0 + c * z, q = 1.0 - x * x;
      out.N[I] = 0.25 * q * fy * fz;
      out.dN_dxi(I, 0) = -0.5 * x * fy * fz;
      out.dN_dxi(I, 1) = 0.25 * b * q * fz;
      out.dN_dxi(I, 2) = 0.25 * c * q * fy;
      H(0, 0) = -0.5 * fy * fz;
      H(1, 1) = 0.0;
      H(2, 2) = 0.0;
      H(0, 1) = H(1, 0) = -0.5 * b * x * fz;
      H(0, 2) = H(2, 0) = -0.5 * c * x * fy;
      H(1, 2) = H(2, 1) = 0.25 * b * c * q;
    } else if (b == 0.0) {
      const double fx = 1.0 + a * x, fz = 1.0 + c * z, q = 1.0 - y * y;
      out.N[I] = 0.25 * fx * q * fz;
      out.dN_dxi(I, 0) = 0.25 * a * q * fz;
      out.dN_dxi(I, 1) = -0.5 * y * fx * fz;
      out.dN_dxi(I, 2) = 0.25 * c * fx * q;
      H(0, 0) = 0.0;
      H(1, 1) = -0.5 * fx * fz;
      H(2, 2) = 0.0;
      H(0, 1) = H(1, 0) = -0.5 * a * y * fz;
      H(0, 2) = H(2, 0) = 0.25 * a * c * q;
      H(1, 2) = H(2, 1) = -0.5 * c * y * fx;
    } else {
      const double fx = 1.0 + a * x, fy = 1.0 + b * y, q = 1.0 - z * z;
      out.N[I] = 0.25 * fx * fy * q;
      out.dN_dxi(I, 0) = 0.25 * a * fy * q;
      out.dN_dxi(I, 1) = 0.25 * b * fx * q;
      out.dN_dxi(I, 2) = -0.5 * z * fx * fy;
      H(0, 0) = 0.0;
      H(1, 1) = 0.0;
      H(2, 2) = -0.5 * fx * fy;
      H(0, 1) = H(1, 0) = 0.25 * a * b * q;
      H(0, 2) = H(2, 0) = -0.5 * a * z * fy;
      H(1, 2) = H(2, 1) = -0.5 * b * z * fx;
    }
  }
  return out;
}

QuadratureRule gauss_rule(int points_per_axis) {
  std::vector<double> p, w;
  switch (points_per_axis) {
    case 2: {
      const double r = 1.0 / std::sqrt(3.0);
      p = {-r, r};
      w = {1.0, 1.0};
      break;
    }
    case 3: {
      const double r = std::sqrt(3.0 / 5.0);
      p = {-r, 0.0, r};
      w = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
      break;
    }
    case 4: {
      const double s = std::sqrt(6.0 / 5.0);
      const double r1 = std::sqrt((3.0 - 2.0 * s) / 7.0);
      const double r2 = std::sqrt((3.0 + 2.0 * s) / 7.0);
      const double w1 = (18.0 + std::sqrt(30.0)) / 36.0;
      const double w2 = (18.0 - std::sqrt(30.0)) / 36.0;
      p = {-r2, -r1, r1, r2};
      w = {w2, w1, w1, w2};
      break;
    }
    default:
      throw std::invalid_argument("gauss_rule: points_per_axis must be 2, 3 or 4");
  }

  QuadratureRule rule;
  const int n = points_per_axis;
  rule.points.reserve(n * n * n);
  rule.weights.reserve(n * n * n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        rule.points.emplace_back(p[i], p[j], p[k]);
        rule.weights.push_back(w[i] * w[j] * w[k]);
      }
  return rule;
}

Matrix3 adjugate(const Matrix3& a) {
  Matrix3 s;
  s(0, 0) = a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1);
  s(0, 1) = a(0, 2) * a(2, 1) - a(0, 1) * a(2, 2);
  s(0, 2) = a(0, 1) * a(1, 2) - a(0, 2) * a(1, 1);
  s(1, 0) = a(1, 2) * a(2, 0) - a(1, 0) * a(2, 2);
  s(1, 1) = a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0);
  s(1, 2) = a(0, 2) * a(1, 0) - a(0, 0) * a(1, 2);
  s(2, 0) = a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0);
  s(2, 1) = a(0, 1) * a(2, 0) - a(0, 0) * a(2, 1);
  s(2, 2) = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  return s;
}

namespace {

// Directional derivative of the adjugate under a perturbation da of a.
Matrix3 adjugate_derivative(const Matrix3& a, const Matrix3& da) {
  auto d = [&](int i1, int j1, int i2, int j2) {
    return da(i1, j1) * a(i2, j2) + a(i1, j1) * da(i2, j2);
  };
  Matrix3 s;
  s(0, 0) = d(1, 1, 2, 2) - d(1, 2, 2, 1);
  s(0, 1) = d(0, 2, 2, 1) - d(0, 1, 2, 2);
  s(0, 2) = d(0, 1, 1, 2) - d(0, 2, 1, 1);
  s(1, 0) = d(1, 2, 2, 0) - d(1, 0, 2, 2);
  s(1, 1) = d(0, 0, 2, 2) - d(0, 2, 2, 0);
  s(1, 2) = d(0, 2, 1, 0) - d(0, 0, 1, 2);
  s(2, 0) = d(1, 0, 2, 1) - d(1, 1, 2, 0);
  s(2, 1) = d(0, 1, 2, 0) - d(0, 0, 2, 1);
  s(2, 2) = d(0, 0, 1, 1) - d(0, 1, 1, 0);
  return s;
}

}  // namespace

JacobianData jacobian(const ElementCoords& X, const ShapeEval& shape, int element_id) {
  JacobianData jd;
  jd.G = shape.dN_dxi.transpose() * X;  // G(i,k) = sum_I dN_I/dxi_i X_I,k

  jd.Gstar = adjugate(jd.G);
  jd.detG = jd.G(0, 0) * jd.Gstar(0, 0) + jd.G(0, 1) * jd.Gstar(1, 0) + jd.G(0, 2) * jd.Gstar(2, 0);
  if (!(jd.detG > 0.0)) throw InvertedElement(jd.detG, element_id);
  jd.Ginv = jd.Gstar / jd.detG;

  for (int l = 0; l < 3; ++l) {
    Matrix3 dG = Matrix3::Zero();  // dG(i,k)/dxi_l
    for (int I = 0; I < 20; ++I) dG += shape.d2N_dxi2[I].col(l) * X.row(I);

    const Matrix3 dGstar = adjugate_derivative(jd.G, dG);
    double ddet = 0.0;  // d(det G)/dxi_l = tr(Gstar * dG)
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k) ddet += jd.Gstar(i, k) * dG(k, i);

    jd.dGinv_dxi[l] = dGstar / jd.detG - (ddet / (jd.detG * jd.detG)) * jd.Gstar;
  }
  return jd;
}

JacobianData jacobian(const ElementCoords& X, const Vector3& xi, int element_id) {
  return jacobian(X, q2s_eval(xi), element_id);
}

void physical_derivatives(const ElementCoords& X, const ShapeEval& shape,
                          Eigen::Matrix<double, 20, 3>& dN_dX,
                          std::array<Matrix3, 20>& d2N_dX2, int element_id) {
  const JacobianData jd = jacobian(X, shape, element_id);

  dN_dX = shape.dN_dxi * jd.Ginv.transpose();  // dN/dX_i = Ginv(i,k) dN/dxi_k

  for (int I = 0; I < 20; ++I) {
    Matrix3 h;  // h(i,l) = Ginv(i,k) d2N/dxi_l dxi_k + dN/dxi_k dGinv(i,k)/dxi_l
    for (int i = 0; i < 3; ++i)
      for (int l = 0; l < 3; ++l) {
        double v = 0.0;
        for (int k = 0; k < 3; ++k)
          v += jd.Ginv(i, k) * shape.d2N_dxi2[I](l, k) +
               shape.dN_dxi(I, k) * jd.dGinv_dxi[l](i, k);
        h(i, l) = v;
      }
    // Chain through dxi_l/dX_j = Ginv(j,l), then symmetrize.
    const Matrix3 full = h * jd.Ginv.transpose();
    d2N_dX2[I] = 0.5 * (full + full.transpose());
  }
}

}  // namespace tmc

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "tmc/shape.hpp"

using namespace tmc;

namespace {

// Element whose geometry map is X = A xi + b.
ElementCoords affine_element(const Matrix3& A, const Vector3& b) {
  ElementCoords X;
  const auto& nodes = q2s_node_coords();
  for (int I = 0; I < 20; ++I) X.row(I) = (A * nodes[I] + b).transpose();
  return X;
}

ElementCoords unit_cube_element() {
  Matrix3 A = 0.5 * Matrix3::Identity();
  return affine_element(A, Vector3(0.5, 0.5, 0.5));
}

// Non-affine geometry: unit cube with a couple of mid-edge nodes pulled off
// the edge midpoints.
ElementCoords curved_element() {
  ElementCoords X = unit_cube_element();
  X(8, 1) += 0.08;   // bottom edge node
  X(13, 0) += 0.06;  // top edge node
  X(17, 2) += 0.05;  // vertical edge node
  return X;
}

Vector3 random_xi(std::mt19937& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  return {dist(rng), dist(rng), dist(rng)};
}

}  // namespace

TEST_CASE("q2s Kronecker delta at nodal points") {
  const auto& nodes = q2s_node_coords();
  for (int J = 0; J < 20; ++J) {
    const ShapeEval s = q2s_eval(nodes[J]);
    for (int I = 0; I < 20; ++I) {
      CHECK(std::abs(s.N[I] - (I == J ? 1.0 : 0.0)) < 1e-14);
    }
  }
}

TEST_CASE("q2s values at element center") {
  const ShapeEval s = q2s_eval(Vector3::Zero());
  for (int I = 0; I < 8; ++I) CHECK(s.N[I] == doctest::Approx(-0.25));
  for (int I = 8; I < 20; ++I) CHECK(s.N[I] == doctest::Approx(0.25));
  CHECK(s.N.sum() == doctest::Approx(1.0));
}

TEST_CASE("q2s partition of unity and derivative sums") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const ShapeEval s = q2s_eval(random_xi(rng));
    CHECK(std::abs(s.N.sum() - 1.0) < 1e-12);
    for (int d = 0; d < 3; ++d) CHECK(std::abs(s.dN_dxi.col(d).sum()) < 1e-12);
    Matrix3 hsum = Matrix3::Zero();
    for (int I = 0; I < 20; ++I) hsum += s.d2N_dxi2[I];
    CHECK(hsum.cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("q2s reference derivatives match finite differences") {
  std::mt19937 rng(11);
  const double h = 1e-6;
  for (int trial = 0; trial < 10; ++trial) {
    const Vector3 xi = 0.9 * random_xi(rng);
    const ShapeEval s = q2s_eval(xi);
    for (int d = 0; d < 3; ++d) {
      Vector3 xp = xi, xm = xi;
      xp[d] += h;
      xm[d] -= h;
      const ShapeEval sp = q2s_eval(xp), sm = q2s_eval(xm);
      for (int I = 0; I < 20; ++I) {
        const double fd = (sp.N[I] - sm.N[I]) / (2 * h);
        CHECK(s.dN_dxi(I, d) == doctest::Approx(fd).epsilon(1e-7).scale(1));
        for (int e = 0; e < 3; ++e) {
          const double fd2 = (sp.dN_dxi(I, e) - sm.dN_dxi(I, e)) / (2 * h);
          CHECK(s.d2N_dxi2[I](d, e) == doctest::Approx(fd2).epsilon(1e-6).scale(1));
        }
      }
    }
  }
}

TEST_CASE("gauss rules") {
  SUBCASE("3 per axis: 27 points, weights sum to reference volume") {
    const QuadratureRule r = gauss_rule(3);
    CHECK(r.points.size() == 27);
    double wsum = 0;
    for (double w : r.weights) wsum += w;
    CHECK(wsum == doctest::Approx(8.0).epsilon(1e-14));
  }
  SUBCASE("monomial x^2 y^2 z^2 integrates to (2/3)^3") {
    const QuadratureRule r = gauss_rule(3);
    double acc = 0;
    for (size_t q = 0; q < r.points.size(); ++q) {
      const Vector3& p = r.points[q];
      acc += r.weights[q] * p[0] * p[0] * p[1] * p[1] * p[2] * p[2];
    }
    CHECK(std::abs(acc - 8.0 / 27.0) < 1e-14);
  }
  SUBCASE("2 per axis exact for degree-3 monomials") {
    const QuadratureRule r = gauss_rule(2);
    double acc_x3 = 0, acc_x2y = 0, acc_xyz = 0;
    for (size_t q = 0; q < r.points.size(); ++q) {
      const Vector3& p = r.points[q];
      acc_x3 += r.weights[q] * p[0] * p[0] * p[0];
      acc_x2y += r.weights[q] * p[0] * p[0] * p[1];
      acc_xyz += r.weights[q] * p[0] * p[1] * p[2];
    }
    CHECK(std::abs(acc_x3) < 1e-14);
    CHECK(std::abs(acc_x2y) < 1e-14);
    CHECK(std::abs(acc_xyz) < 1e-14);
  }
  SUBCASE("unsupported order rejected") {
    CHECK_THROWS_AS(gauss_rule(5), std::invalid_argument);
    CHECK_THROWS_AS(gauss_rule(1), std::invalid_argument);
  }
}

TEST_CASE("jacobian on affine maps") {
  Matrix3 A = Matrix3::Zero();
  A.diagonal() << 0.7, 1.3, 2.1;
  const ElementCoords X = affine_element(A, Vector3(1, 2, 3));
  std::mt19937 rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    const JacobianData jd = jacobian(X, random_xi(rng));
    CHECK((jd.G - A.transpose()).cwiseAbs().maxCoeff() < 1e-13);
    CHECK(jd.detG == doctest::Approx(0.7 * 1.3 * 2.1).epsilon(1e-13));
    CHECK((jd.Ginv * jd.G - Matrix3::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((jd.detG * jd.Ginv - jd.Gstar).cwiseAbs().maxCoeff() < 1e-12);
    for (int l = 0; l < 3; ++l) CHECK(jd.dGinv_dxi[l].cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("jacobian of unit cube element") {
  const JacobianData jd = jacobian(unit_cube_element(), Vector3(0.1, -0.3, 0.5));
  CHECK((jd.G - 0.5 * Matrix3::Identity()).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(jd.detG == doctest::Approx(0.125));
  CHECK((jd.Gstar - 0.25 * Matrix3::Identity()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("inverted element detected") {
  SUBCASE("two corners swapped: map inverts near those corners") {
    ElementCoords X = unit_cube_element();
    X.row(0).swap(X.row(1));
    CHECK_THROWS_AS(jacobian(X, Vector3(-1, -1, -1), 42), InvertedElement);
  }
  SUBCASE("reflected element is inverted everywhere") {
    ElementCoords X = unit_cube_element();
    X.col(0) *= -1.0;
    CHECK_THROWS_AS(jacobian(X, Vector3::Zero()), InvertedElement);
    try {
      jacobian(X, Vector3::Zero(), 42);
    } catch (const InvertedElement& e) {
      CHECK(e.element_id == 42);
      CHECK(e.detG < 0.0);
    }
  }
}

TEST_CASE("dGinv_dxi matches finite differences on a curved element") {
  const ElementCoords X = curved_element();
  std::mt19937 rng(19);
  const double h = 1e-5;
  for (int trial = 0; trial < 8; ++trial) {
    const Vector3 xi = 0.8 * random_xi(rng);
    const JacobianData jd = jacobian(X, xi);
    for (int l = 0; l < 3; ++l) {
      Vector3 xp = xi, xm = xi;
      xp[l] += h;
      xm[l] -= h;
      const Matrix3 fd = (jacobian(X, xp).Ginv - jacobian(X, xm).Ginv) / (2 * h);
      const double scale = std::max(fd.cwiseAbs().maxCoeff(), 1e-8);
      CHECK((jd.dGinv_dxi[l] - fd).cwiseAbs().maxCoeff() / scale < 1e-6);
    }
  }
}

namespace {

struct Interpolated {
  double value;
  Vector3 grad;
  Matrix3 hess;
};

Interpolated interpolate(const ElementCoords& X, const Vector3& xi,
                         const Eigen::Matrix<double, 20, 1>& nodal) {
  const ShapeEval s = q2s_eval(xi);
  Eigen::Matrix<double, 20, 3> dN_dX;
  std::array<Matrix3, 20> d2N_dX2;
  physical_derivatives(X, s, dN_dX, d2N_dX2);
  Interpolated out{0.0, Vector3::Zero(), Matrix3::Zero()};
  for (int I = 0; I < 20; ++I) {
    out.value += s.N[I] * nodal[I];
    out.grad += dN_dX.row(I).transpose() * nodal[I];
    out.hess += d2N_dX2[I] * nodal[I];
  }
  return out;
}

}  // namespace

TEST_CASE("linear field reproduced exactly on curved element") {
  const ElementCoords X = curved_element();
  const Vector3 a(1.5, -2.0, 0.7);
  Eigen::Matrix<double, 20, 1> nodal;
  for (int I = 0; I < 20; ++I) nodal[I] = a.dot(X.row(I)) + 4.0;

  std::mt19937 rng(23);
  for (int trial = 0; trial < 6; ++trial) {
    const Vector3 xi = 0.9 * random_xi(rng);
    const Interpolated r = interpolate(X, xi, nodal);
    CHECK((r.grad - a).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(r.hess.cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("quadratic fields on affine element: exact value, gradient, Hessian") {
  Matrix3 A;
  A << 0.6, 0.1, 0.0, -0.2, 0.9, 0.05, 0.0, 0.1, 1.2;
  const ElementCoords X = affine_element(A, Vector3(0.3, -0.1, 0.6));

  // p(X) = X^T Q X + c . X + d with symmetric Q.
  Matrix3 Q;
  Q << 1.0, 0.5, -0.3, 0.5, -2.0, 0.8, -0.3, 0.8, 0.4;
  const Vector3 c(0.2, -1.0, 0.9);
  const double d = -2.5;
  Eigen::Matrix<double, 20, 1> nodal;
  for (int I = 0; I < 20; ++I) {
    const Vector3 p = X.row(I).transpose();
    nodal[I] = p.dot(Q * p) + c.dot(p) + d;
  }

  std::mt19937 rng(29);
  for (int trial = 0; trial < 8; ++trial) {
    const Vector3 xi = random_xi(rng);
    const Vector3 pX = A * xi + Vector3(0.3, -0.1, 0.6);
    const Interpolated r = interpolate(X, xi, nodal);
    const double exact = pX.dot(Q * pX) + c.dot(pX) + d;
    CHECK(r.value == doctest::Approx(exact).epsilon(1e-11));
    CHECK((r.grad - (2.0 * Q * pX + c)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((r.hess - 2.0 * Q).cwiseAbs().maxCoeff() < 1e-10);
  }

  SUBCASE("pure X^2 monomial") {
    for (int I = 0; I < 20; ++I) nodal[I] = X(I, 0) * X(I, 0);
    const Interpolated r = interpolate(X, Vector3(0.2, 0.4, -0.6), nodal);
    Matrix3 expect = Matrix3::Zero();
    expect(0, 0) = 2.0;
    CHECK((r.hess - expect).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("X*Y monomial: unit mixed second derivative") {
    for (int I = 0; I < 20; ++I) nodal[I] = X(I, 0) * X(I, 1);
    const Interpolated r = interpolate(X, Vector3(-0.3, 0.1, 0.7), nodal);
    Matrix3 expect = Matrix3::Zero();
    expect(0, 1) = expect(1, 0) = 1.0;
    CHECK((r.hess - expect).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("physical Hessian is symmetric on curved elements") {
  const ElementCoords X = curved_element();
  std::mt19937 rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::Matrix<double, 20, 3> dN_dX;
    std::array<Matrix3, 20> d2N_dX2;
    physical_derivatives(X, q2s_eval(0.9 * random_xi(rng)), dN_dX, d2N_dX2);
    for (int I = 0; I < 20; ++I)
      CHECK((d2N_dX2[I] - d2N_dX2[I].transpose()).cwiseAbs().maxCoeff() < 1e-10);
  }
}

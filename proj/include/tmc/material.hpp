#pragma once

#include <functional>

#include "tmc/types.hpp"

namespace tmc {

enum class RegKind { SkewGradient, FullGradient };
enum class DerivativeMode { Analytic, DualNumber };

struct SolidParams {
  double K = 20.0;  // bulk modulus
  double mu = 10.0; // shear modulus
};

struct ThirdMediumParams {
  double K = 20.0;
  double mu = 10.0;
  double gamma = 1e-5;    // stiffness scaling of the medium
  double alpha_r = 10.0;  // regularization weight
  double pbar = 0.0;      // pressure term: positive = suction, negative = inflation
  RegKind reg_kind = RegKind::SkewGradient;
};

/// Deformation measures at a material point. gradF holds the 27 components
/// H(i,j,k) = d^2 u_i / dX_j dX_k in the i + 3j + 9k flattening. For states
/// built from a displacement field gradF is symmetric in (j,k); the response
/// functions do not rely on that, so finite-difference probes may perturb the
/// 27 entries independently.
struct KinematicState {
  Matrix3 F = Matrix3::Identity();
  Vector27 gradF = Vector27::Zero();
  double J = 1.0;

  KinematicState() = default;
  KinematicState(const Matrix3& F_, const Vector27& gradF_)
      : F(F_), gradF(gradF_), J(F_.determinant()) {}

  double gradF_at(int i, int j, int k) const { return gradF[flat27(i, j, k)]; }
};

struct MaterialResponse {
  double psi = 0.0;
  Vector9 Phat = Vector9::Zero();    // d psi / d F
  Vector27 That = Vector27::Zero();  // d psi / d gradF
};

struct TangentBlocks {
  Matrix9 Chat = Matrix9::Zero();      // d2 psi / dF dF
  Matrix27x9 Ahat = Matrix27x9::Zero();// d2 psi / d gradF dF (rows: gradF slot)
  Matrix27 Bhat = Matrix27::Zero();    // d2 psi / d gradF d gradF
};

struct SolidResponse {
  double psi = 0.0;
  Vector9 Phat = Vector9::Zero();
  Matrix9 Chat = Matrix9::Zero();
};

// Energy densities.
double psi_solid(const Matrix3& F, const SolidParams& p);  // throws BarrierViolation at J <= 0
double psi_reg_skew(const Vector27& gradF, double gamma, double alpha_r);
double psi_reg_fullgrad(const Vector27& gradF, double gamma, double alpha_r);
double psi_pneumatic(double J, double pbar);
double psi_third_medium(const KinematicState& state, const ThirdMediumParams& p);

// Stress and tangent responses.
SolidResponse solid_response(const Matrix3& F, const SolidParams& p,
                             DerivativeMode mode = DerivativeMode::Analytic);
std::pair<MaterialResponse, TangentBlocks> third_medium_response(
    const KinematicState& state, const ThirdMediumParams& p,
    DerivativeMode mode = DerivativeMode::Analytic);

/// sigma = (1/J) P F^T.
Matrix3 cauchy_from_pk1(const Matrix3& F, const Vector9& Phat);

/// Central finite differences of an arbitrary energy functional over the
/// 9 + 27 kinematic entries; the independent backstop for the providers.
struct FdDerivatives {
  Vector9 Phat;
  Vector27 That;
  Matrix9 Chat;
  Matrix27x9 Ahat;
  Matrix27 Bhat;
};

using EnergyFn = std::function<double(const KinematicState&)>;

FdDerivatives fd_oracle(const EnergyFn& psi_fn, const KinematicState& state, double step);

/// First differences only (cheap path when tangents are not needed).
/// The gradF entries may use their own step: the regularization energies are
/// exactly quadratic in gradF, so a larger step there removes cancellation
/// noise without truncation cost.
void fd_gradient(const EnergyFn& psi_fn, const KinematicState& state, double step,
                 Vector9& Phat, Vector27& That);
void fd_gradient(const EnergyFn& psi_fn, const KinematicState& state, double step_F,
                 double step_gradF, Vector9& Phat, Vector27& That);

}  // namespace tmc

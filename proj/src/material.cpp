#include "tmc/material.hpp"

#include <array>
#include <cmath>

#include "tmc/dual.hpp"

namespace tmc {

namespace {

// Scalar-generic core energies. Arrays use the flat9/flat27 layouts so the
// same code serves double evaluation and dual-number propagation.
template <class T>
T det3(const std::array<T, 9>& f) {
  return f[flat9(0, 0)] * (f[flat9(1, 1)] * f[flat9(2, 2)] - f[flat9(1, 2)] * f[flat9(2, 1)]) -
         f[flat9(0, 1)] * (f[flat9(1, 0)] * f[flat9(2, 2)] - f[flat9(1, 2)] * f[flat9(2, 0)]) +
         f[flat9(0, 2)] * (f[flat9(1, 0)] * f[flat9(2, 1)] - f[flat9(1, 1)] * f[flat9(2, 0)]);
}

template <class T>
T neo_hookean_core(const std::array<T, 9>& f, double K, double mu) {
  using std::log;
  using std::pow;
  const T J = det3(f);
  const T lnJ = log(J);
  T I1 = 0.0;
  for (int m = 0; m < 9; ++m) I1 += f[m] * f[m];
  return 0.5 * K * lnJ * lnJ + 0.5 * mu * (pow(J, -2.0 / 3.0) * I1 - 3.0);
}

template <class T>
T reg_skew_core(const std::array<T, 27>& h, double gamma, double alpha_r) {
  // (alpha_r gamma / 2) sum_ijk (d f^skew_ij / dX_k)^2 with f^skew = (F - F^T)/2.
  T acc = 0.0;
  for (int k = 0; k < 3; ++k)
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 3; ++i) {
        const T d = h[flat27(i, j, k)] - h[flat27(j, i, k)];
        acc += d * d;
      }
  return (0.125 * alpha_r * gamma) * acc;
}

template <class T>
T reg_fullgrad_core(const std::array<T, 27>& h, double gamma, double alpha_r) {
  T sq = 0.0;
  for (int m = 0; m < 27; ++m) sq += h[m] * h[m];
  T divsq = 0.0;
  for (int i = 0; i < 3; ++i) {
    T d = 0.0;
    for (int j = 0; j < 3; ++j) d += h[flat27(i, j, j)];
    divsq += d * d;
  }
  return (0.5 * alpha_r * gamma) * (sq - (1.0 / 3.0) * divsq);
}

template <class T>
T third_medium_core(const std::array<T, 9>& f, const std::array<T, 27>& h,
                    const ThirdMediumParams& p) {
  using std::pow;
  T psi = p.gamma * neo_hookean_core(f, p.K, p.mu);
  psi += (p.reg_kind == RegKind::SkewGradient) ? reg_skew_core(h, p.gamma, p.alpha_r)
                                               : reg_fullgrad_core(h, p.gamma, p.alpha_r);
  if (p.pbar != 0.0) psi += p.pbar * det3(f);
  return psi;
}

std::array<double, 9> to_array9(const Matrix3& F) {
  std::array<double, 9> f;
  Eigen::Map<Vector9>(f.data()) = flatten(F);
  return f;
}

std::array<double, 27> to_array27(const Vector27& v) {
  std::array<double, 27> h;
  Eigen::Map<Vector27>(h.data()) = v;
  return h;
}

// Neo-Hookean first Piola-Kirchhoff stress and tangent, closed form.
void neo_hookean_pk1(const Matrix3& F, double K, double mu, Vector9& Phat, Matrix9* Chat) {
  const double J = F.determinant();
  const Matrix3 Fit = F.inverse().transpose();
  const double lnJ = std::log(J);
  const double I1 = F.squaredNorm();
  const double Jm23 = std::pow(J, -2.0 / 3.0);

  const Matrix3 P = K * lnJ * Fit + mu * Jm23 * (F - (I1 / 3.0) * Fit);
  Phat = flatten(P);
  if (!Chat) return;

  for (int L = 0; L < 3; ++L)
    for (int k = 0; k < 3; ++k) {
      const int n = flat9(k, L);
      for (int Jj = 0; Jj < 3; ++Jj)
        for (int i = 0; i < 3; ++i) {
          const double kd = (i == k && Jj == L) ? 1.0 : 0.0;
          double v = K * (Fit(i, Jj) * Fit(k, L) - lnJ * Fit(i, L) * Fit(k, Jj));
          v += mu * Jm23 *
               (kd - (2.0 / 3.0) * (Fit(k, L) * F(i, Jj) + F(k, L) * Fit(i, Jj)) +
                (2.0 / 9.0) * I1 * Fit(i, Jj) * Fit(k, L) + (I1 / 3.0) * Fit(i, L) * Fit(k, Jj));
          (*Chat)(flat9(i, Jj), n) = v;
        }
    }
}

// Pressure term pbar * J: stress pbar J F^-T and its tangent.
void pneumatic_pk1(const Matrix3& F, double pbar, Vector9& Phat, Matrix9* Chat) {
  const double J = F.determinant();
  const Matrix3 Fit = F.inverse().transpose();
  Phat = flatten(Matrix3(pbar * J * Fit));
  if (!Chat) return;
  for (int L = 0; L < 3; ++L)
    for (int k = 0; k < 3; ++k)
      for (int Jj = 0; Jj < 3; ++Jj)
        for (int i = 0; i < 3; ++i)
          (*Chat)(flat9(i, Jj), flat9(k, L)) +=
              pbar * J * (Fit(i, Jj) * Fit(k, L) - Fit(i, L) * Fit(k, Jj));
}

void reg_response(const Vector27& h, const ThirdMediumParams& p, Vector27& That, Matrix27* Bhat) {
  if (p.reg_kind == RegKind::SkewGradient) {
    const double s = 0.5 * p.alpha_r * p.gamma;
    for (int k = 0; k < 3; ++k)
      for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i)
          That[flat27(i, j, k)] = s * (h[flat27(i, j, k)] - h[flat27(j, i, k)]);
    if (Bhat) {
      for (int k = 0; k < 3; ++k)
        for (int j = 0; j < 3; ++j)
          for (int i = 0; i < 3; ++i) {
            (*Bhat)(flat27(i, j, k), flat27(i, j, k)) += s;
            (*Bhat)(flat27(i, j, k), flat27(j, i, k)) -= s;
          }
    }
  } else {
    const double ag = p.alpha_r * p.gamma;
    for (int i = 0; i < 3; ++i) {
      double div = 0.0;
      for (int j = 0; j < 3; ++j) div += h[flat27(i, j, j)];
      for (int k = 0; k < 3; ++k)
        for (int j = 0; j < 3; ++j)
          That[flat27(i, j, k)] = ag * (h[flat27(i, j, k)] - (j == k ? div / 3.0 : 0.0));
    }
    if (Bhat) {
      for (int m = 0; m < 27; ++m) (*Bhat)(m, m) += ag;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          for (int m = 0; m < 3; ++m)
            (*Bhat)(flat27(i, j, j), flat27(i, m, m)) -= ag / 3.0;
    }
  }
}

// Index alpha in [0,36): 0-8 map to F entries, 9-35 to gradF entries.
KinematicState perturbed(const KinematicState& s, int alpha, double delta) {
  KinematicState out = s;
  if (alpha < 9) {
    out.F(alpha % 3, alpha / 3) += delta;
    out.J = out.F.determinant();
  } else {
    out.gradF[alpha - 9] += delta;
  }
  return out;
}

}  // namespace

double psi_solid(const Matrix3& F, const SolidParams& p) {
  const double J = F.determinant();
  if (!(J > 0.0)) throw BarrierViolation(J);
  return neo_hookean_core(to_array9(F), p.K, p.mu);
}

double psi_reg_skew(const Vector27& gradF, double gamma, double alpha_r) {
  return reg_skew_core(to_array27(gradF), gamma, alpha_r);
}

double psi_reg_fullgrad(const Vector27& gradF, double gamma, double alpha_r) {
  return reg_fullgrad_core(to_array27(gradF), gamma, alpha_r);
}

double psi_pneumatic(double J, double pbar) {
  if (!(J > 0.0)) throw BarrierViolation(J);
  return pbar * J;
}

double psi_third_medium(const KinematicState& state, const ThirdMediumParams& p) {
  if (!(state.J > 0.0)) throw BarrierViolation(state.J);
  return third_medium_core(to_array9(state.F), to_array27(state.gradF), p);
}

SolidResponse solid_response(const Matrix3& F, const SolidParams& p, DerivativeMode mode) {
  const double J = F.determinant();
  if (!(J > 0.0)) throw BarrierViolation(J);

  SolidResponse r;
  r.psi = neo_hookean_core(to_array9(F), p.K, p.mu);

  if (mode == DerivativeMode::Analytic) {
    neo_hookean_pk1(F, p.K, p.mu, r.Phat, &r.Chat);
    return r;
  }

  // Dual-number propagation over the 9 F entries.
  const auto base = to_array9(F);
  for (int a = 0; a < 9; ++a)
    for (int b = a; b < 9; ++b) {
      std::array<Dual2, 9> f;
      for (int m = 0; m < 9; ++m) f[m] = base[m];
      f[a].d1 += 1.0;
      f[b].d2 += 1.0;
      const Dual2 psi = neo_hookean_core(f, p.K, p.mu);
      if (b == a) r.Phat[a] = psi.d1;
      r.Chat(a, b) = psi.d12;
      r.Chat(b, a) = psi.d12;
    }
  return r;
}

std::pair<MaterialResponse, TangentBlocks> third_medium_response(const KinematicState& state,
                                                                 const ThirdMediumParams& p,
                                                                 DerivativeMode mode) {
  if (!(state.J > 0.0)) throw BarrierViolation(state.J);

  MaterialResponse resp;
  TangentBlocks tan;
  resp.psi = third_medium_core(to_array9(state.F), to_array27(state.gradF), p);

  if (mode == DerivativeMode::Analytic) {
    Vector9 pm, pp;
    Matrix9 cm;
    neo_hookean_pk1(state.F, p.K, p.mu, pm, &cm);
    resp.Phat = p.gamma * pm;
    tan.Chat = p.gamma * cm;
    if (p.pbar != 0.0) {
      pneumatic_pk1(state.F, p.pbar, pp, &tan.Chat);
      resp.Phat += pp;
    }
    reg_response(state.gradF, p, resp.That, &tan.Bhat);
    // Neither energy term couples F with gradF, so Ahat stays zero.
    return {resp, tan};
  }

  const auto fbase = to_array9(state.F);
  const auto hbase = to_array27(state.gradF);
  for (int a = 0; a < 36; ++a)
    for (int b = a; b < 36; ++b) {
      std::array<Dual2, 9> f;
      std::array<Dual2, 27> h;
      for (int m = 0; m < 9; ++m) f[m] = fbase[m];
      for (int m = 0; m < 27; ++m) h[m] = hbase[m];
      auto seed = [&](int idx, double Dual2::* slot) {
        if (idx < 9)
          f[idx].*slot += 1.0;
        else
          h[idx - 9].*slot += 1.0;
      };
      seed(a, &Dual2::d1);
      seed(b, &Dual2::d2);
      const Dual2 psi = third_medium_core(f, h, p);
      if (b == a) {
        if (a < 9)
          resp.Phat[a] = psi.d1;
        else
          resp.That[a - 9] = psi.d1;
      }
      if (a < 9 && b < 9) {
        tan.Chat(a, b) = psi.d12;
        tan.Chat(b, a) = psi.d12;
      } else if (a < 9) {
        tan.Ahat(b - 9, a) = psi.d12;
      } else {
        tan.Bhat(a - 9, b - 9) = psi.d12;
        tan.Bhat(b - 9, a - 9) = psi.d12;
      }
    }
  return {resp, tan};
}

Matrix3 cauchy_from_pk1(const Matrix3& F, const Vector9& Phat) {
  const double J = F.determinant();
  if (!(J > 0.0)) throw BarrierViolation(J);
  return (1.0 / J) * unflatten9(Phat) * F.transpose();
}

void fd_gradient(const EnergyFn& psi_fn, const KinematicState& state, double step_F,
                 double step_gradF, Vector9& Phat, Vector27& That) {
  for (int a = 0; a < 36; ++a) {
    const double step = a < 9 ? step_F : step_gradF;
    const double plus = psi_fn(perturbed(state, a, step));
    const double minus = psi_fn(perturbed(state, a, -step));
    const double g = (plus - minus) / (2.0 * step);
    if (a < 9)
      Phat[a] = g;
    else
      That[a - 9] = g;
  }
}

void fd_gradient(const EnergyFn& psi_fn, const KinematicState& state, double step, Vector9& Phat,
                 Vector27& That) {
  fd_gradient(psi_fn, state, step, step, Phat, That);
}

FdDerivatives fd_oracle(const EnergyFn& psi_fn, const KinematicState& state, double step) {
  FdDerivatives out;
  fd_gradient(psi_fn, state, step, out.Phat, out.That);

  const double psi0 = psi_fn(state);
  if (!std::isfinite(psi0)) throw std::runtime_error("fd_oracle: non-finite energy at base state");

  Eigen::Matrix<double, 36, 36> hess;
  for (int a = 0; a < 36; ++a) {
    for (int b = a; b < 36; ++b) {
      double v;
      if (a == b) {
        const double plus = psi_fn(perturbed(state, a, step));
        const double minus = psi_fn(perturbed(state, a, -step));
        v = (plus - 2.0 * psi0 + minus) / (step * step);
      } else {
        const double pp = psi_fn(perturbed(perturbed(state, a, step), b, step));
        const double pm = psi_fn(perturbed(perturbed(state, a, step), b, -step));
        const double mp = psi_fn(perturbed(perturbed(state, a, -step), b, step));
        const double mm = psi_fn(perturbed(perturbed(state, a, -step), b, -step));
        v = (pp - pm - mp + mm) / (4.0 * step * step);
      }
      if (!std::isfinite(v)) throw std::runtime_error("fd_oracle: non-finite stencil evaluation");
      hess(a, b) = v;
      hess(b, a) = v;
    }
  }
  out.Chat = hess.block<9, 9>(0, 0);
  out.Ahat = hess.block<27, 9>(9, 0);
  out.Bhat = hess.block<27, 27>(9, 9);
  return out;
}

}  // namespace tmc

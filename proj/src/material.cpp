#include "tmc/material.hpp"

#include <cmath>

namespace tmc {

std::string regularization_to_string(RegularizationKind kind) {
  switch (kind) {
    case RegularizationKind::HuHu: return "huhu";
    case RegularizationKind::HuHuDeviatoric: return "huhu-dev";
    case RegularizationKind::RotationJacobian: return "rot-j";
    case RegularizationKind::TanRotationJacobian: return "tan-rot-j";
  }
  return "?";
}

RegularizationKind regularization_from_string(const std::string& s) {
  if (s == "huhu") return RegularizationKind::HuHu;
  if (s == "huhu-dev") return RegularizationKind::HuHuDeviatoric;
  if (s == "rot-j") return RegularizationKind::RotationJacobian;
  if (s == "tan-rot-j") return RegularizationKind::TanRotationJacobian;
  throw std::invalid_argument("unknown regularization kind '" + s + "'");
}

double psi_body(const Matrix3d& C, double K, double mu) {
  const double detC = C.determinant();
  if (!(detC > 0.0)) throw DegenerateState("psi_body: non-positive det C");
  const double J = std::sqrt(detC);
  const double lnJ = std::log(J);
  return 0.5 * K * lnJ * lnJ + 0.5 * mu * (std::pow(J, -2.0 / 3.0) * C.trace() - 3.0);
}

Matrix3d pk2_stress(const Matrix3d& C, double K, double mu) {
  const double detC = C.determinant();
  if (!(detC > 0.0)) throw DegenerateState("pk2_stress: non-positive det C");
  const double J = std::sqrt(detC);
  const double Jm23 = std::pow(J, -2.0 / 3.0);
  const Matrix3d Cinv = C.inverse();
  return K * std::log(J) * Cinv - (mu / 3.0) * Jm23 * C.trace() * Cinv +
         mu * Jm23 * Matrix3d::Identity();
}

Tensor3333 constitutive_body(const Matrix3d& C, double K, double mu) {
  const double detC = C.determinant();
  if (!(detC > 0.0)) throw DegenerateState("constitutive_body: non-positive det C");
  const double J = std::sqrt(detC);
  const double lnJ = std::log(J);
  const double Jm23 = std::pow(J, -2.0 / 3.0);
  const double trC = C.trace();
  const Matrix3d Ci = C.inverse();
  const Matrix3d I = Matrix3d::Identity();
  Tensor3333 D;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          const double Isym = 0.5 * (Ci(i, k) * Ci(j, l) + Ci(i, l) * Ci(j, k));
          D(i, j, k, l) = K * Ci(i, j) * Ci(k, l) - 2.0 * K * lnJ * Isym +
                          (2.0 * mu / 3.0) * Jm23 *
                              (-I(i, j) * Ci(k, l) - Ci(i, j) * I(k, l) +
                               trC * Ci(i, j) * Ci(k, l) / 3.0 + trC * Isym);
        }
  return D;
}

double rotation_angle(const Matrix2d& F) {
  const double trace = F(0, 0) + F(1, 1);
  if (std::abs(trace) <= 1e-12)
    throw DegenerateState("rotation_angle: vanishing trace of F");
  return std::atan((F(0, 1) - F(1, 0)) / trace);
}

Vector2d grad_J(const Matrix2d& F, const GradF& g) {
  const double detF = F.determinant();
  if (!(detF > 0.0)) throw DegenerateState("grad_J: singular F");
  Vector2d out;
  for (int k = 0; k < 2; ++k)
    out(k) = F(1, 1) * g(0, 0, k) - F(1, 0) * g(0, 1, k) - F(0, 1) * g(1, 0, k) +
             F(0, 0) * g(1, 1, k);
  return out;
}

Vector2d grad_rotation_angle(const Matrix2d& F, const GradF& g) {
  const double trace = F(0, 0) + F(1, 1);
  if (std::abs(trace) <= 1e-12)
    throw DegenerateState("grad_rotation_angle: vanishing trace of F");
  const double skew = F(0, 1) - F(1, 0);
  const double denom = trace * trace + skew * skew;
  Vector2d out;
  for (int k = 0; k < 2; ++k) {
    const double gn = g(0, 1, k) - g(1, 0, k);
    const double gd = g(0, 0, k) + g(1, 1, k);
    out(k) = (gn * trace - skew * gd) / denom;
  }
  return out;
}

double nabla_R_contraction(const Matrix2d& F, const GradF& gradF) {
  const double phi = rotation_angle(F);
  const Vector2d gphi = grad_rotation_angle(F, gradF);
  Matrix3d dR = Matrix3d::Zero();
  dR(0, 0) = -std::sin(phi);
  dR(0, 1) = -std::cos(phi);
  dR(1, 0) = std::cos(phi);
  dR(1, 1) = -std::sin(phi);
  double acc = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 2; ++k) {
        const double entry = dR(i, j) * gphi(k);
        acc += entry * entry;
      }
  return acc;
}

namespace {

std::array<double, 4> to_array(const Vector4d& v) { return {v(0), v(1), v(2), v(3)}; }

std::array<double, 8> to_array(const Vector8d& v) {
  std::array<double, 8> a;
  for (int i = 0; i < 8; ++i) a[i] = v(i);
  return a;
}

void check_medium_state(const Matrix2d& F) {
  if (!(F.determinant() > 1e-12))
    throw DegenerateState("third medium: det F below the admissibility floor");
  if (std::abs(F(0, 0) + F(1, 1)) <= 1e-12)
    throw DegenerateState("third medium: vanishing trace of F");
}

}  // namespace

double regularization(const Matrix2d& F, const GradF& gradF, RegularizationKind kind,
                      double beta) {
  if (!(F.determinant() > 0.0)) throw DegenerateState("regularization: singular F");
  if ((kind == RegularizationKind::RotationJacobian ||
       kind == RegularizationKind::TanRotationJacobian) &&
      std::abs(F(0, 0) + F(1, 1)) <= 1e-12)
    throw DegenerateState("regularization: vanishing trace of F");
  return regularization_energy(to_array(flatten_f(F)), to_array(gradF.hat), kind, beta);
}

MaterialPointState body_tensors(const Matrix2d& F, const BodyParams& body) {
  if (!(F.determinant() > 1e-12))
    throw DegenerateState("body: det F below the admissibility floor");
  using D4 = Dual2<4>;
  const Vector4d fh = flatten_f(F);
  std::array<D4, 4> vars;
  for (int i = 0; i < 4; ++i) vars[i] = D4::variable(fh(i), i);
  const D4 psi = body_energy(vars, body.K, body.mu);

  MaterialPointState s;
  s.F = F;
  s.psi = psi.val;
  s.P_hat = psi.grad;
  s.D_hat = psi.hess;
  return s;
}

MaterialPointState medium_tensors(const Matrix2d& F, const GradF& gradF,
                                  const ThirdMediumParams& medium) {
  check_medium_state(F);
  using D12 = Dual2<12>;
  const Vector4d fh = flatten_f(F);
  std::array<D12, 4> fv;
  for (int i = 0; i < 4; ++i) fv[i] = D12::variable(fh(i), i);
  std::array<D12, 8> gv;
  for (int i = 0; i < 8; ++i) gv[i] = D12::variable(gradF.hat(i), 4 + i);
  const D12 psi = medium_energy(fv, gv, medium);

  MaterialPointState s;
  s.F = F;
  s.gradF = gradF;
  s.psi = psi.val;
  s.P_hat = psi.grad.head<4>();
  s.T_hat = psi.grad.tail<8>();
  s.D_hat = psi.hess.topLeftCorner<4, 4>();
  s.A_hat = psi.hess.bottomLeftCorner<8, 4>();
  s.B_hat = psi.hess.bottomRightCorner<8, 8>();
  return s;
}

MaterialPointState evaluate_material(const Matrix2d& F, const GradF& gradF,
                                     const MaterialModel& model) {
  return model.kind == MaterialModel::Kind::Body ? body_tensors(F, model.body)
                                                 : medium_tensors(F, gradF, model.medium);
}

EnergyFn body_energy_fn(const BodyParams& body) {
  return [body](const std::array<long double, 12>& x) {
    const std::array<long double, 4> F{x[0], x[1], x[2], x[3]};
    return body_energy(F, body.K, body.mu);
  };
}

EnergyFn medium_energy_fn(const ThirdMediumParams& medium) {
  return [medium](const std::array<long double, 12>& x) {
    const std::array<long double, 4> F{x[0], x[1], x[2], x[3]};
    std::array<long double, 8> dF;
    for (int i = 0; i < 8; ++i) dF[i] = x[4 + i];
    return medium_energy(F, dF, medium);
  };
}

MaterialPointState fd_tensor_oracle(const EnergyFn& psi, const Matrix2d& F, const GradF& gradF,
                                    double step) {
  if (!(step > 0.0)) throw std::invalid_argument("fd_tensor_oracle: step must be positive");
  std::array<long double, 12> x0;
  const Vector4d fh = flatten_f(F);
  for (int i = 0; i < 4; ++i) x0[i] = fh(i);
  for (int i = 0; i < 8; ++i) x0[4 + i] = gradF.hat(i);

  const long double h = step;
  auto eval = [&](int i, long double di, int j, long double dj) {
    auto x = x0;
    x[i] += di;
    if (j >= 0) x[j] += dj;
    const long double v = psi(x);
    if (!std::isfinite(static_cast<double>(v)))
      throw std::runtime_error("fd_tensor_oracle: non-finite energy at probe point");
    return v;
  };

  const long double f0 = psi(x0);
  Eigen::Matrix<double, 12, 1> grad;
  Eigen::Matrix<double, 12, 12> hess;
  for (int i = 0; i < 12; ++i) {
    const long double fp = eval(i, h, -1, 0);
    const long double fm = eval(i, -h, -1, 0);
    grad(i) = static_cast<double>((fp - fm) / (2 * h));
    hess(i, i) = static_cast<double>((fp - 2 * f0 + fm) / (h * h));
    for (int j = i + 1; j < 12; ++j) {
      const long double fpp = eval(i, h, j, h);
      const long double fpm = eval(i, h, j, -h);
      const long double fmp = eval(i, -h, j, h);
      const long double fmm = eval(i, -h, j, -h);
      hess(i, j) = hess(j, i) = static_cast<double>((fpp - fpm - fmp + fmm) / (4 * h * h));
    }
  }

  MaterialPointState s;
  s.F = F;
  s.gradF = gradF;
  s.psi = static_cast<double>(f0);
  s.P_hat = grad.head<4>();
  s.T_hat = grad.tail<8>();
  s.D_hat = hess.topLeftCorner<4, 4>();
  s.A_hat = hess.bottomLeftCorner<8, 4>();
  s.B_hat = hess.bottomRightCorner<8, 8>();
  return s;
}

}  // namespace tmc

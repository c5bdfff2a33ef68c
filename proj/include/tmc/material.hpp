#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "tmc/dual.hpp"
#include "tmc/types.hpp"

namespace tmc {

// ---------------------------------------------------------------------------
// Flattening conventions, shared by material and assembly.
// F_hat  = [F11, F21, F12, F22]
// gF_hat = [F11,1 F21,1 F12,1 F22,1 F11,2 F21,2 F12,2 F22,2]
// with F_ij = du_i/dX_j + delta_ij and F_ij,k = dF_ij/dX_k (all 0-based
// in code).
// ---------------------------------------------------------------------------

inline int f_hat_index(int i, int j) { return 2 * j + i; }
inline int grad_f_hat_index(int i, int j, int k) { return 4 * k + 2 * j + i; }

inline Vector4d flatten_f(const Matrix2d& F) {
  Vector4d v;
  for (int j = 0; j < 2; ++j)
    for (int i = 0; i < 2; ++i) v(f_hat_index(i, j)) = F(i, j);
  return v;
}

inline Matrix2d unflatten_f(const Vector4d& v) {
  Matrix2d F;
  for (int j = 0; j < 2; ++j)
    for (int i = 0; i < 2; ++i) F(i, j) = v(f_hat_index(i, j));
  return F;
}

/// Gradient of the deformation gradient, stored flattened.
struct GradF {
  Vector8d hat = Vector8d::Zero();

  double operator()(int i, int j, int k) const { return hat(grad_f_hat_index(i, j, k)); }
  double& operator()(int i, int j, int k) { return hat(grad_f_hat_index(i, j, k)); }
};

// ---------------------------------------------------------------------------
// Models
// ---------------------------------------------------------------------------

enum class RegularizationKind { HuHu, HuHuDeviatoric, RotationJacobian, TanRotationJacobian };

std::string regularization_to_string(RegularizationKind kind);
RegularizationKind regularization_from_string(const std::string& s);

struct BodyParams {
  double K = 1.0;
  double mu = 1.0;
};

struct ThirdMediumParams {
  double gamma = 1e-5;
  double alpha_r = 1.0;
  double beta = 0.0;  // 0 disables the exponential scaling factor
  RegularizationKind reg = RegularizationKind::HuHuDeviatoric;
  double mu = 1.0;
  double K = 1.0;  // inert: the volumetric term is dropped for the medium
};

struct MaterialModel {
  enum class Kind { Body, ThirdMedium };
  Kind kind = Kind::Body;
  BodyParams body;
  ThirdMediumParams medium;

  static MaterialModel make_body(double K, double mu) {
    MaterialModel m;
    m.kind = Kind::Body;
    m.body = {K, mu};
    return m;
  }
  static MaterialModel make_medium(const ThirdMediumParams& p) {
    MaterialModel m;
    m.kind = Kind::ThirdMedium;
    m.medium = p;
    return m;
  }
};

/// Recoverable material failure (near-singular deformation state); the
/// solver turns it into a load-step reduction.
class DegenerateState : public std::runtime_error {
 public:
  explicit DegenerateState(const std::string& what, int element = -1)
      : std::runtime_error(what), element(element) {}
  int element;
};

/// Energy density and its flattened derivative blocks at one material point.
struct MaterialPointState {
  Matrix2d F = Matrix2d::Identity();
  GradF gradF;
  double psi = 0.0;
  Vector4d P_hat = Vector4d::Zero();
  Vector8d T_hat = Vector8d::Zero();
  Matrix4d D_hat = Matrix4d::Zero();
  Matrix84d A_hat = Matrix84d::Zero();
  Matrix8d B_hat = Matrix8d::Zero();
};

// ---------------------------------------------------------------------------
// Scalar-generic energy densities (S = double, long double or Dual2<N>).
// The in-plane F is embedded as plane strain: F33 = 1, so tr C picks up +1
// and J equals the 2x2 determinant.
// ---------------------------------------------------------------------------

template <class S>
S plane_strain_det(const std::array<S, 4>& F) {
  return F[0] * F[3] - F[2] * F[1];
}

template <class S>
S isochoric_energy(const std::array<S, 4>& F, double mu) {
  using std::log;
  using std::pow;
  const S J = plane_strain_det(F);
  const S trC = F[0] * F[0] + F[1] * F[1] + F[2] * F[2] + F[3] * F[3] + 1.0;
  return 0.5 * mu * (pow(J, -2.0 / 3.0) * trC - 3.0);
}

template <class S>
S body_energy(const std::array<S, 4>& F, double K, double mu) {
  using std::log;
  const S lnJ = log(plane_strain_det(F));
  return 0.5 * K * lnJ * lnJ + isochoric_energy(F, mu);
}

template <class S>
S regularization_energy(const std::array<S, 4>& F, const std::array<S, 8>& dF,
                        RegularizationKind kind, double beta) {
  using std::exp;
  S q;
  switch (kind) {
    case RegularizationKind::HuHu:
    case RegularizationKind::HuHuDeviatoric: {
      S full = dF[0] * dF[0];
      for (int a = 1; a < 8; ++a) full = full + dF[a] * dF[a];
      if (kind == RegularizationKind::HuHu) {
        q = 0.5 * full;
      } else {
        // Div(grad u)_i = dF_i1,1 + dF_i2,2; n_dim = 2.
        const S lu1 = dF[grad_f_hat_index(0, 0, 0)] + dF[grad_f_hat_index(0, 1, 1)];
        const S lu2 = dF[grad_f_hat_index(1, 0, 0)] + dF[grad_f_hat_index(1, 1, 1)];
        q = 0.5 * (full - 0.5 * (lu1 * lu1 + lu2 * lu2));
      }
      break;
    }
    case RegularizationKind::RotationJacobian:
    case RegularizationKind::TanRotationJacobian: {
      // tan(phi) = (F12 - F21) / (F11 + F22); spatial gradients by the
      // chain rule through F. grad J uses the cofactor contraction.
      const S trace = F[0] + F[3];
      const S skew = F[2] - F[1];
      S acc(0.0);
      for (int k = 0; k < 2; ++k) {
        const S gn = dF[4 * k + 2] - dF[4 * k + 1];
        const S gd = dF[4 * k + 0] + dF[4 * k + 3];
        const S num = gn * trace - skew * gd;
        const S g = kind == RegularizationKind::RotationJacobian
                        ? num / (trace * trace + skew * skew)
                        : num / (trace * trace);
        const S gj = F[3] * dF[4 * k + 0] - F[1] * dF[4 * k + 2] - F[2] * dF[4 * k + 1] +
                     F[0] * dF[4 * k + 3];
        acc = acc + g * g + gj * gj;
      }
      q = 0.5 * acc;
      break;
    }
    default:
      throw std::logic_error("unknown regularization kind");
  }
  if (beta > 0.0) q = q * exp(-beta * plane_strain_det(F));
  return q;
}

template <class S>
S medium_energy(const std::array<S, 4>& F, const std::array<S, 8>& dF,
                const ThirdMediumParams& m) {
  return m.gamma *
         (isochoric_energy(F, m.mu) + m.alpha_r * regularization_energy(F, dF, m.reg, m.beta));
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Compressible strain energy on the right Cauchy-Green tensor (plane-strain
/// embedded 3x3 with C33 = 1).
double psi_body(const Matrix3d& C, double K, double mu);

/// Closed-form second Piola-Kirchhoff stress (oracle for the AD path).
Matrix3d pk2_stress(const Matrix3d& C, double K, double mu);

struct Tensor3333 {
  std::array<double, 81> v{};
  double& operator()(int i, int j, int k, int l) { return v[27 * i + 9 * j + 3 * k + l]; }
  double operator()(int i, int j, int k, int l) const { return v[27 * i + 9 * j + 3 * k + l]; }
};

/// Closed-form constitutive tensor D = 2 dS/dC.
Tensor3333 constitutive_body(const Matrix3d& C, double K, double mu);

/// phi = arctan((F12 - F21) / (F11 + F22)); throws DegenerateState on a
/// vanishing trace.
double rotation_angle(const Matrix2d& F);

/// grad J = det(F) F^-T : grad F (cofactor contraction, division-free).
Vector2d grad_J(const Matrix2d& F, const GradF& gradF);

Vector2d grad_rotation_angle(const Matrix2d& F, const GradF& gradF);

/// Triple contraction grad R : grad R from the explicit 3x3 rotation matrix
/// derivative; equals 2 |grad phi|^2.
double nabla_R_contraction(const Matrix2d& F, const GradF& gradF);

/// Selected regularization density (with exponential scaling when beta > 0).
double regularization(const Matrix2d& F, const GradF& gradF, RegularizationKind kind,
                      double beta);

/// Full derivative blocks by forward AD over the scalar energy.
MaterialPointState body_tensors(const Matrix2d& F, const BodyParams& body);
MaterialPointState medium_tensors(const Matrix2d& F, const GradF& gradF,
                                  const ThirdMediumParams& medium);
MaterialPointState evaluate_material(const Matrix2d& F, const GradF& gradF,
                                     const MaterialModel& model);

/// Scalar energy as a function of the 12 flattened arguments, evaluated in
/// extended precision for the finite-difference oracle.
using EnergyFn = std::function<long double(const std::array<long double, 12>&)>;

EnergyFn body_energy_fn(const BodyParams& body);
EnergyFn medium_energy_fn(const ThirdMediumParams& medium);

/// Central finite differences of `psi` with respect to all 12 arguments,
/// flattened identically to the AD path. Test oracle, never the production
/// path.
MaterialPointState fd_tensor_oracle(const EnergyFn& psi, const Matrix2d& F, const GradF& gradF,
                                    double step);

}  // namespace tmc

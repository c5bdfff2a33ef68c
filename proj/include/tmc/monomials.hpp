#pragma once

#include <vector>

#include "tmc/types.hpp"

namespace tmc {

/// Scaled monomials m_a(x) = ((x-xc)/h)^a1 ((y-yc)/h)^a2, ordered by total
/// degree, then by decreasing x-power: 1, xi, eta, xi^2, xi*eta, eta^2, ...
struct ScaledMonomialBasis {
  Vector2d centroid = Vector2d::Zero();
  double diameter = 1.0;
  int order = 0;

  int size() const { return (order + 1) * (order + 2) / 2; }
};

inline int monomial_count(int order) { return (order + 1) * (order + 2) / 2; }

/// Exponent pairs (a1, a2) in basis order.
const std::vector<std::pair<int, int>>& monomial_exponents(int order);

VectorXd monomial_values(const ScaledMonomialBasis& basis, const Vector2d& x);

/// n x 2 matrix, row a = grad m_a(x).
MatrixXd monomial_gradients(const ScaledMonomialBasis& basis, const Vector2d& x);

/// Hessians of all members at x; entry a is the symmetric 2x2 Hessian.
std::vector<Matrix2d> monomial_hessians(const ScaledMonomialBasis& basis, const Vector2d& x);

/// Laplacian of each member (constant for order <= 2, position-dependent above).
VectorXd monomial_laplacians(const ScaledMonomialBasis& basis, const Vector2d& x);

}  // namespace tmc

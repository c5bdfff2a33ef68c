#pragma once

#include <functional>

#include "tmc/dofs.hpp"
#include "tmc/monomials.hpp"
#include "tmc/quadrature.hpp"

namespace tmc {

/// Ansatz order of the method. The DOF layout, edge traces and projector
/// construction are specific to k = 2.
constexpr int kAnsatzOrder = 2;

/// Smallest enlargement order l >= k+1 with N_E <= 2l - 2k + 5.
int choose_l(int n_vertices, int k = kAnsatzOrder);

/// Evaluation of the volume term of the L2 gradient projector: the constant
/// part of div p always uses the exact moment; the remainder uses either the
/// order-k H1 projection (default) or the order-1 one.
enum class VolumeTerm { ExactMomentPlusPiK, Pi1 };

struct OperatorOptions {
  int quadrature_degree = 0;  // 0 = default 2l + 2
  VolumeTerm volume_term = VolumeTerm::ExactMomentPlusPiK;
};

/// Per-element projection matrices and quadrature. Immutable once built;
/// construction is independent per element.
struct ElementOperators {
  int element = -1;
  int n_vertices = 0;
  int l = 3;
  ElementGeometry geom;
  ScaledMonomialBasis basis_k;
  ScaledMonomialBasis basis_l;
  ElementDofs dofs;
  MatrixXd pi_nabla;  // monomial_count(k) x (2N+1)
  MatrixXd pi_m;      // 2 monomial_count(l) x (2N+1)
  QuadratureRule quadrature;

  int n_scalar() const { return 2 * n_vertices + 1; }
  int n_vector() const { return 4 * n_vertices + 2; }

  /// 4 x n_vector map from interleaved vector DOFs to the flattened
  /// displacement gradient [du_x/dx, du_y/dx, du_x/dy, du_y/dy] at x.
  MatrixXd b1(const Vector2d& x) const;

  /// 8 x n_vector map to the flattened second derivatives
  /// [u_x,xx  u_y,xx  u_x,yx  u_y,yx  u_x,xy  u_y,xy  u_x,yy  u_y,yy] at x.
  MatrixXd b2(const Vector2d& x) const;
};

/// H1 projector of order `proj_order` (<= k) onto the scaled monomials:
/// weak gradient match via integration by parts plus the mean-value
/// constraint carried by the moment DOF. Returns monomial_count(order) x
/// (2N+1).
MatrixXd h1_projector(const ElementDofs& dofs, const ElementGeometry& geom, int proj_order,
                      const QuadratureRule& volume_rule);

/// Enlarged L2 gradient projector onto [P_l]^2; rows 0..n_l-1 are the
/// x-component coefficients, rows n_l.. the y-component ones.
MatrixXd l2_gradient_projector(const ElementDofs& dofs, const ElementGeometry& geom, int l,
                               const MatrixXd& pi_volume, int pi_volume_order,
                               const QuadratureRule& volume_rule);

ElementOperators build_element_operators(const PolygonalMesh& mesh, const GlobalDofMap& dofmap,
                                         int element, const OperatorOptions& options = {});

/// All elements; parallel over elements when threads > 1, deterministic
/// output either way.
std::vector<ElementOperators> build_all_operators(const PolygonalMesh& mesh,
                                                  const GlobalDofMap& dofmap,
                                                  const OperatorOptions& options = {},
                                                  int threads = 1);

/// DOF vector of a scalar field under the k = 2 layout (vertex values, edge
/// midpoint values, mean over the element computed with the volume rule).
VectorXd scalar_dof_vector(const ElementDofs& dofs, const QuadratureRule& volume_rule,
                           double area, const std::function<double(const Vector2d&)>& f);

}  // namespace tmc

#pragma once

#include <span>
#include <vector>

#include "tmc/types.hpp"

namespace tmc {

/// Points and positive weights; weights sum to the measure of the domain
/// (polygon area or edge length).
struct QuadratureRule {
  MatrixXd points;   // n x 2
  VectorXd weights;  // n

  int size() const { return static_cast<int>(weights.size()); }
  Vector2d point(int q) const { return points.row(q).transpose(); }
};

/// Gauss-Legendre nodes/weights on [-1, 1].
void gauss_legendre(int n, VectorXd& nodes, VectorXd& weights);

/// Rule on the triangle (a, b, c), exact for polynomials up to `degree`.
/// All weights positive.
QuadratureRule triangle_quadrature(const Vector2d& a, const Vector2d& b, const Vector2d& c,
                                   int degree);

/// Centroid-fan rule over a CCW polygon; exact to `degree` for star-shaped
/// (w.r.t. centroid) polygons. Throws std::invalid_argument when a fan
/// triangle degenerates.
QuadratureRule polygon_quadrature(std::span<const Vector2d> ring, int degree);

/// Gauss rule on the segment [a, b], exact to `degree`.
QuadratureRule edge_quadrature(const Vector2d& a, const Vector2d& b, int degree);

double polygon_area(std::span<const Vector2d> ring);
Vector2d polygon_centroid(std::span<const Vector2d> ring);
double polygon_diameter(std::span<const Vector2d> ring);

}  // namespace tmc

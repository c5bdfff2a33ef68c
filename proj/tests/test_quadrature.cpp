#include <doctest.h>

#include <cmath>

#include "tmc/monomials.hpp"
#include "tmc/quadrature.hpp"

using namespace tmc;

namespace {

double integrate(const QuadratureRule& rule, const std::function<double(const Vector2d&)>& f) {
  double s = 0.0;
  for (int q = 0; q < rule.size(); ++q) s += rule.weights(q) * f(rule.point(q));
  return s;
}

// Exact integral of x^p y^q over [0,1]^2.
double square_monomial_integral(int p, int q) { return 1.0 / ((p + 1) * (q + 1)); }

const std::vector<Vector2d> kUnitSquare{{0, 0}, {1, 0}, {1, 1}, {0, 1}};

std::vector<Vector2d> regular_polygon(int n, double radius) {
  std::vector<Vector2d> ring;
  for (int i = 0; i < n; ++i) {
    const double a = 2.0 * M_PI * i / n;
    ring.emplace_back(radius * std::cos(a), radius * std::sin(a));
  }
  return ring;
}

}  // namespace

TEST_CASE("monomial values, gradients and Hessians") {
  ScaledMonomialBasis basis{{0.25, -0.5}, 2.0, 3};
  CHECK(basis.size() == 10);

  // m_0 = 1 everywhere; at the centroid all higher members vanish.
  VectorXd at_c = monomial_values(basis, basis.centroid);
  CHECK(at_c(0) == 1.0);
  for (int a = 1; a < basis.size(); ++a) CHECK(at_c(a) == 0.0);

  const Vector2d x{1.0, 0.75};
  // d(xi)/dx = 1/h everywhere.
  MatrixXd g = monomial_gradients(basis, x);
  CHECK(g(1, 0) == doctest::Approx(1.0 / basis.diameter));
  CHECK(g(1, 1) == 0.0);
  CHECK(g(2, 0) == 0.0);
  CHECK(g(2, 1) == doctest::Approx(1.0 / basis.diameter));

  // Hessian of xi*eta: off-diagonal 1/h^2, diagonal 0.
  auto hess = monomial_hessians(basis, x);
  const double h2 = basis.diameter * basis.diameter;
  CHECK(hess[4](0, 1) == doctest::Approx(1.0 / h2));
  CHECK(hess[4](1, 0) == doctest::Approx(1.0 / h2));
  CHECK(hess[4](0, 0) == 0.0);
  CHECK(hess[4](1, 1) == 0.0);

  // Hessians match central differences of the gradients.
  ScaledMonomialBasis b2{{0.1, 0.2}, 0.7, 3};
  const double step = 1e-5 * b2.diameter;
  const Vector2d y{0.3, -0.1};
  auto hs = monomial_hessians(b2, y);
  for (int c = 0; c < 2; ++c) {
    Vector2d dy = Vector2d::Zero();
    dy(c) = step;
    MatrixXd gp = monomial_gradients(b2, y + dy);
    MatrixXd gm = monomial_gradients(b2, y - dy);
    MatrixXd fd = (gp - gm) / (2 * step);
    for (int a = 0; a < b2.size(); ++a)
      for (int d = 0; d < 2; ++d)
        CHECK(hs[a](d, c) == doctest::Approx(fd(a, d)).epsilon(1e-6));
  }
}

TEST_CASE("gauss-legendre exactness on an edge") {
  // x over (0,0)-(1,0) -> 1/2; constant over length L -> L.
  auto r = edge_quadrature({0, 0}, {1, 0}, 3);
  CHECK(integrate(r, [](const Vector2d& p) { return p.x(); }) == doctest::Approx(0.5));
  auto r2 = edge_quadrature({1, 2}, {4, 6}, 1);
  CHECK(r2.weights.sum() == doctest::Approx(5.0));
  // x^5 with a degree-5 rule -> 1/6 within 1e-14.
  auto r5 = edge_quadrature({0, 0}, {1, 0}, 5);
  CHECK(integrate(r5, [](const Vector2d& p) { return std::pow(p.x(), 5); }) ==
        doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  CHECK_THROWS_AS(edge_quadrature({1, 1}, {1, 1}, 3), std::invalid_argument);
}

TEST_CASE("polygon quadrature on the unit square") {
  auto rule = polygon_quadrature(kUnitSquare, 4);
  CHECK(rule.weights.sum() == doctest::Approx(1.0));
  CHECK(rule.weights.minCoeff() > 0.0);
  CHECK(integrate(rule, [](const Vector2d& p) {
          return p.x() * p.x() * p.y() * p.y();
        }) == doctest::Approx(1.0 / 9.0).epsilon(1e-14));
}

TEST_CASE("triangle rules are exact vs closed-form square integrals") {
  // Every requested degree up to 12 integrates all monomials of that degree
  // exactly on a square split by the centroid fan.
  for (int degree = 1; degree <= 12; ++degree) {
    auto rule = polygon_quadrature(kUnitSquare, degree);
    CHECK(rule.weights.minCoeff() > 0.0);
    for (int p = 0; p + 0 <= degree; ++p)
      for (int q = 0; p + q <= degree; ++q) {
        const double got = integrate(rule, [&](const Vector2d& pt) {
          return std::pow(pt.x(), p) * std::pow(pt.y(), q);
        });
        CHECK(got == doctest::Approx(square_monomial_integral(p, q)).epsilon(1e-12));
      }
  }
}

TEST_CASE("pentagon monomial products match a high-degree oracle rule") {
  const auto ring = regular_polygon(5, 1.0);
  ScaledMonomialBasis basis{polygon_centroid(ring), polygon_diameter(ring), 3};
  auto rule = polygon_quadrature(ring, 6);
  auto oracle = polygon_quadrature(ring, 12);
  const int n = basis.size();
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) {
      auto f = [&](const Vector2d& p) {
        const VectorXd m = monomial_values(basis, p);
        return m(a) * m(b);
      };
      CHECK(integrate(rule, f) == doctest::Approx(integrate(oracle, f)).epsilon(1e-12));
    }
}

TEST_CASE("non-star-shaped polygon is rejected") {
  // Strongly non-convex chevron whose centroid falls outside.
  std::vector<Vector2d> ring{{0, 0}, {4, 0}, {4, 3}, {3.9, 0.1}, {0.1, 0.1}};
  CHECK_THROWS_AS(polygon_quadrature(ring, 2), std::invalid_argument);
}

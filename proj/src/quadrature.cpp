#include "tmc/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace tmc {

void gauss_legendre(int n, VectorXd& nodes, VectorXd& weights) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n >= 1 required");
  nodes.resize(n);
  weights.resize(n);
  // Newton on P_n with Chebyshev-like initial guesses; symmetric pairs.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double p0 = 0.0, p1 = 0.0;
    for (int it = 0; it < 100; ++it) {
      p0 = 1.0;
      p1 = 0.0;
      for (int k = 0; k < n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2 * k + 1) * x * p1 - k * p2) / (k + 1);
      }
      const double dp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // p0 = P_n(x) ~ 0; recompute derivative at the converged root.
    p0 = 1.0;
    p1 = 0.0;
    for (int k = 0; k < n; ++k) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2 * k + 1) * x * p1 - k * p2) / (k + 1);
    }
    const double dp = n * (x * p0 - p1) / (x * x - 1.0);
    nodes(i) = -x;
    nodes(n - 1 - i) = x;
    weights(i) = weights(n - 1 - i) = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  if (n % 2 == 1) nodes((n - 1) / 2) = 0.0;
}

namespace {

// Reference-triangle rules in barycentric orbits, positive weights only.
// Weights are fractions of the triangle area.
struct BaryRule {
  std::vector<Vector2d> pts;  // reference coords on T = {(0,0),(1,0),(0,1)}
  std::vector<double> w;      // sums to 1
};

void add_orbit1(BaryRule& r, double w) {
  r.pts.emplace_back(1.0 / 3.0, 1.0 / 3.0);
  r.w.push_back(w);
}

// Permutations of (a, a, 1-2a).
void add_orbit3(BaryRule& r, double a, double w) {
  const double b = 1.0 - 2.0 * a;
  r.pts.emplace_back(a, a);
  r.pts.emplace_back(b, a);
  r.pts.emplace_back(a, b);
  for (int i = 0; i < 3; ++i) r.w.push_back(w);
}

const BaryRule& symmetric_rule(int degree) {
  static std::mutex mutex;
  static std::map<int, BaryRule> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(degree);
  if (it != cache.end()) return it->second;
  BaryRule r;
  switch (degree) {
    case 0:
    case 1:
      add_orbit1(r, 1.0);
      break;
    case 2:
      add_orbit3(r, 1.0 / 6.0, 1.0 / 3.0);
      break;
    case 3:
    case 4:
      add_orbit3(r, 0.445948490915965, 0.223381589678011);
      add_orbit3(r, 0.091576213509771, 0.109951743655322);
      break;
    case 5:
      add_orbit1(r, 0.225);
      add_orbit3(r, 0.470142064105115, 0.132394152788506);
      add_orbit3(r, 0.101286507323456, 0.125939180544827);
      break;
    default:
      throw std::logic_error("symmetric_rule: degree > 5");
  }
  return cache.emplace(degree, std::move(r)).first->second;
}

// Duffy (collapsed tensor) rule on the reference triangle. The map
// (u, v) -> (u, v (1 - u)) carries [0,1]^2 onto T with Jacobian (1 - u),
// so an integrand of degree d needs Gauss order covering d+1 in u.
BaryRule collapsed_rule(int degree) {
  const int nu = (degree + 3) / 2;  // 2*nu - 1 >= degree + 1
  const int nv = (degree + 2) / 2;  // 2*nv - 1 >= degree
  VectorXd xu, wu, xv, wv;
  gauss_legendre(nu, xu, wu);
  gauss_legendre(std::max(nv, 1), xv, wv);
  BaryRule r;
  for (int i = 0; i < xu.size(); ++i) {
    const double u = 0.5 * (xu(i) + 1.0);
    for (int j = 0; j < xv.size(); ++j) {
      const double v = 0.5 * (xv(j) + 1.0);
      r.pts.emplace_back(u, v * (1.0 - u));
      r.w.push_back(0.25 * wu(i) * wv(j) * (1.0 - u) * 2.0);
    }
  }
  return r;
}

const BaryRule& reference_rule(int degree) {
  if (degree <= 5) return symmetric_rule(std::max(degree, 0));
  static std::mutex mutex;
  static std::map<int, BaryRule> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(degree);
  if (it != cache.end()) return it->second;
  return cache.emplace(degree, collapsed_rule(degree)).first->second;
}

}  // namespace

QuadratureRule triangle_quadrature(const Vector2d& a, const Vector2d& b, const Vector2d& c,
                                   int degree) {
  const BaryRule& ref = reference_rule(degree);
  const double area2 = (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x();
  QuadratureRule rule;
  const int n = static_cast<int>(ref.pts.size());
  rule.points.resize(n, 2);
  rule.weights.resize(n);
  for (int q = 0; q < n; ++q) {
    const Vector2d p = a + ref.pts[q].x() * (b - a) + ref.pts[q].y() * (c - a);
    rule.points.row(q) = p.transpose();
    rule.weights(q) = ref.w[q] * 0.5 * area2;
  }
  return rule;
}

double polygon_area(std::span<const Vector2d> ring) {
  double s = 0.0;
  const int n = static_cast<int>(ring.size());
  for (int i = 0; i < n; ++i) {
    const Vector2d& p = ring[i];
    const Vector2d& q = ring[(i + 1) % n];
    s += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * s;
}

Vector2d polygon_centroid(std::span<const Vector2d> ring) {
  const int n = static_cast<int>(ring.size());
  double a = 0.0;
  Vector2d c = Vector2d::Zero();
  for (int i = 0; i < n; ++i) {
    const Vector2d& p = ring[i];
    const Vector2d& q = ring[(i + 1) % n];
    const double cross = p.x() * q.y() - q.x() * p.y();
    a += cross;
    c += cross * (p + q);
  }
  return c / (3.0 * a);
}

double polygon_diameter(std::span<const Vector2d> ring) {
  double d = 0.0;
  const int n = static_cast<int>(ring.size());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) d = std::max(d, (ring[i] - ring[j]).norm());
  return d;
}

QuadratureRule polygon_quadrature(std::span<const Vector2d> ring, int degree) {
  const int n = static_cast<int>(ring.size());
  if (n < 3) throw std::invalid_argument("polygon_quadrature: ring too short");
  const Vector2d c = polygon_centroid(ring);
  const double area = polygon_area(ring);
  std::vector<QuadratureRule> parts;
  parts.reserve(n);
  int total = 0;
  for (int i = 0; i < n; ++i) {
    const Vector2d& a = ring[i];
    const Vector2d& b = ring[(i + 1) % n];
    const double tri2 = (a - c).x() * (b - c).y() - (a - c).y() * (b - c).x();
    if (!(tri2 > 1e-14 * std::abs(area)))
      throw std::invalid_argument("polygon_quadrature: not star-shaped w.r.t. centroid");
    parts.push_back(triangle_quadrature(c, a, b, degree));
    total += parts.back().size();
  }
  QuadratureRule rule;
  rule.points.resize(total, 2);
  rule.weights.resize(total);
  int at = 0;
  for (const auto& part : parts) {
    rule.points.middleRows(at, part.size()) = part.points;
    rule.weights.segment(at, part.size()) = part.weights;
    at += part.size();
  }
  return rule;
}

QuadratureRule edge_quadrature(const Vector2d& a, const Vector2d& b, int degree) {
  const double len = (b - a).norm();
  if (!(len > 0.0)) throw std::invalid_argument("edge_quadrature: zero-length edge");
  const int n = std::max(1, (degree + 2) / 2);  // 2n - 1 >= degree
  VectorXd x, w;
  gauss_legendre(n, x, w);
  QuadratureRule rule;
  rule.points.resize(n, 2);
  rule.weights.resize(n);
  for (int q = 0; q < n; ++q) {
    const double s = 0.5 * (x(q) + 1.0);
    rule.points.row(q) = ((1.0 - s) * a + s * b).transpose();
    rule.weights(q) = 0.5 * w(q) * len;
  }
  return rule;
}

}  // namespace tmc

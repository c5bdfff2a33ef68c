#include "tmc/monomials.hpp"

#include <map>
#include <mutex>

namespace tmc {

const std::vector<std::pair<int, int>>& monomial_exponents(int order) {
  static std::mutex mutex;
  static std::map<int, std::vector<std::pair<int, int>>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;
  std::vector<std::pair<int, int>> exps;
  exps.reserve(monomial_count(order));
  for (int d = 0; d <= order; ++d)
    for (int a1 = d; a1 >= 0; --a1) exps.emplace_back(a1, d - a1);
  return cache.emplace(order, std::move(exps)).first->second;
}

namespace {

inline double ipow(double b, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

}  // namespace

VectorXd monomial_values(const ScaledMonomialBasis& basis, const Vector2d& x) {
  const auto& exps = monomial_exponents(basis.order);
  const double xi = (x.x() - basis.centroid.x()) / basis.diameter;
  const double eta = (x.y() - basis.centroid.y()) / basis.diameter;
  VectorXd v(basis.size());
  for (int a = 0; a < basis.size(); ++a)
    v(a) = ipow(xi, exps[a].first) * ipow(eta, exps[a].second);
  return v;
}

MatrixXd monomial_gradients(const ScaledMonomialBasis& basis, const Vector2d& x) {
  const auto& exps = monomial_exponents(basis.order);
  const double h = basis.diameter;
  const double xi = (x.x() - basis.centroid.x()) / h;
  const double eta = (x.y() - basis.centroid.y()) / h;
  MatrixXd g(basis.size(), 2);
  for (int a = 0; a < basis.size(); ++a) {
    const auto [p, q] = exps[a];
    g(a, 0) = p > 0 ? p * ipow(xi, p - 1) * ipow(eta, q) / h : 0.0;
    g(a, 1) = q > 0 ? q * ipow(xi, p) * ipow(eta, q - 1) / h : 0.0;
  }
  return g;
}

std::vector<Matrix2d> monomial_hessians(const ScaledMonomialBasis& basis, const Vector2d& x) {
  const auto& exps = monomial_exponents(basis.order);
  const double h = basis.diameter;
  const double h2 = h * h;
  const double xi = (x.x() - basis.centroid.x()) / h;
  const double eta = (x.y() - basis.centroid.y()) / h;
  std::vector<Matrix2d> hess(basis.size());
  for (int a = 0; a < basis.size(); ++a) {
    const auto [p, q] = exps[a];
    Matrix2d m = Matrix2d::Zero();
    if (p > 1) m(0, 0) = p * (p - 1) * ipow(xi, p - 2) * ipow(eta, q) / h2;
    if (q > 1) m(1, 1) = q * (q - 1) * ipow(xi, p) * ipow(eta, q - 2) / h2;
    if (p > 0 && q > 0) {
      const double mixed = p * q * ipow(xi, p - 1) * ipow(eta, q - 1) / h2;
      m(0, 1) = m(1, 0) = mixed;
    }
    hess[a] = m;
  }
  return hess;
}

VectorXd monomial_laplacians(const ScaledMonomialBasis& basis, const Vector2d& x) {
  const auto hess = monomial_hessians(basis, x);
  VectorXd lap(basis.size());
  for (int a = 0; a < basis.size(); ++a) lap(a) = hess[a].trace();
  return lap;
}

}  // namespace tmc

#pragma once

// Test-only brute-force oracle: realizes the virtual function behind a k = 2
// VEM DOF vector by a fine P2 FEM solve of  lap(u) = c  with the quadratic
// edge traces as Dirichlet data and the mean pinned to the moment DOF, then
// projects it densely. Independent of the production projector path.

#include <array>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "tmc/monomials.hpp"
#include "tmc/quadrature.hpp"

namespace tmc_test {

using tmc::MatrixXd;
using tmc::Vector2d;
using tmc::VectorXd;

struct FemSolution {
  std::vector<Vector2d> nodes;              // corner + midside nodes
  std::vector<std::array<int, 6>> tris;     // (v0, v1, v2, m01, m12, m20)
  VectorXd values;
  double area = 0.0;

  template <class F>
  void integrate(int degree, F&& accumulate) const {
    for (const auto& t : tris) {
      const Vector2d a = nodes[t[0]], b = nodes[t[1]], c = nodes[t[2]];
      const auto rule = tmc::triangle_quadrature(a, b, c, degree);
      Eigen::Matrix2d Jinv;
      {
        Eigen::Matrix2d J;
        J.col(0) = b - a;
        J.col(1) = c - a;
        Jinv = J.inverse();
      }
      for (int q = 0; q < rule.size(); ++q) {
        const Vector2d x = rule.point(q);
        const Vector2d ref = Jinv * (x - a);
        const double l1 = ref.x(), l2 = ref.y(), l0 = 1.0 - l1 - l2;
        const double shp[6] = {l0 * (2 * l0 - 1), l1 * (2 * l1 - 1), l2 * (2 * l2 - 1),
                               4 * l0 * l1,       4 * l1 * l2,       4 * l2 * l0};
        // reference gradients
        const Eigen::Vector2d g0(-1, -1), g1(1, 0), g2(0, 1);
        Eigen::Vector2d gshp[6] = {(4 * l0 - 1) * g0,       (4 * l1 - 1) * g1,
                                   (4 * l2 - 1) * g2,       4.0 * (l0 * g1 + l1 * g0),
                                   4.0 * (l1 * g2 + l2 * g1), 4.0 * (l2 * g0 + l0 * g2)};
        double u = 0.0;
        Vector2d grad = Vector2d::Zero();
        for (int i = 0; i < 6; ++i) {
          u += values(t[i]) * shp[i];
          grad += values(t[i]) * (Jinv.transpose() * gshp[i]);
        }
        accumulate(rule.weights(q), x, u, grad);
      }
    }
  }
};

/// Fan-triangulates the polygon, refines `levels` times, solves the local
/// problem pinning the VEM DOFs (2N vertex/edge values + mean).
inline FemSolution solve_vem_function(const std::vector<Vector2d>& ring,
                                      const VectorXd& scalar_dofs, int levels) {
  const int N = static_cast<int>(ring.size());
  std::vector<Vector2d> pts(ring.begin(), ring.end());
  pts.push_back(tmc::polygon_centroid(ring));
  std::vector<std::array<int, 3>> tris;
  for (int i = 0; i < N; ++i) tris.push_back({N, i, (i + 1) % N});

  for (int lev = 0; lev < levels; ++lev) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      pts.push_back(0.5 * (pts[a] + pts[b]));
      return mid.emplace(key, static_cast<int>(pts.size()) - 1).first->second;
    };
    std::vector<std::array<int, 3>> next;
    for (const auto& t : tris) {
      const int m01 = midpoint(t[0], t[1]), m12 = midpoint(t[1], t[2]),
                m20 = midpoint(t[2], t[0]);
      next.push_back({t[0], m01, m20});
      next.push_back({m01, t[1], m12});
      next.push_back({m20, m12, t[2]});
      next.push_back({m01, m12, m20});
    }
    tris = std::move(next);
  }

  // P2 nodes: triangulation vertices plus one node per fine edge.
  FemSolution fem;
  fem.nodes = pts;
  std::map<std::pair<int, int>, int> edge_node;
  for (const auto& t : tris) {
    std::array<int, 6> e{t[0], t[1], t[2], 0, 0, 0};
    const int pairs[3][2] = {{t[0], t[1]}, {t[1], t[2]}, {t[2], t[0]}};
    for (int k = 0; k < 3; ++k) {
      auto key = std::minmax(pairs[k][0], pairs[k][1]);
      auto it = edge_node.find(key);
      if (it == edge_node.end()) {
        fem.nodes.push_back(0.5 * (pts[key.first] + pts[key.second]));
        it = edge_node.emplace(key, static_cast<int>(fem.nodes.size()) - 1).first;
      }
      e[3 + k] = it->second;
    }
    fem.tris.push_back(e);
  }
  fem.area = tmc::polygon_area(ring);

  const int n_nodes = static_cast<int>(fem.nodes.size());

  // Dirichlet data: nodes on the polygon boundary take the quadratic trace.
  std::vector<int> on_edge(n_nodes, -1);
  std::vector<double> param(n_nodes, 0.0);
  for (int v = 0; v < n_nodes; ++v) {
    for (int i = 0; i < N; ++i) {
      const Vector2d a = ring[i], b = ring[(i + 1) % N];
      const Vector2d d = b - a;
      const double len2 = d.squaredNorm();
      const double cross = d.x() * (fem.nodes[v] - a).y() - d.y() * (fem.nodes[v] - a).x();
      if (std::abs(cross) > 1e-12 * std::sqrt(len2)) continue;
      const double t = d.dot(fem.nodes[v] - a) / len2;
      if (t < -1e-12 || t > 1.0 + 1e-12) continue;
      on_edge[v] = i;
      param[v] = t;
      break;
    }
  }

  VectorXd g = VectorXd::Zero(n_nodes);
  std::vector<int> interior;
  for (int v = 0; v < n_nodes; ++v) {
    if (on_edge[v] < 0) {
      interior.push_back(v);
      continue;
    }
    const int i = on_edge[v];
    const double s = param[v];
    const double sh0 = (1 - s) * (1 - 2 * s), shm = 4 * s * (1 - s), sh1 = s * (2 * s - 1);
    g(v) = sh0 * scalar_dofs(i) + shm * scalar_dofs(N + i) + sh1 * scalar_dofs((i + 1) % N);
  }

  // Assemble stiffness and the load ("mass against 1") vector.
  MatrixXd A = MatrixXd::Zero(n_nodes, n_nodes);
  VectorXd m = VectorXd::Zero(n_nodes);
  fem.values = VectorXd::Zero(n_nodes);  // placeholder for integrate()
  FemSolution& shape = fem;
  for (const auto& t : shape.tris) {
    const Vector2d a = shape.nodes[t[0]], b = shape.nodes[t[1]], c = shape.nodes[t[2]];
    const auto rule = tmc::triangle_quadrature(a, b, c, 4);
    Eigen::Matrix2d J;
    J.col(0) = b - a;
    J.col(1) = c - a;
    const Eigen::Matrix2d Jinv = J.inverse();
    for (int q = 0; q < rule.size(); ++q) {
      const Vector2d ref = Jinv * (rule.point(q) - a);
      const double l1 = ref.x(), l2 = ref.y(), l0 = 1 - l1 - l2;
      const double shp[6] = {l0 * (2 * l0 - 1), l1 * (2 * l1 - 1), l2 * (2 * l2 - 1),
                             4 * l0 * l1,       4 * l1 * l2,       4 * l2 * l0};
      const Eigen::Vector2d g0(-1, -1), g1(1, 0), g2(0, 1);
      Eigen::Vector2d gshp[6] = {(4 * l0 - 1) * g0,         (4 * l1 - 1) * g1,
                                 (4 * l2 - 1) * g2,         4.0 * (l0 * g1 + l1 * g0),
                                 4.0 * (l1 * g2 + l2 * g1), 4.0 * (l2 * g0 + l0 * g2)};
      const double w = rule.weights(q);
      Eigen::Vector2d gphys[6];
      for (int i = 0; i < 6; ++i) gphys[i] = Jinv.transpose() * gshp[i];
      for (int i = 0; i < 6; ++i) {
        m(t[i]) += w * shp[i];
        for (int j = 0; j < 6; ++j) A(t[i], t[j]) += w * gphys[i].dot(gphys[j]);
      }
    }
  }

  // KKT: [A_II  m_I; m_I^T 0] [u_I; c] = [-A_IB g; m0*|E| - m_B g].
  const int nI = static_cast<int>(interior.size());
  MatrixXd K = MatrixXd::Zero(nI + 1, nI + 1);
  VectorXd rhs = VectorXd::Zero(nI + 1);
  const double m0 = scalar_dofs(2 * N);
  for (int ii = 0; ii < nI; ++ii) {
    const int v = interior[ii];
    for (int jj = 0; jj < nI; ++jj) K(ii, jj) = A(v, interior[jj]);
    K(ii, nI) = K(nI, ii) = m(v);
    rhs(ii) = -A.row(v).dot(g);
  }
  rhs(nI) = m0 * fem.area - m.dot(g);

  const VectorXd sol = K.fullPivLu().solve(rhs);
  fem.values = g;
  for (int ii = 0; ii < nI; ++ii) fem.values(interior[ii]) = sol(ii);
  return fem;
}

/// Dense H1 projection of the FEM-realized function onto P_k monomials
/// (gradient match + mean constraint), via fine-triangle quadrature only.
inline VectorXd dense_h1_projection(const FemSolution& fem, const tmc::ScaledMonomialBasis& basis) {
  const int np = basis.size();
  MatrixXd G = MatrixXd::Zero(np, np);
  VectorXd rhs = VectorXd::Zero(np);
  fem.integrate(8, [&](double w, const Vector2d& x, double u, const Vector2d& grad) {
    const VectorXd mv = tmc::monomial_values(basis, x);
    const MatrixXd dm = tmc::monomial_gradients(basis, x);
    G.row(0) += (w / fem.area) * mv.transpose();
    G.bottomRows(np - 1) += w * dm.bottomRows(np - 1) * dm.transpose();
    rhs(0) += (w / fem.area) * u;
    rhs.tail(np - 1) += w * dm.bottomRows(np - 1) * grad;
  });
  return G.fullPivLu().solve(rhs);
}

/// Dense L2 projection of the FEM gradient onto [P_l]^2. For generic virtual
/// functions this differs from the computable projector by the Pi-nabla
/// surrogate in the volume term; they agree on P_k.
inline VectorXd dense_l2_gradient_projection(const FemSolution& fem,
                                             const tmc::ScaledMonomialBasis& basis_l) {
  const int nl = basis_l.size();
  MatrixXd M = MatrixXd::Zero(nl, nl);
  VectorXd bx = VectorXd::Zero(nl), by = VectorXd::Zero(nl);
  fem.integrate(8, [&](double w, const Vector2d& x, double, const Vector2d& grad) {
    const VectorXd mv = tmc::monomial_values(basis_l, x);
    M += w * mv * mv.transpose();
    bx += w * grad.x() * mv;
    by += w * grad.y() * mv;
  });
  Eigen::LDLT<MatrixXd> ldlt(M);
  VectorXd out(2 * nl);
  out.head(nl) = ldlt.solve(bx);
  out.tail(nl) = ldlt.solve(by);
  return out;
}

/// Independent dense recomputation of the computable gradient-projection
/// system: fine-quadrature mass matrix, fine edge quadrature of the exact
/// traces, and the volume term pairing div p with the exact moment (constant
/// part) and the densely H1-projected polynomial (remainder).
inline VectorXd dense_l2_defining_system(const std::vector<Vector2d>& ring,
                                         const VectorXd& scalar_dofs, const FemSolution& fem,
                                         const tmc::ScaledMonomialBasis& basis_l,
                                         const tmc::ScaledMonomialBasis& basis_k) {
  const int N = static_cast<int>(ring.size());
  const int nl = basis_l.size();
  const double area = fem.area;
  const double m0 = scalar_dofs(2 * N);
  const VectorXd w_poly = dense_h1_projection(fem, basis_k);  // exact Pi-nabla of the lift

  MatrixXd M = MatrixXd::Zero(nl, nl);
  fem.integrate(8, [&](double w, const Vector2d& x, double, const Vector2d&) {
    const VectorXd mv = tmc::monomial_values(basis_l, x);
    M += w * mv * mv.transpose();
  });

  MatrixXd b = MatrixXd::Zero(2, nl);  // row c = component
  for (int i = 0; i < N; ++i) {
    const Vector2d a = ring[i], p1 = ring[(i + 1) % N];
    const Vector2d d = p1 - a;
    const Vector2d n = Vector2d(d.y(), -d.x()).normalized();
    const auto er = tmc::edge_quadrature(a, p1, 2 * basis_l.order + 2);
    const double len2 = d.squaredNorm();
    for (int q = 0; q < er.size(); ++q) {
      const Vector2d x = er.point(q);
      const double s = d.dot(x - a) / len2;
      const double trace = (1 - s) * (1 - 2 * s) * scalar_dofs(i) +
                           4 * s * (1 - s) * scalar_dofs(N + i) +
                           s * (2 * s - 1) * scalar_dofs((i + 1) % N);
      const VectorXd mv = tmc::monomial_values(basis_l, x);
      for (int c = 0; c < 2; ++c) b.row(c) += er.weights(q) * n(c) * trace * mv.transpose();
    }
  }

  const auto& exps = tmc::monomial_exponents(basis_l.order);
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < nl; ++i) {
      const int pc = c == 0 ? exps[i].first : exps[i].second;
      const int other = c == 0 ? exps[i].second : exps[i].first;
      if (pc == 0) continue;
      if (pc == 1 && other == 0) {
        b(c, i) -= (1.0 / basis_l.diameter) * area * m0;
      } else {
        double acc = 0.0;
        fem.integrate(8, [&](double w, const Vector2d& x, double, const Vector2d&) {
          const double div_p = tmc::monomial_gradients(basis_l, x)(i, c);
          acc += w * div_p * w_poly.dot(tmc::monomial_values(basis_k, x));
        });
        b(c, i) -= acc;
      }
    }

  Eigen::LDLT<MatrixXd> ldlt(M);
  VectorXd out(2 * nl);
  out.head(nl) = ldlt.solve(b.row(0).transpose());
  out.tail(nl) = ldlt.solve(b.row(1).transpose());
  return out;
}

}  // namespace tmc_test

#include "tmc/projection.hpp"

#include <functional>
#include <stdexcept>
#include <thread>

#include <Eigen/LU>

namespace tmc {

int choose_l(int n_vertices, int k) {
  int l = k + 1;
  while (n_vertices > 2 * l - 2 * k + 5) ++l;
  return l;
}

namespace {

// Quadratic Lagrange trace on an edge: values at (s=0, s=1/2, s=1).
inline void edge_shapes(double s, double out[3]) {
  out[0] = (1.0 - s) * (1.0 - 2.0 * s);
  out[1] = 4.0 * s * (1.0 - s);
  out[2] = s * (2.0 * s - 1.0);
}

// Index of the monomial x^a y^b in the basis ordering.
inline int monomial_index(int a, int b) {
  const int d = a + b;
  return d * (d + 1) / 2 + (d - a);
}

struct EdgeFrame {
  Vector2d p0, p1, normal;
  int local_v0, local_mid, local_v1;  // positions in the scalar dof list
};

EdgeFrame edge_frame(const ElementDofs& dofs, int i) {
  const int n = static_cast<int>(dofs.ring.size());
  EdgeFrame f;
  f.p0 = dofs.coords[i];
  f.p1 = dofs.coords[(i + 1) % n];
  const Vector2d t = f.p1 - f.p0;
  f.normal = Vector2d(t.y(), -t.x()).normalized();  // outward for a CCW ring
  f.local_v0 = i;
  f.local_v1 = (i + 1) % n;
  f.local_mid = n + i;
  return f;
}

}  // namespace

MatrixXd h1_projector(const ElementDofs& dofs, const ElementGeometry& geom, int proj_order,
                      const QuadratureRule& volume_rule) {
  const int n = static_cast<int>(dofs.ring.size());
  const int nd = 2 * n + 1;
  const int np = monomial_count(proj_order);
  const ScaledMonomialBasis basis{geom.centroid, geom.diameter, proj_order};

  MatrixXd G = MatrixXd::Zero(np, np);
  MatrixXd B = MatrixXd::Zero(np, nd);

  // Mean-value constraint pins the constant mode to the moment DOF.
  for (int q = 0; q < volume_rule.size(); ++q) {
    const VectorXd m = monomial_values(basis, volume_rule.point(q));
    G.row(0) += (volume_rule.weights(q) / geom.area) * m.transpose();
    const MatrixXd dm = monomial_gradients(basis, volume_rule.point(q));
    G.bottomRows(np - 1) += volume_rule.weights(q) * dm.bottomRows(np - 1) * dm.transpose();
  }
  B(0, nd - 1) = 1.0;

  // Edge part of integration by parts; the trace is the quadratic through
  // the two endpoint DOFs and the midpoint DOF.
  for (int i = 0; i < n; ++i) {
    const EdgeFrame f = edge_frame(dofs, i);
    const QuadratureRule er = edge_quadrature(f.p0, f.p1, proj_order + 3);
    const double len2 = (f.p1 - f.p0).squaredNorm();
    for (int q = 0; q < er.size(); ++q) {
      const Vector2d x = er.point(q);
      const double s = (x - f.p0).dot(f.p1 - f.p0) / len2;
      double shp[3];
      edge_shapes(s, shp);
      const VectorXd gn = monomial_gradients(basis, x) * f.normal;
      const double w = er.weights(q);
      for (int a = 1; a < np; ++a) {
        B(a, f.local_v0) += w * gn(a) * shp[0];
        B(a, f.local_mid) += w * gn(a) * shp[1];
        B(a, f.local_v1) += w * gn(a) * shp[2];
      }
    }
  }

  // Volume part: -int_E (lap m_a) v; the Laplacian is constant for k <= 2 so
  // the exact moment DOF carries it.
  const VectorXd lap = monomial_laplacians(basis, geom.centroid);
  for (int a = 1; a < np; ++a) B(a, nd - 1) -= lap(a) * geom.area;

  Eigen::FullPivLU<MatrixXd> lu(G);
  if (!lu.isInvertible()) throw std::runtime_error("h1_projector: singular monomial stiffness");
  return lu.solve(B);
}

MatrixXd l2_gradient_projector(const ElementDofs& dofs, const ElementGeometry& geom, int l,
                               const MatrixXd& pi_volume, int pi_volume_order,
                               const QuadratureRule& volume_rule) {
  const int n = static_cast<int>(dofs.ring.size());
  const int nd = 2 * n + 1;
  const int nl = monomial_count(l);
  const ScaledMonomialBasis basis_l{geom.centroid, geom.diameter, l};
  const ScaledMonomialBasis basis_low{geom.centroid, geom.diameter, l - 1};

  // Scalar P_l mass matrix and the P_{l-1} x P_{proj} cross-mass matrix.
  MatrixXd M = MatrixXd::Zero(nl, nl);
  const int n_low = monomial_count(l - 1);
  const int n_proj = monomial_count(pi_volume_order);
  MatrixXd C = MatrixXd::Zero(n_low, n_proj);
  const ScaledMonomialBasis basis_proj{geom.centroid, geom.diameter, pi_volume_order};
  for (int q = 0; q < volume_rule.size(); ++q) {
    const double w = volume_rule.weights(q);
    const VectorXd ml = monomial_values(basis_l, volume_rule.point(q));
    M += w * ml * ml.transpose();
    const VectorXd mlow = monomial_values(basis_low, volume_rule.point(q));
    const VectorXd mproj = monomial_values(basis_proj, volume_rule.point(q));
    C += w * mlow * mproj.transpose();
  }

  MatrixXd b = MatrixXd::Zero(2 * nl, nd);

  // Boundary term: exact through the quadratic edge traces.
  for (int i = 0; i < n; ++i) {
    const EdgeFrame f = edge_frame(dofs, i);
    const QuadratureRule er = edge_quadrature(f.p0, f.p1, l + 3);
    const double len2 = (f.p1 - f.p0).squaredNorm();
    for (int q = 0; q < er.size(); ++q) {
      const Vector2d x = er.point(q);
      const double s = (x - f.p0).dot(f.p1 - f.p0) / len2;
      double shp[3];
      edge_shapes(s, shp);
      const VectorXd ml = monomial_values(basis_l, x);
      const double w = er.weights(q);
      for (int c = 0; c < 2; ++c) {
        const double wn = w * f.normal(c);
        for (int a = 0; a < nl; ++a) {
          b(c * nl + a, f.local_v0) += wn * ml(a) * shp[0];
          b(c * nl + a, f.local_mid) += wn * ml(a) * shp[1];
          b(c * nl + a, f.local_v1) += wn * ml(a) * shp[2];
        }
      }
    }
  }

  // Volume term: -int_E (div p) v with div p expanded in monomials; the
  // constant part uses the exact moment, the rest goes through pi_volume.
  const MatrixXd CP = C * pi_volume;  // n_low x nd
  const auto& exps = monomial_exponents(l);
  const double h = geom.diameter;
  for (int c = 0; c < 2; ++c) {
    for (int a = 0; a < nl; ++a) {
      const auto [p, qe] = exps[a];
      const int power = c == 0 ? p : qe;
      if (power == 0) continue;
      const double coeff = power / h;
      const int idx = c == 0 ? monomial_index(p - 1, qe) : monomial_index(p, qe - 1);
      if (idx == 0)
        b(c * nl + a, nd - 1) -= coeff * geom.area;
      else
        b.row(c * nl + a) -= coeff * CP.row(idx);
    }
  }

  Eigen::LDLT<MatrixXd> ldlt(M);
  if (ldlt.info() != Eigen::Success)
    throw std::runtime_error("l2_gradient_projector: singular mass matrix");
  MatrixXd pi_m(2 * nl, nd);
  pi_m.topRows(nl) = ldlt.solve(b.topRows(nl));
  pi_m.bottomRows(nl) = ldlt.solve(b.bottomRows(nl));
  return pi_m;
}

MatrixXd ElementOperators::b1(const Vector2d& x) const {
  const int nl = basis_l.size();
  const VectorXd m = monomial_values(basis_l, x);
  const Eigen::RowVectorXd gx = m.transpose() * pi_m.topRows(nl);
  const Eigen::RowVectorXd gy = m.transpose() * pi_m.bottomRows(nl);
  MatrixXd B = MatrixXd::Zero(4, n_vector());
  for (int s = 0; s < n_scalar(); ++s) {
    B(0, 2 * s) = gx(s);
    B(1, 2 * s + 1) = gx(s);
    B(2, 2 * s) = gy(s);
    B(3, 2 * s + 1) = gy(s);
  }
  return B;
}

MatrixXd ElementOperators::b2(const Vector2d& x) const {
  const int nl = basis_l.size();
  const MatrixXd dm = monomial_gradients(basis_l, x);
  const Eigen::RowVectorXd gxx = dm.col(0).transpose() * pi_m.topRows(nl);
  const Eigen::RowVectorXd gyx = dm.col(0).transpose() * pi_m.bottomRows(nl);
  const Eigen::RowVectorXd gxy = dm.col(1).transpose() * pi_m.topRows(nl);
  const Eigen::RowVectorXd gyy = dm.col(1).transpose() * pi_m.bottomRows(nl);
  MatrixXd B = MatrixXd::Zero(8, n_vector());
  for (int s = 0; s < n_scalar(); ++s) {
    B(0, 2 * s) = gxx(s);
    B(1, 2 * s + 1) = gxx(s);
    B(2, 2 * s) = gyx(s);
    B(3, 2 * s + 1) = gyx(s);
    B(4, 2 * s) = gxy(s);
    B(5, 2 * s + 1) = gxy(s);
    B(6, 2 * s) = gyy(s);
    B(7, 2 * s + 1) = gyy(s);
  }
  return B;
}

ElementOperators build_element_operators(const PolygonalMesh& mesh, const GlobalDofMap& dofmap,
                                         int element, const OperatorOptions& options) {
  ElementOperators ops;
  ops.element = element;
  ops.dofs = element_dofs(mesh, dofmap, element);
  ops.n_vertices = static_cast<int>(ops.dofs.ring.size());
  ops.geom.area = polygon_area(ops.dofs.coords);
  ops.geom.centroid = polygon_centroid(ops.dofs.coords);
  ops.geom.diameter = polygon_diameter(ops.dofs.coords);
  ops.geom.n_vertices = ops.n_vertices;
  ops.l = choose_l(ops.n_vertices);
  ops.basis_k = ScaledMonomialBasis{ops.geom.centroid, ops.geom.diameter, kAnsatzOrder};
  ops.basis_l = ScaledMonomialBasis{ops.geom.centroid, ops.geom.diameter, ops.l};
  const int degree = options.quadrature_degree > 0 ? options.quadrature_degree : 2 * ops.l + 2;
  ops.quadrature = polygon_quadrature(ops.dofs.coords, degree);
  ops.pi_nabla = h1_projector(ops.dofs, ops.geom, kAnsatzOrder, ops.quadrature);
  if (options.volume_term == VolumeTerm::Pi1) {
    const MatrixXd pi1 = h1_projector(ops.dofs, ops.geom, 1, ops.quadrature);
    ops.pi_m = l2_gradient_projector(ops.dofs, ops.geom, ops.l, pi1, 1, ops.quadrature);
  } else {
    ops.pi_m = l2_gradient_projector(ops.dofs, ops.geom, ops.l, ops.pi_nabla, kAnsatzOrder,
                                     ops.quadrature);
  }
  return ops;
}

std::vector<ElementOperators> build_all_operators(const PolygonalMesh& mesh,
                                                  const GlobalDofMap& dofmap,
                                                  const OperatorOptions& options, int threads) {
  const int ne = mesh.n_elements();
  std::vector<ElementOperators> ops(ne);
  if (threads <= 1) {
    for (int e = 0; e < ne; ++e) ops[e] = build_element_operators(mesh, dofmap, e, options);
    return ops;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      try {
        for (int e = t; e < ne; e += threads)
          ops[e] = build_element_operators(mesh, dofmap, e, options);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (const auto& err : errors)
    if (err) std::rethrow_exception(err);
  return ops;
}

VectorXd scalar_dof_vector(const ElementDofs& dofs, const QuadratureRule& volume_rule,
                           double area, const std::function<double(const Vector2d&)>& f) {
  const int n = static_cast<int>(dofs.ring.size());
  VectorXd v(2 * n + 1);
  for (int i = 0; i < n; ++i) v(i) = f(dofs.coords[i]);
  for (int i = 0; i < n; ++i)
    v(n + i) = f(0.5 * (dofs.coords[i] + dofs.coords[(i + 1) % n]));
  double mean = 0.0;
  for (int q = 0; q < volume_rule.size(); ++q)
    mean += volume_rule.weights(q) * f(volume_rule.point(q));
  v(2 * n) = mean / area;
  return v;
}

}  // namespace tmc

#pragma once

#include <vector>

#include "tmc/mesh.hpp"

namespace tmc {

/// Order-2 virtual element DOFs: vertex values, edge-midpoint values, one
/// mean-value moment per element. Scalar DOFs are numbered globally as
/// [vertices | edge midpoints | element moments]; the vector displacement
/// interleaves (u_x, u_y) per scalar slot.
class GlobalDofMap {
 public:
  explicit GlobalDofMap(const PolygonalMesh& mesh)
      : n_vertices_(mesh.n_vertices()), n_edges_(mesh.n_edges()), n_elements_(mesh.n_elements()) {}

  int scalar_count() const { return n_vertices_ + n_edges_ + n_elements_; }
  int vector_count() const { return 2 * scalar_count(); }

  int vertex_dof(int v) const { return v; }
  int edge_dof(int e) const { return n_vertices_ + e; }
  int moment_dof(int elem) const { return n_vertices_ + n_edges_ + elem; }

  static int x_dof(int scalar) { return 2 * scalar; }
  static int y_dof(int scalar) { return 2 * scalar + 1; }

 private:
  int n_vertices_, n_edges_, n_elements_;
};

/// Canonical per-element DOF list: the ring is rotated so the smallest global
/// vertex id comes first; scalar order is ring vertices, ring edges, moment.
struct ElementDofs {
  std::vector<int> ring;        // rotated global vertex ids, CCW
  std::vector<int> scalar;      // 2 N + 1 global scalar dof ids
  std::vector<Vector2d> coords; // rotated ring coordinates
};

ElementDofs element_dofs(const PolygonalMesh& mesh, const GlobalDofMap& dofs, int element);

}  // namespace tmc

#include "tmc/dofs.hpp"

#include <algorithm>

namespace tmc {

ElementDofs element_dofs(const PolygonalMesh& mesh, const GlobalDofMap& dofs, int element) {
  const auto& stored = mesh.elements[element];
  const int n = static_cast<int>(stored.size());
  const int start = static_cast<int>(
      std::min_element(stored.begin(), stored.end()) - stored.begin());

  ElementDofs out;
  out.ring.reserve(n);
  for (int i = 0; i < n; ++i) out.ring.push_back(stored[(start + i) % n]);
  out.coords.reserve(n);
  for (int v : out.ring) out.coords.push_back(mesh.vertices[v]);

  out.scalar.reserve(2 * n + 1);
  for (int v : out.ring) out.scalar.push_back(dofs.vertex_dof(v));
  for (int i = 0; i < n; ++i) {
    const int e = mesh.edge_index(out.ring[i], out.ring[(i + 1) % n]);
    out.scalar.push_back(dofs.edge_dof(e));
  }
  out.scalar.push_back(dofs.moment_dof(element));
  return out;
}

}  // namespace tmc

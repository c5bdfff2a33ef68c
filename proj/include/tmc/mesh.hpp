#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "tmc/types.hpp"

namespace tmc {

/// Element region tag: a numbered hyperelastic body or the third medium.
struct Region {
  int body_id = -1;  // -1 = third medium

  bool is_medium() const { return body_id < 0; }
  static Region medium() { return Region{-1}; }
  static Region body(int id) { return Region{id}; }
  bool operator==(const Region&) const = default;
};

std::string region_to_string(const Region& r);
Region region_from_string(const std::string& s);

struct MeshEdge {
  int v0 = -1, v1 = -1;             // v0 < v1
  std::vector<int> elements;        // incident element indices
};

struct BoundarySet {
  std::vector<int> vertices;              // ordered as emitted by the generator
  std::vector<std::array<int, 2>> edges;  // vertex index pairs
};

/// Conforming polygonal mesh. Hanging nodes are ordinary ring vertices of the
/// coarser polygon; rings are counter-clockwise. Immutable after
/// finalize_edges() as far as the solver is concerned.
struct PolygonalMesh {
  std::vector<Vector2d> vertices;
  std::vector<std::vector<int>> elements;
  std::vector<Region> element_region;
  std::vector<MeshEdge> edges;
  std::map<std::string, BoundarySet> boundary_sets;

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_elements() const { return static_cast<int>(elements.size()); }
  int n_edges() const { return static_cast<int>(edges.size()); }

  /// Rebuild the unique-edge table from the element rings.
  void finalize_edges();
  /// Edge id for an unordered vertex pair, or -1.
  int edge_index(int a, int b) const;
  std::vector<Vector2d> ring_coords(int element) const;

 private:
  std::map<std::pair<int, int>, int> edge_lookup_;
};

struct ElementGeometry {
  Vector2d centroid = Vector2d::Zero();
  double area = 0.0;
  double diameter = 0.0;
  int n_vertices = 0;
};

ElementGeometry element_geometry(const PolygonalMesh& mesh, int element);

/// One human-readable diagnostic per violated mesh invariant; empty iff valid.
std::vector<std::string> validate(const PolygonalMesh& mesh);

/// JSON mesh file I/O. load_mesh normalizes ring orientation to CCW and
/// rebuilds the edge table; hard connectivity violations throw MeshError.
class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

PolygonalMesh load_mesh(const std::string& path);
void save_mesh(const PolygonalMesh& mesh, const std::string& path);

enum class BenchmarkId { BoxSelfContact, CBox, Punch, MultiObject };

BenchmarkId benchmark_from_string(const std::string& s);
std::string benchmark_to_string(BenchmarkId id);

/// Benchmark meshes with region tags and named boundary sets. Refinement
/// levels refine the third-medium region only (hanging nodes appear at the
/// density transitions for refinement >= 1).
PolygonalMesh generate_benchmark_mesh(BenchmarkId problem, int refinement);

/// Vertices lying on segment [a, b] (within tol), ordered by parameter.
std::vector<int> vertices_on_segment(const PolygonalMesh& mesh, const Vector2d& a,
                                     const Vector2d& b, double tol = 1e-9);
/// Mesh vertex at position p; throws MeshError if absent.
int vertex_at(const PolygonalMesh& mesh, const Vector2d& p, double tol = 1e-9);

}  // namespace tmc

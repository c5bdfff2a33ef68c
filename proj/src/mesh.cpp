#include "tmc/mesh.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "tmc/quadrature.hpp"

namespace tmc {

std::string region_to_string(const Region& r) {
  return r.is_medium() ? "medium" : "body" + std::to_string(r.body_id);
}

Region region_from_string(const std::string& s) {
  if (s == "medium") return Region::medium();
  if (s.rfind("body", 0) == 0) return Region::body(std::stoi(s.substr(4)));
  throw MeshError("unknown region tag '" + s + "'");
}

void PolygonalMesh::finalize_edges() {
  edges.clear();
  edge_lookup_.clear();
  for (int e = 0; e < n_elements(); ++e) {
    const auto& ring = elements[e];
    const int n = static_cast<int>(ring.size());
    for (int i = 0; i < n; ++i) {
      int a = ring[i], b = ring[(i + 1) % n];
      if (a > b) std::swap(a, b);
      auto [it, inserted] = edge_lookup_.try_emplace({a, b}, static_cast<int>(edges.size()));
      if (inserted) edges.push_back(MeshEdge{a, b, {}});
      edges[it->second].elements.push_back(e);
    }
  }
}

int PolygonalMesh::edge_index(int a, int b) const {
  if (a > b) std::swap(a, b);
  auto it = edge_lookup_.find({a, b});
  return it == edge_lookup_.end() ? -1 : it->second;
}

std::vector<Vector2d> PolygonalMesh::ring_coords(int element) const {
  std::vector<Vector2d> coords;
  coords.reserve(elements[element].size());
  for (int v : elements[element]) coords.push_back(vertices[v]);
  return coords;
}

ElementGeometry element_geometry(const PolygonalMesh& mesh, int element) {
  const auto ring = mesh.ring_coords(element);
  ElementGeometry g;
  g.area = polygon_area(ring);
  g.centroid = polygon_centroid(ring);
  g.diameter = polygon_diameter(ring);
  g.n_vertices = static_cast<int>(ring.size());
  return g;
}

namespace {

bool point_on_open_segment(const Vector2d& p, const Vector2d& a, const Vector2d& b, double tol) {
  const Vector2d d = b - a;
  const double len2 = d.squaredNorm();
  if (len2 == 0.0) return false;
  const double cross = d.x() * (p - a).y() - d.y() * (p - a).x();
  if (std::abs(cross) > tol * std::sqrt(len2)) return false;
  const double t = d.dot(p - a) / len2;
  const double margin = tol / std::sqrt(len2);
  return t > margin && t < 1.0 - margin;
}

}  // namespace

std::vector<std::string> validate(const PolygonalMesh& mesh) {
  std::vector<std::string> diags;
  const int ne = mesh.n_elements();
  if (static_cast<int>(mesh.element_region.size()) != ne)
    diags.push_back("region tags do not cover all elements");

  for (int e = 0; e < ne; ++e) {
    const auto& ring = mesh.elements[e];
    if (ring.size() < 3) {
      diags.push_back("degenerate ring, element " + std::to_string(e));
      continue;
    }
    std::set<int> uniq(ring.begin(), ring.end());
    bool in_range = true;
    for (int v : ring)
      if (v < 0 || v >= mesh.n_vertices()) in_range = false;
    if (!in_range) {
      diags.push_back("vertex index out of range, element " + std::to_string(e));
      continue;
    }
    if (uniq.size() != ring.size()) {
      diags.push_back("degenerate ring, element " + std::to_string(e));
      continue;
    }
    if (polygon_area(mesh.ring_coords(e)) <= 0.0)
      diags.push_back("negative area, element " + std::to_string(e));
  }

  for (const auto& edge : mesh.edges) {
    if (edge.elements.size() > 2)
      diags.push_back("edge (" + std::to_string(edge.v0) + "," + std::to_string(edge.v1) +
                      ") shared by more than 2 elements");
  }

  // A boundary edge with another mesh vertex on its interior is a T-junction
  // that should have been absorbed into the coarse ring.
  for (const auto& edge : mesh.edges) {
    if (edge.elements.size() != 1) continue;
    const Vector2d& a = mesh.vertices[edge.v0];
    const Vector2d& b = mesh.vertices[edge.v1];
    for (int v = 0; v < mesh.n_vertices(); ++v) {
      if (v == edge.v0 || v == edge.v1) continue;
      if (point_on_open_segment(mesh.vertices[v], a, b, 1e-9)) {
        diags.push_back("non-conforming edge (" + std::to_string(edge.v0) + "," +
                        std::to_string(edge.v1) + "): vertex " + std::to_string(v) +
                        " lies on its interior");
        break;
      }
    }
  }

  // Each connected medium component must touch a body (it glues the bodies).
  std::vector<int> comp(ne, -1);
  int n_comp = 0;
  std::vector<std::vector<int>> neighbors(ne);
  for (const auto& edge : mesh.edges)
    if (edge.elements.size() == 2) {
      neighbors[edge.elements[0]].push_back(edge.elements[1]);
      neighbors[edge.elements[1]].push_back(edge.elements[0]);
    }
  for (int seed = 0; seed < ne; ++seed) {
    if (comp[seed] >= 0 || !mesh.element_region[seed].is_medium()) continue;
    std::vector<int> stack{seed};
    comp[seed] = n_comp;
    bool touches_body = false;
    while (!stack.empty()) {
      const int e = stack.back();
      stack.pop_back();
      for (int nb : neighbors[e]) {
        if (!mesh.element_region[nb].is_medium())
          touches_body = true;
        else if (comp[nb] < 0) {
          comp[nb] = n_comp;
          stack.push_back(nb);
        }
      }
    }
    if (!touches_body)
      diags.push_back("third-medium component containing element " + std::to_string(seed) +
                      " is not edge-connected to any body");
    ++n_comp;
  }

  for (const auto& [name, set] : mesh.boundary_sets) {
    for (int v : set.vertices)
      if (v < 0 || v >= mesh.n_vertices())
        diags.push_back("boundary set '" + name + "' references missing vertex");
    for (const auto& ed : set.edges)
      if (mesh.edge_index(ed[0], ed[1]) < 0)
        diags.push_back("boundary set '" + name + "' references missing edge");
  }
  return diags;
}

namespace {

int line_of_byte(const std::string& text, std::size_t byte) {
  int line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

}  // namespace

PolygonalMesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open mesh file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    throw MeshError("parse error in '" + path + "' at line " +
                    std::to_string(line_of_byte(text, err.byte)) + ": " + err.what());
  }

  PolygonalMesh mesh;
  try {
    for (const auto& v : j.at("vertices"))
      mesh.vertices.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
    for (const auto& ring : j.at("elements"))
      mesh.elements.push_back(ring.get<std::vector<int>>());
    for (const auto& r : j.at("regions"))
      mesh.element_region.push_back(region_from_string(r.get<std::string>()));
    if (j.contains("boundary_sets")) {
      for (const auto& [name, bs] : j.at("boundary_sets").items()) {
        BoundarySet set;
        if (bs.contains("vertices")) set.vertices = bs.at("vertices").get<std::vector<int>>();
        if (bs.contains("edges"))
          for (const auto& ed : bs.at("edges"))
            set.edges.push_back({ed.at(0).get<int>(), ed.at(1).get<int>()});
        mesh.boundary_sets.emplace(name, std::move(set));
      }
    }
  } catch (const nlohmann::json::exception& err) {
    throw MeshError("malformed mesh file '" + path + "': " + err.what());
  }

  if (mesh.element_region.size() != mesh.elements.size())
    throw MeshError("'regions' length differs from 'elements' length");

  // Normalize orientation; files may store either.
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto& ring = mesh.elements[e];
    if (ring.size() >= 3) {
      bool ok = true;
      for (int v : ring)
        if (v < 0 || v >= mesh.n_vertices()) ok = false;
      if (ok && polygon_area(mesh.ring_coords(e)) < 0.0)
        std::reverse(mesh.elements[e].begin(), mesh.elements[e].end());
    }
  }
  mesh.finalize_edges();

  for (const auto& diag : validate(mesh)) {
    // Boundary-set problems and medium-connectivity notes are diagnostics;
    // broken rings and non-conforming edges make the mesh unusable.
    if (diag.find("ring") != std::string::npos || diag.find("area") != std::string::npos ||
        diag.find("conforming") != std::string::npos ||
        diag.find("more than 2") != std::string::npos)
      throw MeshError(diag);
  }
  return mesh;
}

void save_mesh(const PolygonalMesh& mesh, const std::string& path) {
  nlohmann::json j;
  j["vertices"] = nlohmann::json::array();
  for (const auto& v : mesh.vertices) j["vertices"].push_back({v.x(), v.y()});
  j["elements"] = mesh.elements;
  j["regions"] = nlohmann::json::array();
  for (const auto& r : mesh.element_region) j["regions"].push_back(region_to_string(r));
  j["boundary_sets"] = nlohmann::json::object();
  for (const auto& [name, set] : mesh.boundary_sets) {
    nlohmann::json bs;
    bs["vertices"] = set.vertices;
    bs["edges"] = nlohmann::json::array();
    for (const auto& ed : set.edges) bs["edges"].push_back({ed[0], ed[1]});
    j["boundary_sets"][name] = bs;
  }
  std::ofstream out(path);
  if (!out) throw MeshError("cannot write mesh file '" + path + "'");
  out << j.dump(2) << "\n";
}

BenchmarkId benchmark_from_string(const std::string& s) {
  if (s == "box-self-contact") return BenchmarkId::BoxSelfContact;
  if (s == "c-box") return BenchmarkId::CBox;
  if (s == "punch") return BenchmarkId::Punch;
  if (s == "multi-object") return BenchmarkId::MultiObject;
  throw MeshError("unknown benchmark id '" + s + "'");
}

std::string benchmark_to_string(BenchmarkId id) {
  switch (id) {
    case BenchmarkId::BoxSelfContact: return "box-self-contact";
    case BenchmarkId::CBox: return "c-box";
    case BenchmarkId::Punch: return "punch";
    case BenchmarkId::MultiObject: return "multi-object";
  }
  return "?";
}

}  // namespace tmc

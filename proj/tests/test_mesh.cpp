#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "tmc/mesh.hpp"
#include "tmc/quadrature.hpp"

using namespace tmc;

namespace {

std::string temp_path(const std::string& name) {
  return std::string("/tmp/tmc_test_") + name;
}

double benchmark_domain_area(BenchmarkId id) {
  switch (id) {
    case BenchmarkId::BoxSelfContact:
      return 2.0 * 0.5;  // bodies + medium fill the rectangle
    case BenchmarkId::CBox:
      // C member + cavity + end column: 1.0 x 0.5 plus the 0.1-wide column.
      return 1.0 * 0.5 + 0.1 * 0.5;
    default:
      return -1.0;
  }
}

}  // namespace

TEST_CASE("element geometry basics") {
  PolygonalMesh mesh;
  mesh.vertices = {{0, 0}, {1, 0}, {1, 1}, {0, 1}, {2, 0}, {2, 1}};
  mesh.elements = {{0, 1, 2, 3}, {1, 4, 5, 2}};
  mesh.element_region = {Region::body(0), Region::body(0)};
  mesh.finalize_edges();

  const auto g = element_geometry(mesh, 0);
  CHECK(g.centroid.x() == doctest::Approx(0.5));
  CHECK(g.centroid.y() == doctest::Approx(0.5));
  CHECK(g.area == doctest::Approx(1.0));
  CHECK(g.diameter == doctest::Approx(std::sqrt(2.0)));
  CHECK(g.n_vertices == 4);

  CHECK(mesh.n_edges() == 7);
  CHECK(validate(mesh).empty());
}

TEST_CASE("triangle and hexagon geometry") {
  PolygonalMesh mesh;
  mesh.vertices = {{0, 0}, {1, 0}, {0, 1}};
  mesh.elements = {{0, 1, 2}};
  mesh.element_region = {Region::body(0)};
  mesh.finalize_edges();
  const auto g = element_geometry(mesh, 0);
  CHECK(g.area == doctest::Approx(0.5));
  CHECK(g.centroid.x() == doctest::Approx(1.0 / 3.0));
  CHECK(g.centroid.y() == doctest::Approx(1.0 / 3.0));

  PolygonalMesh hex;
  for (int i = 0; i < 6; ++i) {
    const double a = M_PI * i / 3.0;
    hex.vertices.emplace_back(std::cos(a), std::sin(a));
  }
  hex.elements = {{0, 1, 2, 3, 4, 5}};
  hex.element_region = {Region::body(0)};
  hex.finalize_edges();
  CHECK(element_geometry(hex, 0).area ==
        doctest::Approx(3.0 * std::sqrt(3.0) / 2.0).epsilon(1e-12));
}

TEST_CASE("validate flags broken meshes") {
  PolygonalMesh mesh;
  mesh.vertices = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  mesh.elements = {{0, 1, 2, 3}};
  mesh.element_region = {Region::body(0)};
  mesh.finalize_edges();
  CHECK(validate(mesh).empty());

  SUBCASE("negative orientation") {
    mesh.elements = {{3, 2, 1, 0}};
    mesh.finalize_edges();
    const auto diags = validate(mesh);
    REQUIRE(diags.size() >= 1);
    CHECK(diags[0].find("negative area") != std::string::npos);
    CHECK(diags[0].find("0") != std::string::npos);
  }
  SUBCASE("repeated vertex") {
    mesh.elements = {{0, 1, 1, 2, 3}};
    mesh.finalize_edges();
    const auto diags = validate(mesh);
    REQUIRE(!diags.empty());
    CHECK(diags[0].find("degenerate ring") != std::string::npos);
  }
  SUBCASE("T-junction not absorbed into the coarse ring") {
    // Two fine quads on the right share midpoint vertex 4 along x = 1, but
    // the left quad's ring skips it.
    PolygonalMesh m;
    m.vertices = {{0, 0}, {1, 0}, {1, 1}, {0, 1}, {1, 0.5}, {2, 0}, {2, 0.5}, {2, 1}};
    m.elements = {{0, 1, 2, 3}, {1, 5, 6, 4}, {4, 6, 7, 2}};
    m.element_region = {Region::body(0), Region::body(0), Region::body(0)};
    m.finalize_edges();
    bool found = false;
    for (const auto& d : validate(m))
      if (d.find("non-conforming edge") != std::string::npos) found = true;
    CHECK(found);
  }
}

TEST_CASE("mesh file round-trip") {
  const std::string path = temp_path("square.json");
  {
    std::ofstream out(path);
    out << R"({"vertices": [[0,0],[1,0],[1,1],[0,1]],
               "elements": [[0,1,2,3]],
               "regions": ["body0"],
               "boundary_sets": {"bottom": {"vertices": [0,1], "edges": [[0,1]]}}})";
  }
  PolygonalMesh mesh = load_mesh(path);
  CHECK(mesh.n_vertices() == 4);
  CHECK(mesh.n_elements() == 1);
  CHECK(element_geometry(mesh, 0).area == doctest::Approx(1.0));
  CHECK(mesh.boundary_sets.count("bottom") == 1);

  const std::string path2 = temp_path("square2.json");
  save_mesh(mesh, path2);
  PolygonalMesh mesh2 = load_mesh(path2);
  REQUIRE(mesh2.n_vertices() == mesh.n_vertices());
  for (int v = 0; v < mesh.n_vertices(); ++v)
    CHECK(mesh2.vertices[v] == mesh.vertices[v]);  // bit-identical coordinates
  CHECK(mesh2.elements == mesh.elements);

  // Saving a loaded file reproduces it modulo whitespace.
  const std::string path3 = temp_path("square3.json");
  save_mesh(mesh2, path3);
  std::stringstream a, b;
  a << std::ifstream(path2).rdbuf();
  b << std::ifstream(path3).rdbuf();
  auto strip = [](std::string s) {
    std::string out;
    for (char c : s)
      if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(c);
    return out;
  };
  CHECK(strip(a.str()) == strip(b.str()));
}

TEST_CASE("mesh file errors") {
  const std::string path = temp_path("bad.json");
  {
    std::ofstream out(path);
    out << "{\"vertices\": [[0,0],[1,0],[1,1],[0,1]],\n \"elements\": [[0,1,1,2]],\n"
           " \"regions\": [\"body0\"]}";
  }
  CHECK_THROWS_WITH_AS(load_mesh(path), doctest::Contains("degenerate ring"), MeshError);

  {
    std::ofstream out(path);
    out << "{\"vertices\": [[0,0],\n  [1,0],,]}";
  }
  try {
    load_mesh(path);
    FAIL("expected a parse error");
  } catch (const MeshError& err) {
    CHECK(std::string(err.what()).find("line") != std::string::npos);
  }

  // CW-stored ring is normalized on load.
  {
    std::ofstream out(path);
    out << R"({"vertices": [[0,0],[1,0],[1,1],[0,1]], "elements": [[3,2,1,0]], "regions": ["body0"]})";
  }
  PolygonalMesh mesh = load_mesh(path);
  CHECK(polygon_area(mesh.ring_coords(0)) > 0.0);
}

TEST_CASE("generated benchmark meshes validate") {
  for (const auto id : {BenchmarkId::BoxSelfContact, BenchmarkId::CBox, BenchmarkId::Punch,
                        BenchmarkId::MultiObject}) {
    for (int r = 0; r <= 1; ++r) {
      const PolygonalMesh mesh = generate_benchmark_mesh(id, r);
      INFO(benchmark_to_string(id), " refinement ", r);
      CHECK(validate(mesh).empty());
      double area = 0.0;
      for (int e = 0; e < mesh.n_elements(); ++e) area += element_geometry(mesh, e).area;
      const double exact = benchmark_domain_area(id);
      if (exact > 0.0) CHECK(area == doctest::Approx(exact).epsilon(1e-10));
    }
  }
  CHECK_THROWS_AS(benchmark_from_string("no-such-benchmark"), MeshError);
}

TEST_CASE("box refinement 0 is fully conforming, refinement 1 hangs nodes") {
  const PolygonalMesh m0 = generate_benchmark_mesh(BenchmarkId::BoxSelfContact, 0);
  for (int e = 0; e < m0.n_elements(); ++e) CHECK(m0.elements[e].size() == 4);
  for (const auto& edge : m0.edges) CHECK(edge.elements.size() <= 2);

  const PolygonalMesh m1 = generate_benchmark_mesh(BenchmarkId::BoxSelfContact, 1);
  CHECK(validate(m1).empty());
  // Medium cells half the body edge length.
  double medium_h = 0.0, body_h = 0.0;
  for (int e = 0; e < m1.n_elements(); ++e) {
    const auto g = element_geometry(m1, e);
    if (m1.element_region[e].is_medium())
      medium_h = std::max(medium_h, g.diameter / std::sqrt(2.0));
    else
      body_h = std::max(body_h, g.diameter / std::sqrt(2.0));
  }
  CHECK(medium_h == doctest::Approx(body_h / 2.0).epsilon(1e-9));

  // Body elements along the transition carry hanging nodes (>= 5 ring verts).
  int hanging_rings = 0;
  for (int e = 0; e < m1.n_elements(); ++e)
    if (!m1.element_region[e].is_medium() && m1.elements[e].size() >= 5) ++hanging_rings;
  CHECK(hanging_rings > 0);

  // Each transition edge of a coarse ring appears as >= 2 collinear sub-edges.
  int split_edges = 0;
  for (int e = 0; e < m1.n_elements(); ++e) {
    if (m1.element_region[e].is_medium()) continue;
    const auto& ring = m1.elements[e];
    const int n = static_cast<int>(ring.size());
    if (n < 5) continue;
    for (int i = 0; i < n; ++i) {
      const Vector2d a = m1.vertices[ring[i]];
      const Vector2d b = m1.vertices[ring[(i + 1) % n]];
      const Vector2d c = m1.vertices[ring[(i + 2) % n]];
      const Vector2d d1 = (b - a).normalized(), d2 = (c - b).normalized();
      if (std::abs(d1.x() * d2.y() - d1.y() * d2.x()) < 1e-12) ++split_edges;
    }
  }
  CHECK(split_edges > 0);
}

TEST_CASE("c-box initial gap and probe chains") {
  const PolygonalMesh mesh = generate_benchmark_mesh(BenchmarkId::CBox, 0);
  const auto& upper = mesh.boundary_sets.at("upper-beam-inner").vertices;
  const auto& lower = mesh.boundary_sets.at("lower-beam-inner").vertices;
  REQUIRE(!upper.empty());
  REQUIRE(!lower.empty());
  for (int v : upper) CHECK(mesh.vertices[v].y() == doctest::Approx(0.4));
  for (int v : lower) CHECK(mesh.vertices[v].y() == doctest::Approx(0.1));
}

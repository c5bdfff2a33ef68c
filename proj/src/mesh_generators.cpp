#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "tmc/mesh.hpp"
#include "tmc/quadrature.hpp"

namespace tmc {

namespace {

// Structured-patch builder. Vertices are deduplicated through a quantized
// coordinate pool (1e-7), which glues patches along shared lines even when
// the coordinates were computed by different arithmetic routes.
class MeshBuilder {
 public:
  int vertex(double x, double y) {
    const std::pair<long long, long long> key{std::llround(x * 1e7), std::llround(y * 1e7)};
    auto it = pool_.find(key);
    if (it != pool_.end()) return it->second;
    const int id = static_cast<int>(verts_.size());
    verts_.emplace_back(x, y);
    pool_.emplace(key, id);
    return id;
  }
  int vertex(const Vector2d& p) { return vertex(p.x(), p.y()); }

  void polygon(std::vector<int> ring, Region region) {
    std::vector<Vector2d> coords;
    coords.reserve(ring.size());
    for (int v : ring) coords.push_back(verts_[v]);
    if (polygon_area(coords) < 0.0) std::reverse(ring.begin(), ring.end());
    elems_.push_back(std::move(ring));
    regions_.push_back(region);
  }

  void quad(const Vector2d& a, const Vector2d& b, const Vector2d& c, const Vector2d& d,
            Region region) {
    polygon({vertex(a), vertex(b), vertex(c), vertex(d)}, region);
  }

  /// Axis-aligned nx x ny grid of quads with origin (x0, y0).
  void grid(double x0, double y0, int nx, int ny, double hx, double hy, Region region) {
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        quad({x0 + i * hx, y0 + j * hy}, {x0 + (i + 1) * hx, y0 + j * hy},
             {x0 + (i + 1) * hx, y0 + (j + 1) * hy}, {x0 + i * hx, y0 + (j + 1) * hy}, region);
  }

  /// Quad patch between two polylines with equal vertex counts; row j of the
  /// lattice interpolates linearly between bottom and top.
  void transfinite(const std::vector<Vector2d>& bottom, const std::vector<Vector2d>& top,
                   int rows, Region region) {
    if (bottom.size() != top.size() || bottom.size() < 2)
      throw std::invalid_argument("transfinite: polyline size mismatch");
    const int cols = static_cast<int>(bottom.size()) - 1;
    auto at = [&](int i, int j) -> Vector2d {
      const double t = static_cast<double>(j) / rows;
      return (1.0 - t) * bottom[i] + t * top[i];
    };
    for (int j = 0; j < rows; ++j)
      for (int i = 0; i < cols; ++i)
        quad(at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1), region);
  }

  /// Absorb hanging nodes: every vertex lying strictly inside a ring edge is
  /// inserted into that ring, making the mesh conforming by construction.
  PolygonalMesh finish() {
    std::vector<std::pair<double, int>> by_x;
    by_x.reserve(verts_.size());
    for (int v = 0; v < static_cast<int>(verts_.size()); ++v) by_x.emplace_back(verts_[v].x(), v);
    std::sort(by_x.begin(), by_x.end());

    const double tol = 1e-9;
    for (auto& ring : elems_) {
      std::vector<int> out;
      const int n = static_cast<int>(ring.size());
      for (int i = 0; i < n; ++i) {
        const int a = ring[i], b = ring[(i + 1) % n];
        out.push_back(a);
        const Vector2d pa = verts_[a], pb = verts_[b];
        const double lo = std::min(pa.x(), pb.x()) - tol, hi = std::max(pa.x(), pb.x()) + tol;
        auto first = std::lower_bound(by_x.begin(), by_x.end(), std::make_pair(lo, -1));
        std::vector<std::pair<double, int>> on_edge;  // (parameter, vertex)
        const Vector2d d = pb - pa;
        const double len = d.norm();
        for (auto it = first; it != by_x.end() && it->first <= hi; ++it) {
          const int v = it->second;
          if (v == a || v == b) continue;
          const Vector2d p = verts_[v];
          const double cross = d.x() * (p - pa).y() - d.y() * (p - pa).x();
          if (std::abs(cross) > tol * len) continue;
          const double t = d.dot(p - pa) / (len * len);
          if (t > tol / len && t < 1.0 - tol / len) on_edge.emplace_back(t, v);
        }
        std::sort(on_edge.begin(), on_edge.end());
        for (const auto& [t, v] : on_edge) out.push_back(v);
      }
      ring = std::move(out);
    }

    PolygonalMesh mesh;
    mesh.vertices = std::move(verts_);
    mesh.elements = std::move(elems_);
    mesh.element_region = std::move(regions_);
    mesh.finalize_edges();
    return mesh;
  }

 private:
  std::map<std::pair<long long, long long>, int> pool_;
  std::vector<Vector2d> verts_;
  std::vector<std::vector<int>> elems_;
  std::vector<Region> regions_;
};

std::vector<Vector2d> refine_polyline(const std::vector<Vector2d>& pts, int parts) {
  if (parts <= 1) return pts;
  std::vector<Vector2d> out;
  out.reserve((pts.size() - 1) * parts + 1);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    for (int m = 0; m < parts; ++m)
      out.push_back(pts[i] + (static_cast<double>(m) / parts) * (pts[i + 1] - pts[i]));
  out.push_back(pts.back());
  return out;
}

std::vector<Vector2d> segment_points(const Vector2d& a, const Vector2d& b, int n) {
  std::vector<Vector2d> out;
  out.reserve(n + 1);
  for (int i = 0; i <= n; ++i) out.push_back(a + (static_cast<double>(i) / n) * (b - a));
  return out;
}

void add_segment_set(PolygonalMesh& mesh, const std::string& name, const Vector2d& a,
                     const Vector2d& b) {
  BoundarySet set;
  set.vertices = vertices_on_segment(mesh, a, b);
  std::vector<char> member(mesh.n_vertices(), 0);
  for (int v : set.vertices) member[v] = 1;
  for (const auto& e : mesh.edges)
    if (member[e.v0] && member[e.v1]) set.edges.push_back({e.v0, e.v1});
  mesh.boundary_sets[name] = std::move(set);
}

void add_chain_set(PolygonalMesh& mesh, const std::string& name,
                   const std::vector<Vector2d>& chain) {
  BoundarySet set;
  for (const auto& p : chain) set.vertices.push_back(vertex_at(mesh, p));
  std::vector<char> member(mesh.n_vertices(), 0);
  for (int v : set.vertices) member[v] = 1;
  for (const auto& e : mesh.edges)
    if (member[e.v0] && member[e.v1]) set.edges.push_back({e.v0, e.v1});
  mesh.boundary_sets[name] = std::move(set);
}

// Box with a third-medium core: outer 2 x 0.5, wall thickness 0.1.
PolygonalMesh make_box(int refinement) {
  const double L = 2.0, H = 0.5, T = 0.1;
  const double hb = 0.1;
  const int nx = static_cast<int>(std::lround(L / hb));
  const int ny = static_cast<int>(std::lround(H / hb));
  MeshBuilder mb;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const double x = i * hb, y = j * hb;
      const bool interior = x > T - 1e-12 && x < L - T - 1e-12 && y > T - 1e-12 && y < H - T - 1e-12;
      if (!interior)
        mb.grid(x, y, 1, 1, hb, hb, Region::body(0));
    }
  const double hm = hb / (1 << refinement);
  const int mx = static_cast<int>(std::lround((L - 2 * T) / hm));
  const int my = static_cast<int>(std::lround((H - 2 * T) / hm));
  mb.grid(T, T, mx, my, hm, hm, Region::medium());

  PolygonalMesh mesh = mb.finish();
  BoundarySet bl, br;
  bl.vertices = {vertex_at(mesh, {0.0, 0.0})};
  br.vertices = {vertex_at(mesh, {L, 0.0})};
  mesh.boundary_sets["bottom-left-corner"] = bl;
  mesh.boundary_sets["bottom-right-corner"] = br;
  add_segment_set(mesh, "top-load-band", {L / 2 - 0.1, H}, {L / 2 + 0.1, H});
  add_segment_set(mesh, "upper-flange-inner", {T, H - T}, {L - T, H - T});
  add_segment_set(mesh, "lower-flange-inner", {T, T}, {L - T, T});
  return mesh;
}

// C-shaped member (spine at the left, two horizontal beams) with the cavity
// and a column past the open end filled by the third medium.
PolygonalMesh make_cbox(int refinement) {
  const double L = 1.0, t = 0.1, g0 = 0.3;
  const double H = 2 * t + g0;  // 0.5
  const double h = 0.05;
  MeshBuilder mb;
  auto cells = [&](double a, double b) { return static_cast<int>(std::lround((b - a) / h)); };
  // spine + beams, one body
  mb.grid(0, 0, cells(0, t), cells(0, H), h, h, Region::body(0));
  mb.grid(t, 0, cells(t, L), cells(0, t), h, h, Region::body(0));
  mb.grid(t, H - t, cells(t, L), cells(0, t), h, h, Region::body(0));
  const double hm = h / (1 << refinement);
  const double wc = 0.1;  // medium column width at the open end
  mb.grid(t, t, static_cast<int>(std::lround((L - t) / hm)),
          static_cast<int>(std::lround(g0 / hm)), hm, hm, Region::medium());
  mb.grid(L, 0, static_cast<int>(std::lround(wc / hm)),
          static_cast<int>(std::lround(H / hm)), hm, hm, Region::medium());

  PolygonalMesh mesh = mb.finish();
  add_segment_set(mesh, "left-wall", {0, 0}, {0, H});
  BoundarySet lp;
  lp.vertices = {vertex_at(mesh, {L, H})};
  mesh.boundary_sets["load-point"] = lp;
  add_segment_set(mesh, "upper-beam-inner", {t, H - t}, {L, H - t});
  add_segment_set(mesh, "lower-beam-inner", {t, t}, {L, t});
  return mesh;
}

// Quarter-disc lattice point: square (u, v) in [0,1]^2 mapped ellipticly onto
// the quarter disc spanning +x / -y around `center`.
Vector2d quarter_disc_point(const Vector2d& center, double radius, double u, double v) {
  return center + radius * Vector2d(u * std::sqrt(1.0 - 0.5 * v * v),
                                    -v * std::sqrt(1.0 - 0.5 * u * u));
}

// Half punch problem: rectangle 2 x 1, quarter-disc punch of radius 1 above
// it with an initial medium-filled gap of 0.1; symmetry plane at x = 0.
PolygonalMesh make_punch(int refinement) {
  const double gap = 0.1, R = 1.0;
  const Vector2d center(0.0, 1.0 + gap + R);
  const int np = 6;
  MeshBuilder mb;

  for (int j = 0; j < np; ++j)
    for (int i = 0; i < np; ++i) {
      const double u0 = static_cast<double>(i) / np, u1 = static_cast<double>(i + 1) / np;
      const double v0 = static_cast<double>(j) / np, v1 = static_cast<double>(j + 1) / np;
      mb.quad(quarter_disc_point(center, R, u0, v0), quarter_disc_point(center, R, u1, v0),
              quarter_disc_point(center, R, u1, v1), quarter_disc_point(center, R, u0, v1),
              Region::body(1));
    }

  const double hr = 1.0 / (2 * np);
  mb.grid(0, 0, static_cast<int>(std::lround(2.0 / hr)), static_cast<int>(std::lround(1.0 / hr)),
          hr, hr, Region::body(0));

  // Arc chain from the bottom pole (0, 1.1) to the equator (1, 2.1): the
  // v = 1 edge walked in u, then the u = 1 edge walked back in v.
  std::vector<Vector2d> arc;
  for (int i = 0; i <= np; ++i)
    arc.push_back(quarter_disc_point(center, R, static_cast<double>(i) / np, 1.0));
  for (int j = np - 1; j >= 0; --j)
    arc.push_back(quarter_disc_point(center, R, 1.0, static_cast<double>(j) / np));

  const int parts = 1 << refinement;
  const std::vector<Vector2d> top = refine_polyline(arc, parts);
  const std::vector<Vector2d> bottom =
      segment_points({0, 1.0}, {1.0, 1.0}, static_cast<int>(top.size()) - 1);
  mb.transfinite(bottom, top, 3 * parts, Region::medium());

  PolygonalMesh mesh = mb.finish();
  add_segment_set(mesh, "symmetry", {0, 0}, {0, center.y()});
  add_segment_set(mesh, "bottom", {0, 0}, {2, 0});
  add_segment_set(mesh, "punch-top", {0, center.y()}, {1.0, center.y()});
  add_chain_set(mesh, "punch-arc", top);
  add_segment_set(mesh, "rect-top", {0, 1.0}, {2, 1.0});
  return mesh;
}

// Thin strip with seven semicircular punches pressed onto it, each with its
// own medium collar.
PolygonalMesh make_multi(int refinement) {
  const double L = 8.0, H = 0.2, R = 0.2, gap = 0.1;
  const double h = 0.1;
  const int nh = 2;  // half-disc lattice density
  MeshBuilder mb;
  mb.grid(0, 0, static_cast<int>(std::lround(L / h)), static_cast<int>(std::lround(H / h)), h, h,
          Region::body(0));

  const double chord_y = H + gap + R;
  std::vector<std::vector<Vector2d>> fine_arcs;
  for (int s = 0; s < 7; ++s) {
    const Vector2d center(1.0 + s, chord_y);
    // Two mirrored quarter-disc patches make the half disc (flat side up).
    for (int j = 0; j < nh; ++j)
      for (int i = 0; i < nh; ++i) {
        const double u0 = static_cast<double>(i) / nh, u1 = static_cast<double>(i + 1) / nh;
        const double v0 = static_cast<double>(j) / nh, v1 = static_cast<double>(j + 1) / nh;
        mb.quad(quarter_disc_point(center, R, u0, v0), quarter_disc_point(center, R, u1, v0),
                quarter_disc_point(center, R, u1, v1), quarter_disc_point(center, R, u0, v1),
                Region::body(1 + s));
        auto mirror = [&](double u, double v) {
          Vector2d p = quarter_disc_point(center, R, u, v);
          p.x() = 2 * center.x() - p.x();
          return p;
        };
        mb.quad(mirror(u0, v0), mirror(u1, v0), mirror(u1, v1), mirror(u0, v1),
                Region::body(1 + s));
      }
    // Arc from the left chord end around the bottom to the right chord end.
    std::vector<Vector2d> arc;
    for (int j = 0; j <= nh; ++j) {
      Vector2d p = quarter_disc_point(center, R, 1.0, static_cast<double>(j) / nh);
      p.x() = 2 * center.x() - p.x();
      arc.push_back(p);
    }
    for (int i = nh - 1; i >= 0; --i) {
      Vector2d p = quarter_disc_point(center, R, static_cast<double>(i) / nh, 1.0);
      p.x() = 2 * center.x() - p.x();
      arc.push_back(p);
    }
    for (int i = 1; i <= nh; ++i)
      arc.push_back(quarter_disc_point(center, R, static_cast<double>(i) / nh, 1.0));
    for (int j = 1; j <= nh; ++j)
      arc.push_back(quarter_disc_point(center, R, 1.0, static_cast<double>(nh - j) / nh));

    const int parts = 1 << refinement;
    const std::vector<Vector2d> top = refine_polyline(arc, parts);
    const std::vector<Vector2d> bottom = segment_points(
        {center.x() - R, H}, {center.x() + R, H}, static_cast<int>(top.size()) - 1);
    mb.transfinite(bottom, top, 2 * parts, Region::medium());
    fine_arcs.push_back(top);
  }

  PolygonalMesh mesh = mb.finish();
  add_segment_set(mesh, "left-end", {0, 0}, {0, H});
  add_segment_set(mesh, "right-end", {L, 0}, {L, H});
  {
    BoundarySet tops;
    std::vector<char> member(mesh.n_vertices(), 0);
    for (int s = 0; s < 7; ++s) {
      const Vector2d c(1.0 + s, chord_y);
      for (int v : vertices_on_segment(mesh, {c.x() - R, chord_y}, {c.x() + R, chord_y})) {
        if (!member[v]) tops.vertices.push_back(v);
        member[v] = 1;
      }
    }
    for (const auto& e : mesh.edges)
      if (member[e.v0] && member[e.v1]) tops.edges.push_back({e.v0, e.v1});
    mesh.boundary_sets["load-tops"] = std::move(tops);
  }
  add_chain_set(mesh, "center-arc", fine_arcs[3]);
  add_segment_set(mesh, "rect-top", {0, H}, {L, H});
  return mesh;
}

}  // namespace

std::vector<int> vertices_on_segment(const PolygonalMesh& mesh, const Vector2d& a,
                                     const Vector2d& b, double tol) {
  const Vector2d d = b - a;
  const double len = d.norm();
  std::vector<std::pair<double, int>> hits;
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    const Vector2d p = mesh.vertices[v];
    const double cross = d.x() * (p - a).y() - d.y() * (p - a).x();
    if (std::abs(cross) > tol * len) continue;
    const double t = d.dot(p - a) / (len * len);
    if (t < -tol / len || t > 1.0 + tol / len) continue;
    hits.emplace_back(t, v);
  }
  std::sort(hits.begin(), hits.end());
  std::vector<int> out;
  out.reserve(hits.size());
  for (const auto& [t, v] : hits) out.push_back(v);
  return out;
}

int vertex_at(const PolygonalMesh& mesh, const Vector2d& p, double tol) {
  for (int v = 0; v < mesh.n_vertices(); ++v)
    if ((mesh.vertices[v] - p).norm() <= tol) return v;
  throw MeshError("no mesh vertex at (" + std::to_string(p.x()) + ", " + std::to_string(p.y()) +
                  ")");
}

PolygonalMesh generate_benchmark_mesh(BenchmarkId problem, int refinement) {
  if (refinement < 0) throw MeshError("refinement must be >= 0");
  switch (problem) {
    case BenchmarkId::BoxSelfContact: return make_box(refinement);
    case BenchmarkId::CBox: return make_cbox(refinement);
    case BenchmarkId::Punch: return make_punch(refinement);
    case BenchmarkId::MultiObject: return make_multi(refinement);
  }
  throw MeshError("unknown benchmark id");
}

}  // namespace tmc

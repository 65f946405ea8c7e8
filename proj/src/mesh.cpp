#include "spc/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

namespace spc {

namespace {

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

double length2(Point a, Point b) {
  const Point d = b - a;
  return dot(d, d);
}

// Strict total order on edges: longer wins, ties go to the smaller
// (min, max) vertex-index pair.
bool edge_longer(const std::vector<Point>& v, int a0, int a1, int b0, int b1) {
  const double la = length2(v[a0], v[a1]);
  const double lb = length2(v[b0], v[b1]);
  if (la != lb) return la > lb;
  const auto pa = std::minmax(a0, a1);
  const auto pb = std::minmax(b0, b1);
  return pa < pb;
}

// Local index k of the vertex opposite the longest edge.
int longest_opposite(const std::vector<Point>& v, const Triangle& t) {
  int best = 0;
  for (int k = 1; k < 3; ++k) {
    if (edge_longer(v, t[(k + 1) % 3], t[(k + 2) % 3], t[(best + 1) % 3],
                    t[(best + 2) % 3]))
      best = k;
  }
  return best;
}

class Bisector {
 public:
  explicit Bisector(const Mesh& mesh)
      : vertices_(mesh.vertices().begin(), mesh.vertices().end()),
        triangles_(mesh.triangles().begin(), mesh.triangles().end()),
        touched_(mesh.num_triangles(), 0) {
    parents_.reserve(vertices_.size());
    for (std::size_t v = 0; v < vertices_.size(); ++v)
      parents_.push_back(mesh.parent_edge(static_cast<int>(v)));
    for (std::size_t t = 0; t < triangles_.size(); ++t) {
      for (int k = 0; k < 3; ++k)
        attach(triangles_[t][(k + 1) % 3], triangles_[t][(k + 2) % 3],
               static_cast<int>(t));
    }
  }

  void refine(int t) {
    if (touched_[t]) return;
    bisect_across_longest(t);
  }

  Mesh finish(Domain domain, int generation) {
    return Mesh(domain, std::move(vertices_), std::move(triangles_),
                generation, std::move(parents_));
  }

 private:
  void attach(int a, int b, int t) {
    auto [it, fresh] = edge_tris_.try_emplace(edge_key(a, b), std::array<int, 2>{-1, -1});
    auto& slot = it->second;
    if (slot[0] < 0) slot[0] = t;
    else slot[1] = t;
  }
  void detach(int a, int b, int t) {
    auto it = edge_tris_.find(edge_key(a, b));
    auto& slot = it->second;
    if (slot[0] == t) slot[0] = slot[1];
    slot[1] = -1;
    if (slot[0] < 0) edge_tris_.erase(it);
  }
  int neighbor(int a, int b, int t) const {
    const auto& slot = edge_tris_.at(edge_key(a, b));
    return slot[0] == t ? slot[1] : slot[0];
  }

  // Rivara: bisect t across its longest edge; first make that edge the
  // longest edge of the neighbor by refining the neighbor recursively.
  void bisect_across_longest(int t) {
    const int k = longest_opposite(vertices_, triangles_[t]);
    const int a = triangles_[t][(k + 1) % 3];
    const int b = triangles_[t][(k + 2) % 3];
    for (;;) {
      const int n = neighbor(a, b, t);
      if (n < 0) {
        const int m = new_midpoint(a, b);
        split(t, a, b, m);
        return;
      }
      const int kn = longest_opposite(vertices_, triangles_[n]);
      const int na = triangles_[n][(kn + 1) % 3];
      const int nb = triangles_[n][(kn + 2) % 3];
      if (edge_key(na, nb) == edge_key(a, b)) {
        const int m = new_midpoint(a, b);
        split(t, a, b, m);
        split(n, a, b, m);
        return;
      }
      bisect_across_longest(n);
    }
  }

  int new_midpoint(int a, int b) {
    const Point p = 0.5 * (vertices_[a] + vertices_[b]);
    vertices_.push_back(p);
    parents_.push_back({std::min(a, b), std::max(a, b)});
    return static_cast<int>(vertices_.size()) - 1;
  }

  // Split triangle t across its edge {a,b} at vertex m, keeping orientation.
  void split(int t, int a, int b, int m) {
    Triangle tri = triangles_[t];
    // Rotate so the split edge is (tri[0], tri[1]).
    while (!((tri[0] == a && tri[1] == b) || (tri[0] == b && tri[1] == a)))
      std::rotate(tri.begin(), tri.begin() + 1, tri.end());
    const int p = tri[0], q = tri[1], c = tri[2];
    detach(p, q, t);
    detach(q, c, t);
    const int t2 = static_cast<int>(triangles_.size());
    triangles_[t] = {p, m, c};
    triangles_.push_back({m, q, c});
    touched_[t] = 1;
    touched_.push_back(1);
    attach(p, m, t);
    attach(m, c, t);
    attach(m, q, t2);
    attach(q, c, t2);
    attach(c, m, t2);
  }

  std::vector<Point> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<std::array<int, 2>> parents_;
  std::vector<char> touched_;
  std::unordered_map<std::uint64_t, std::array<int, 2>> edge_tris_;
};

}  // namespace

std::string to_string(Domain d) {
  return d == Domain::UnitSquare ? "UnitSquare" : "LShape";
}

double domain_area(Domain d) { return d == Domain::UnitSquare ? 1.0 : 3.0; }

bool on_domain_boundary(Domain d, Point p) {
  if (d == Domain::UnitSquare) {
    return p.x == 0.0 || p.x == 1.0 || p.y == 0.0 || p.y == 1.0;
  }
  if (p.x == -1.0 || p.x == 1.0 || p.y == -1.0 || p.y == 1.0) return true;
  if (p.x == 0.0 && p.y <= 0.0) return true;
  if (p.y == 0.0 && p.x >= 0.0) return true;
  return false;
}

Mesh::Mesh(Domain domain, std::vector<Point> vertices,
           std::vector<Triangle> triangles, int generation,
           std::vector<std::array<int, 2>> parents)
    : domain_(domain),
      generation_(generation),
      vertices_(std::move(vertices)),
      triangles_(std::move(triangles)),
      parents_(std::move(parents)) {
  if (parents_.empty()) parents_.assign(vertices_.size(), {-1, -1});
  if (parents_.size() != vertices_.size())
    throw std::invalid_argument("Mesh: parent list does not match vertices");
  for (const auto& t : triangles_)
    for (int v : t)
      if (v < 0 || static_cast<std::size_t>(v) >= vertices_.size())
        throw std::invalid_argument("Mesh: triangle references vertex " +
                                    std::to_string(v));
  build_topology();
}

void Mesh::build_topology() {
  std::unordered_map<std::uint64_t, int> index;
  index.reserve(triangles_.size() * 2);
  triangle_edges_.assign(triangles_.size(), {-1, -1, -1});
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    for (int k = 0; k < 3; ++k) {
      const int a = triangles_[t][(k + 1) % 3];
      const int b = triangles_[t][(k + 2) % 3];
      auto [it, fresh] =
          index.try_emplace(edge_key(a, b), static_cast<int>(edges_.size()));
      if (fresh) {
        edges_.push_back({std::min(a, b), std::max(a, b),
                          static_cast<int>(t), -1});
      } else {
        Edge& e = edges_[it->second];
        if (e.t1 >= 0)
          throw std::invalid_argument("Mesh: edge shared by three triangles");
        e.t1 = static_cast<int>(t);
      }
      triangle_edges_[t][k] = it->second;
    }
  }
  boundary_vertex_.assign(vertices_.size(), 0);
  for (const Edge& e : edges_) {
    if (e.boundary()) boundary_vertex_[e.v0] = boundary_vertex_[e.v1] = 1;
  }
  interior_index_.assign(vertices_.size(), -1);
  interior_ids_.clear();
  for (std::size_t v = 0; v < vertices_.size(); ++v) {
    if (!boundary_vertex_[v]) {
      interior_index_[v] = static_cast<int>(interior_ids_.size());
      interior_ids_.push_back(static_cast<int>(v));
    }
  }
  vt_offsets_.assign(vertices_.size() + 1, 0);
  for (const auto& t : triangles_)
    for (int v : t) ++vt_offsets_[v + 1];
  for (std::size_t v = 0; v < vertices_.size(); ++v)
    vt_offsets_[v + 1] += vt_offsets_[v];
  vt_index_.assign(vt_offsets_.back(), -1);
  std::vector<int> fill(vt_offsets_.begin(), vt_offsets_.end() - 1);
  for (std::size_t t = 0; t < triangles_.size(); ++t)
    for (int v : triangles_[t]) vt_index_[fill[v]++] = static_cast<int>(t);
}

std::array<Point, 3> Mesh::corners(int t) const {
  const Triangle& tri = triangles_[t];
  return {vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]};
}

double Mesh::signed_area(int t) const {
  const auto c = corners(t);
  return 0.5 * cross(c[1] - c[0], c[2] - c[0]);
}

double Mesh::diameter(int t) const {
  const auto c = corners(t);
  return std::sqrt(std::max({length2(c[0], c[1]), length2(c[1], c[2]),
                             length2(c[2], c[0])}));
}

double Mesh::min_angle(int t) const {
  const auto c = corners(t);
  double best = std::numbers::pi;
  for (int k = 0; k < 3; ++k) {
    const Point u = c[(k + 1) % 3] - c[k];
    const Point w = c[(k + 2) % 3] - c[k];
    best = std::min(best, std::atan2(std::abs(cross(u, w)), dot(u, w)));
  }
  return best;
}

double Mesh::min_angle() const {
  double best = std::numbers::pi;
  for (std::size_t t = 0; t < triangles_.size(); ++t)
    best = std::min(best, min_angle(static_cast<int>(t)));
  return best;
}

double Mesh::max_diameter() const {
  double h = 0.0;
  for (std::size_t t = 0; t < triangles_.size(); ++t)
    h = std::max(h, diameter(static_cast<int>(t)));
  return h;
}

double Mesh::total_area() const {
  double s = 0.0;
  for (std::size_t t = 0; t < triangles_.size(); ++t)
    s += area(static_cast<int>(t));
  return s;
}

Mesh make_initial_mesh(Domain domain) {
  // Grid of 1/2-cells; a cell is kept if its center lies in the domain.
  const double lo = domain == Domain::UnitSquare ? 0.0 : -1.0;
  const int cells = domain == Domain::UnitSquare ? 2 : 4;
  const double h = 0.5;
  const int n = cells + 1;
  auto inside = [&](double cx, double cy) {
    if (domain == Domain::UnitSquare) return true;
    return !(cx > 0.0 && cy < 0.0);
  };
  std::vector<int> id(n * n, -1);
  std::vector<Point> vertices;
  std::vector<Triangle> triangles;
  auto vid = [&](int i, int j) {
    int& slot = id[j * n + i];
    if (slot < 0) {
      slot = static_cast<int>(vertices.size());
      vertices.push_back({lo + h * i, lo + h * j});
    }
    return slot;
  };
  for (int j = 0; j < cells; ++j) {
    for (int i = 0; i < cells; ++i) {
      if (!inside(lo + h * (i + 0.5), lo + h * (j + 0.5))) continue;
      const int v00 = vid(i, j), v10 = vid(i + 1, j);
      const int v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
      triangles.push_back({v00, v10, v11});
      triangles.push_back({v00, v11, v01});
    }
  }
  return Mesh(domain, std::move(vertices), std::move(triangles), 0);
}

Mesh refine_bisection(const Mesh& mesh, std::span<const int> marked) {
  for (int t : marked) {
    if (t < 0 || static_cast<std::size_t>(t) >= mesh.num_triangles())
      throw std::out_of_range("refine_bisection: triangle id " +
                              std::to_string(t) + " out of range");
  }
  if (marked.empty()) return mesh;
  std::vector<int> order(marked.begin(), marked.end());
  std::sort(order.begin(), order.end());
  order.erase(std::unique(order.begin(), order.end()), order.end());
  Bisector bisector(mesh);
  for (int t : order) bisector.refine(t);
  return bisector.finish(mesh.domain(), mesh.generation() + 1);
}

Mesh refine_uniform(const Mesh& mesh) {
  std::vector<int> all(mesh.num_triangles());
  for (std::size_t t = 0; t < all.size(); ++t) all[t] = static_cast<int>(t);
  return refine_bisection(mesh, all);
}

std::vector<int> element_patch(const Mesh& mesh, int t) {
  if (t < 0 || static_cast<std::size_t>(t) >= mesh.num_triangles())
    throw std::out_of_range("element_patch: triangle id " + std::to_string(t) +
                            " out of range");
  std::vector<int> patch{t};
  for (int e : mesh.triangle_edges(t)) {
    const Edge& edge = mesh.edge(e);
    if (edge.boundary()) continue;
    patch.push_back(edge.t0 == t ? edge.t1 : edge.t0);
  }
  std::sort(patch.begin(), patch.end());
  return patch;
}

std::vector<double> prolongate_nodal(const Mesh& coarse, const Mesh& fine,
                                     std::span<const double> values) {
  if (values.size() != coarse.num_vertices())
    throw std::invalid_argument("prolongate_nodal: size mismatch");
  std::vector<double> out(fine.num_vertices(), 0.0);
  std::copy(values.begin(), values.end(), out.begin());
  // Bisection appends vertices, and parents always precede children.
  for (std::size_t v = coarse.num_vertices(); v < fine.num_vertices(); ++v) {
    const auto par = fine.parent_edge(static_cast<int>(v));
    if (par[0] < 0)
      throw std::invalid_argument(
          "prolongate_nodal: fine mesh is not a bisection of the coarse mesh");
    out[v] = 0.5 * (out[par[0]] + out[par[1]]);
  }
  return out;
}

MeshReport check_mesh(const Mesh& mesh) {
  MeshReport report;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    if (!(mesh.signed_area(static_cast<int>(t)) > 0.0))
      report.problems.push_back("triangle " + std::to_string(t) +
                                " has non-positive signed area");
  }
  for (std::size_t e = 0; e < mesh.num_edges(); ++e) {
    const Edge& edge = mesh.edge(static_cast<int>(e));
    if (!edge.boundary()) continue;
    const Point a = mesh.vertex(edge.v0), b = mesh.vertex(edge.v1);
    const Point mid = 0.5 * (a + b);
    if (!(on_domain_boundary(mesh.domain(), a) &&
          on_domain_boundary(mesh.domain(), b) &&
          on_domain_boundary(mesh.domain(), mid)))
      report.problems.push_back("edge " + std::to_string(e) +
                                " is used by one triangle but is not on the "
                                "domain boundary (hanging node)");
  }
  return report;
}

void write_mesh(std::ostream& out, const Mesh& mesh) {
  out << mesh.num_vertices() << ' ' << mesh.num_triangles() << ' '
      << mesh.num_edges() << '\n';
  const auto old = out.precision(17);
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    const Point& p = mesh.vertex(static_cast<int>(v));
    out << p.x << ' ' << p.y << ' '
        << (mesh.is_boundary_vertex(static_cast<int>(v)) ? 1 : 0) << '\n';
  }
  out.precision(old);
  for (const Triangle& t : mesh.triangles())
    out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

}  // namespace spc

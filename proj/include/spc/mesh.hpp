#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace spc {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }

enum class Domain { UnitSquare, LShape };

std::string to_string(Domain d);
double domain_area(Domain d);
/// True if the point lies on the boundary of the domain (exact test).
bool on_domain_boundary(Domain d, Point p);

using Triangle = std::array<int, 3>;

struct Edge {
  int v0 = -1;  // v0 < v1
  int v1 = -1;
  int t0 = -1;  // incident triangles, t1 == -1 on the boundary
  int t1 = -1;
  bool boundary() const { return t1 < 0; }
};

/// Conforming triangulation of a 2D polygonal domain.
///
/// Immutable once built: refinement returns a new mesh. Triangles are
/// counterclockwise. Local edge k of a triangle is the edge opposite its
/// local vertex k.
class Mesh {
 public:
  Mesh(Domain domain, std::vector<Point> vertices,
       std::vector<Triangle> triangles, int generation = 0,
       std::vector<std::array<int, 2>> parents = {});

  Domain domain() const { return domain_; }
  int generation() const { return generation_; }

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_triangles() const { return triangles_.size(); }
  std::size_t num_edges() const { return edges_.size(); }
  std::size_t num_interior_vertices() const { return interior_ids_.size(); }

  std::span<const Point> vertices() const { return vertices_; }
  std::span<const Triangle> triangles() const { return triangles_; }
  std::span<const Edge> edges() const { return edges_; }
  const Point& vertex(int v) const { return vertices_[v]; }
  const Triangle& triangle(int t) const { return triangles_[t]; }
  const Edge& edge(int e) const { return edges_[e]; }

  /// Edge ids of triangle t; entry k is opposite local vertex k.
  const std::array<int, 3>& triangle_edges(int t) const {
    return triangle_edges_[t];
  }
  bool is_boundary_vertex(int v) const { return boundary_vertex_[v] != 0; }
  /// Global ids of vertices not on the boundary, ascending.
  std::span<const int> interior_vertex_ids() const { return interior_ids_; }
  /// Interior index of a vertex, or -1 on the boundary.
  int interior_index(int v) const { return interior_index_[v]; }
  /// Endpoints of the edge a vertex was created on; {-1,-1} for vertices of
  /// the initial mesh.
  std::array<int, 2> parent_edge(int v) const { return parents_[v]; }

  /// Triangles incident to vertex v, ascending.
  std::span<const int> vertex_triangles(int v) const {
    return {vt_index_.data() + vt_offsets_[v],
            vt_index_.data() + vt_offsets_[v + 1]};
  }

  std::array<Point, 3> corners(int t) const;
  double signed_area(int t) const;
  double area(int t) const { return signed_area(t); }
  /// diam(K): the longest edge length.
  double diameter(int t) const;
  double min_angle(int t) const;
  double min_angle() const;
  double max_diameter() const;
  double total_area() const;

 private:
  void build_topology();

  Domain domain_;
  int generation_;
  std::vector<Point> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<Edge> edges_;
  std::vector<std::array<int, 3>> triangle_edges_;
  std::vector<std::array<int, 2>> parents_;
  std::vector<char> boundary_vertex_;
  std::vector<int> interior_ids_;
  std::vector<int> interior_index_;
  std::vector<int> vt_offsets_;
  std::vector<int> vt_index_;
};

/// Structured initial meshes: cells of size 1/2, each split by the diagonal
/// from its lower-left to its upper-right corner.
Mesh make_initial_mesh(Domain domain);

/// Longest-edge bisection of every marked triangle, with recursive closure
/// across longest edges so that the result is conforming. Ties between edges
/// of equal length go to the smaller vertex-index pair.
Mesh refine_bisection(const Mesh& mesh, std::span<const int> marked);

/// Refine every triangle once.
Mesh refine_uniform(const Mesh& mesh);

/// K together with every triangle sharing an interior edge with K.
std::vector<int> element_patch(const Mesh& mesh, int t);

/// Interpolates a nodal vector (one value per vertex of `coarse`) onto a
/// mesh obtained from it by bisection: new vertices take the mean of their
/// parent edge endpoints.
std::vector<double> prolongate_nodal(const Mesh& coarse, const Mesh& fine,
                                     std::span<const double> values);

/// Structural problems found by check_mesh; empty when all invariants hold.
struct MeshReport {
  std::vector<std::string> problems;
  bool ok() const { return problems.empty(); }
};

/// Verifies positive areas and conformity: every edge is used by one or two
/// triangles, and edges used once lie on the domain boundary (a hanging node
/// would leave an interior edge used once).
MeshReport check_mesh(const Mesh& mesh);

/// Plain-text dump: "V T E", then "x y boundary_flag" per vertex, then
/// "v0 v1 v2" per triangle.
void write_mesh(std::ostream& out, const Mesh& mesh);

}  // namespace spc

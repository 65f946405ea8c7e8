#pragma once

#include "spc/mesh.hpp"
#include "spc/quadrature.hpp"
#include "spc/sparse.hpp"

#include <cmath>

#include <array>
#include <functional>
#include <span>
#include <vector>

namespace spc {

using ScalarFn = std::function<double(Point)>;

/// Discrete spaces on a mesh.
enum class Space {
  P1Interior,  ///< continuous P1 vanishing on the boundary, one dof per interior vertex
  P1Full,      ///< continuous P1, one dof per vertex
  P0,          ///< piecewise constants, one dof per triangle
};

int space_dimension(const Mesh& mesh, Space space);

/// Coefficient vector in one of the discrete spaces.
struct FeFunction {
  Space space = Space::P1Full;
  std::vector<double> coefficients;

  /// Values at all vertices (P1 spaces only; boundary vertices are 0 for
  /// P1Interior).
  std::vector<double> nodal_values(const Mesh& mesh) const;
  /// Value at barycentric coordinates `bary` of triangle t.
  double value(const Mesh& mesh, int t, const std::array<double, 3>& bary) const;
};

FeFunction make_fe_function(const Mesh& mesh, Space space);

/// Scatters interior-vertex values to a full vertex vector (zero on the
/// boundary).
std::vector<double> extend_by_zero(const Mesh& mesh,
                                   std::span<const double> interior);
/// Restricts a full vertex vector to interior vertices.
std::vector<double> restrict_to_interior(const Mesh& mesh,
                                         std::span<const double> full);

/// Constant gradients of the three barycentric hat functions on a triangle.
std::array<Point, 3> hat_gradients(const std::array<Point, 3>& c);
std::array<std::array<double, 3>, 3> local_stiffness(const std::array<Point, 3>& c);
std::array<std::array<double, 3>, 3> local_mass(double area);

/// Which loop implementation a kernel uses.
enum class Exec { Serial, Parallel };

/// Stiffness matrix of the Laplacian over the rows/cols of `space`
/// (P1Interior or P1Full).
SparseMatrix assemble_stiffness(const Mesh& mesh,
                                Space space = Space::P1Interior,
                                Exec exec = Exec::Parallel);
/// M_ij = integral of chi_i * phi_j, chi from `rows`, phi from `cols`.
SparseMatrix assemble_mass(const Mesh& mesh, Space rows, Space cols,
                           Exec exec = Exec::Parallel);
/// Integrals of g * phi_v over the dofs of `space` with a degree-`degree` rule.
/// Throws std::domain_error naming the element if g is not finite.
std::vector<double> assemble_load(const Mesh& mesh, const ScalarFn& g,
                                  int degree, Space space = Space::P1Interior,
                                  Exec exec = Exec::Parallel);
/// Integral of each hat function: sum over incident triangles of |K|/3.
std::vector<double> lumped_weights(const Mesh& mesh);
/// Mean value on every triangle of a P1 function.
FeFunction cell_average(const Mesh& mesh, const FeFunction& p);
/// theta_v(w) = (w, phi_v) / (1, phi_v) for every vertex.
FeFunction quasi_interpolate(const Mesh& mesh, const FeFunction& w);
FeFunction quasi_interpolate(const Mesh& mesh, const ScalarFn& w, int degree);

/// Calls f(x, bary, weight) for every point of the degree-`degree` rule
/// mapped onto the triangle with corners c (weight includes the Jacobian).
template <typename F>
void for_each_point(const std::array<Point, 3>& c, int degree, F&& f) {
  const QuadratureRule& rule = quadrature_rule(QuadratureKind::Triangle, degree);
  const double jac = 2.0 * std::abs(0.5 * cross(c[1] - c[0], c[2] - c[0]));
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const auto& l = rule.points[q];
    const Point x{l[0] * c[0].x + l[1] * c[1].x + l[2] * c[2].x,
                  l[0] * c[0].y + l[1] * c[1].y + l[2] * c[2].y};
    f(x, l, rule.weights[q] * jac);
  }
}

}  // namespace spc

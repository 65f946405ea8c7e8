#include "spc/assembly.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace spc {

namespace {

// Dof index of local vertex k of triangle t in `space` (-1 if not a dof).
int dof(const Mesh& mesh, Space space, int t, int k) {
  switch (space) {
    case Space::P1Interior:
      return mesh.interior_index(mesh.triangle(t)[k]);
    case Space::P1Full:
      return mesh.triangle(t)[k];
    case Space::P0:
      return t;
  }
  return -1;
}

using Local = std::array<std::array<double, 3>, 3>;

SparseMatrix scatter(const Mesh& mesh, Space rows, Space cols,
                     const std::vector<Local>& locals) {
  const int nt = static_cast<int>(mesh.num_triangles());
  std::vector<Triplet> entries(9 * static_cast<std::size_t>(nt));
#pragma omp parallel for schedule(static)
  for (int t = 0; t < nt; ++t) {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        entries[9 * t + 3 * i + j] = {dof(mesh, rows, t, i),
                                      dof(mesh, cols, t, j), locals[t][i][j]};
  }
  std::erase_if(entries, [](const Triplet& e) { return e.row < 0 || e.col < 0; });
  return SparseMatrix::from_triplets(space_dimension(mesh, rows),
                                     space_dimension(mesh, cols),
                                     std::move(entries));
}

SparseMatrix scatter_serial(const Mesh& mesh, Space rows, Space cols,
                            const std::function<Local(int)>& local) {
  std::vector<Triplet> entries;
  for (int t = 0; t < static_cast<int>(mesh.num_triangles()); ++t) {
    const Local m = local(t);
    for (int i = 0; i < 3; ++i) {
      const int r = dof(mesh, rows, t, i);
      if (r < 0) continue;
      for (int j = 0; j < 3; ++j) {
        const int c = dof(mesh, cols, t, j);
        if (c >= 0) entries.push_back({r, c, m[i][j]});
      }
    }
  }
  return SparseMatrix::from_triplets(space_dimension(mesh, rows),
                                     space_dimension(mesh, cols),
                                     std::move(entries));
}

// Local mass block between spaces on a triangle of area `area`.
Local local_mixed_mass(Space rows, Space cols, double area) {
  const bool r0 = rows == Space::P0, c0 = cols == Space::P0;
  Local m{};
  if (!r0 && !c0) return local_mass(area);
  // Only entry (0, *) or (*, 0) is meaningful for the P0 side; the P0 dof is
  // replicated across local slots, so put the whole block on slot 0.
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      if (r0 && c0) m[i][j] = (i == 0 && j == 0) ? area : 0.0;
      else if (r0) m[i][j] = (i == 0) ? area / 3.0 : 0.0;
      else m[i][j] = (j == 0) ? area / 3.0 : 0.0;
    }
  return m;
}

}  // namespace

int space_dimension(const Mesh& mesh, Space space) {
  switch (space) {
    case Space::P1Interior:
      return static_cast<int>(mesh.num_interior_vertices());
    case Space::P1Full:
      return static_cast<int>(mesh.num_vertices());
    case Space::P0:
      return static_cast<int>(mesh.num_triangles());
  }
  return 0;
}

FeFunction make_fe_function(const Mesh& mesh, Space space) {
  return FeFunction{space,
                    std::vector<double>(space_dimension(mesh, space), 0.0)};
}

std::vector<double> FeFunction::nodal_values(const Mesh& mesh) const {
  if (space == Space::P1Full) return coefficients;
  if (space == Space::P1Interior) return extend_by_zero(mesh, coefficients);
  throw std::invalid_argument("nodal_values: P0 function has no nodal values");
}

double FeFunction::value(const Mesh& mesh, int t,
                         const std::array<double, 3>& bary) const {
  if (space == Space::P0) return coefficients[t];
  double s = 0.0;
  for (int k = 0; k < 3; ++k) {
    const int v = mesh.triangle(t)[k];
    if (space == Space::P1Full) {
      s += bary[k] * coefficients[v];
    } else {
      const int i = mesh.interior_index(v);
      if (i >= 0) s += bary[k] * coefficients[i];
    }
  }
  return s;
}

std::vector<double> extend_by_zero(const Mesh& mesh,
                                   std::span<const double> interior) {
  if (interior.size() != mesh.num_interior_vertices())
    throw std::invalid_argument("extend_by_zero: size mismatch");
  std::vector<double> full(mesh.num_vertices(), 0.0);
  const auto ids = mesh.interior_vertex_ids();
  for (std::size_t i = 0; i < ids.size(); ++i) full[ids[i]] = interior[i];
  return full;
}

std::vector<double> restrict_to_interior(const Mesh& mesh,
                                         std::span<const double> full) {
  const auto ids = mesh.interior_vertex_ids();
  std::vector<double> out(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) out[i] = full[ids[i]];
  return out;
}

std::array<Point, 3> hat_gradients(const std::array<Point, 3>& c) {
  const double two_area = cross(c[1] - c[0], c[2] - c[0]);
  std::array<Point, 3> g;
  for (int k = 0; k < 3; ++k) {
    const Point e = c[(k + 2) % 3] - c[(k + 1) % 3];
    // Rotate the opposite edge by -90 degrees and scale.
    g[k] = {-e.y / two_area, e.x / two_area};
  }
  return g;
}

std::array<std::array<double, 3>, 3> local_stiffness(
    const std::array<Point, 3>& c) {
  const auto g = hat_gradients(c);
  const double area = 0.5 * std::abs(cross(c[1] - c[0], c[2] - c[0]));
  Local m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m[i][j] = area * dot(g[i], g[j]);
  return m;
}

std::array<std::array<double, 3>, 3> local_mass(double area) {
  Local m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m[i][j] = area / 12.0 * (i == j ? 2.0 : 1.0);
  return m;
}

SparseMatrix assemble_stiffness(const Mesh& mesh, Space space, Exec exec) {
  if (space == Space::P0)
    throw std::invalid_argument("assemble_stiffness: P0 has no stiffness");
  if (exec == Exec::Serial) {
    return scatter_serial(mesh, space, space, [&](int t) {
      return local_stiffness(mesh.corners(t));
    });
  }
  const int nt = static_cast<int>(mesh.num_triangles());
  std::vector<Local> locals(nt);
#pragma omp parallel for schedule(static)
  for (int t = 0; t < nt; ++t) locals[t] = local_stiffness(mesh.corners(t));
  return scatter(mesh, space, space, locals);
}

SparseMatrix assemble_mass(const Mesh& mesh, Space rows, Space cols,
                           Exec exec) {
  if (exec == Exec::Serial) {
    return scatter_serial(mesh, rows, cols, [&](int t) {
      return local_mixed_mass(rows, cols, mesh.area(t));
    });
  }
  const int nt = static_cast<int>(mesh.num_triangles());
  std::vector<Local> locals(nt);
#pragma omp parallel for schedule(static)
  for (int t = 0; t < nt; ++t)
    locals[t] = local_mixed_mass(rows, cols, mesh.area(t));
  return scatter(mesh, rows, cols, locals);
}

std::vector<double> assemble_load(const Mesh& mesh, const ScalarFn& g,
                                  int degree, Space space, Exec exec) {
  const int nt = static_cast<int>(mesh.num_triangles());
  std::vector<std::array<double, 3>> local(nt);
  std::vector<char> bad(nt, 0);
  auto element = [&](int t) {
    std::array<double, 3> b{0.0, 0.0, 0.0};
    for_each_point(mesh.corners(t), degree,
                   [&](Point x, const std::array<double, 3>& l, double w) {
                     const double v = g(x);
                     if (!std::isfinite(v)) bad[t] = 1;
                     for (int k = 0; k < 3; ++k) b[k] += w * v * l[k];
                   });
    if (space == Space::P0) b = {b[0] + b[1] + b[2], 0.0, 0.0};
    local[t] = b;
  };
  if (exec == Exec::Serial) {
    for (int t = 0; t < nt; ++t) element(t);
  } else {
#pragma omp parallel for schedule(static)
    for (int t = 0; t < nt; ++t) element(t);
  }
  for (int t = 0; t < nt; ++t)
    if (bad[t])
      throw std::domain_error("assemble_load: non-finite data value on element " +
                              std::to_string(t));
  std::vector<double> out(space_dimension(mesh, space), 0.0);
  for (int t = 0; t < nt; ++t) {
    for (int k = 0; k < 3; ++k) {
      if (space == Space::P0 && k > 0) break;
      const int d = dof(mesh, space, t, k);
      if (d >= 0) out[d] += local[t][k];
    }
  }
  return out;
}

std::vector<double> lumped_weights(const Mesh& mesh) {
  std::vector<double> w(mesh.num_vertices(), 0.0);
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const double a3 = mesh.area(static_cast<int>(t)) / 3.0;
    for (int v : mesh.triangle(static_cast<int>(t))) w[v] += a3;
  }
  return w;
}

FeFunction cell_average(const Mesh& mesh, const FeFunction& p) {
  const std::vector<double> nodal = p.nodal_values(mesh);
  FeFunction out = make_fe_function(mesh, Space::P0);
  const int nt = static_cast<int>(mesh.num_triangles());
#pragma omp parallel for schedule(static)
  for (int t = 0; t < nt; ++t) {
    const Triangle& tri = mesh.triangle(t);
    out.coefficients[t] = (nodal[tri[0]] + nodal[tri[1]] + nodal[tri[2]]) / 3.0;
  }
  return out;
}

FeFunction quasi_interpolate(const Mesh& mesh, const FeFunction& w) {
  const std::vector<double> weights = lumped_weights(mesh);
  FeFunction out = make_fe_function(mesh, Space::P1Full);
  if (w.space == Space::P0) {
    // (w, phi_v) = sum over incident K of w_K |K| / 3
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
      const double c = w.coefficients[t] * mesh.area(static_cast<int>(t)) / 3.0;
      for (int v : mesh.triangle(static_cast<int>(t))) out.coefficients[v] += c;
    }
  } else {
    const SparseMatrix m = assemble_mass(mesh, Space::P1Full, w.space);
    m.multiply(w.coefficients, out.coefficients);
  }
  for (std::size_t v = 0; v < weights.size(); ++v)
    out.coefficients[v] /= weights[v];
  return out;
}

FeFunction quasi_interpolate(const Mesh& mesh, const ScalarFn& w, int degree) {
  FeFunction out{Space::P1Full, assemble_load(mesh, w, degree, Space::P1Full)};
  const std::vector<double> weights = lumped_weights(mesh);
  for (std::size_t v = 0; v < weights.size(); ++v)
    out.coefficients[v] /= weights[v];
  return out;
}

}  // namespace spc

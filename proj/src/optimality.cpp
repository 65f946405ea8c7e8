#include "spc/optimality.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

namespace spc {

namespace {

// Matrices and loads that do not change during the Newton iteration.
// PC and P1 share one structure: q = C p / w, U = C^T u(q),
// B = C^T diag(xi(q) / w) C, with C the mass coupling of the control space
// against interior hats and w the control weights.
struct Operators {
  SparseMatrix a;
  SparseMatrix m;
  SparseMatrix c;
  SparseMatrix ct;
  std::vector<double> w;
  std::vector<double> f;
  std::vector<double> yd;
};

Operators build_operators(const Mesh& mesh, const ProblemData& data,
                          Scheme scheme, Exec exec) {
  Operators op;
  op.a = assemble_stiffness(mesh, Space::P1Interior, exec);
  op.m = assemble_mass(mesh, Space::P1Interior, Space::P1Interior, exec);
  op.f = assemble_load(mesh, data.f, kHighDegree, Space::P1Interior, exec);
  op.yd = assemble_load(mesh, data.y_omega, kHighDegree, Space::P1Interior, exec);
  if (scheme == Scheme::PC) {
    op.c = assemble_mass(mesh, Space::P0, Space::P1Interior, exec);
    op.w.resize(mesh.num_triangles());
    for (std::size_t t = 0; t < op.w.size(); ++t)
      op.w[t] = mesh.area(static_cast<int>(t));
  } else if (scheme == Scheme::P1) {
    op.c = assemble_mass(mesh, Space::P1Full, Space::P1Interior, exec);
    op.w = lumped_weights(mesh);
  }
  if (scheme != Scheme::VD) op.ct = op.c.transpose();
  return op;
}

struct Linearization {
  std::vector<double> load;  // U(p)
  SparseMatrix slope;        // B = dU/dp
};

std::vector<double> control_argument(const Operators& op,
                                     std::span<const double> p) {
  std::vector<double> q = op.c * p;
  for (std::size_t i = 0; i < q.size(); ++i) q[i] /= op.w[i];
  return q;
}

Linearization linearize_discrete(const Operators& op, std::span<const double> p,
                                 const ControlParams& params) {
  const std::vector<double> q = control_argument(op, p);
  std::vector<double> u(q.size()), d(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    u[i] = pointwise_control_law(q[i], params).u;
    d[i] = newton_slope(q[i], params) / op.w[i];
  }
  return {op.ct * u, multiply(op.ct, d, op.c)};
}

struct LocalVd {
  std::array<double, 3> load{};
  std::array<std::array<double, 3>, 3> slope{};
};

LocalVd local_vd(const std::array<Point, 3>& c, const std::array<double, 3>& q,
                 const ControlParams& params, const NewtonOptions& options,
                 std::vector<SubTriangle>& scratch) {
  LocalVd out;
  auto add = [&](const std::array<double, 3>& l, double u, double xi, double w) {
    for (int i = 0; i < 3; ++i) {
      out.load[i] += w * u * l[i];
      if (xi != 0.0)
        for (int j = 0; j < 3; ++j) out.slope[i][j] += w * xi * l[i] * l[j];
    }
  };
  if (options.vd_integration == VdIntegration::Quadrature) {
    for_each_point(c, options.vd_quadrature_degree,
                   [&](Point, const std::array<double, 3>& l, double w) {
                     const double qx = l[0] * q[0] + l[1] * q[1] + l[2] * q[2];
                     add(l, pointwise_control_law(qx, params).u,
                         newton_slope(qx, params), w);
                   });
    return out;
  }
  for_each_piece_point(
      c, q, params, 2,
      [&](Point, const std::array<double, 3>& l, double qx, Band band, double w) {
        add(l, band_control(band, params)(qx), band_slope(band, params), w);
      },
      scratch);
  return out;
}

Linearization linearize_vd(const Mesh& mesh, std::span<const double> p,
                           const ControlParams& params,
                           const NewtonOptions& options) {
  const std::vector<double> pn = extend_by_zero(mesh, p);
  const int nt = static_cast<int>(mesh.num_triangles());
  std::vector<LocalVd> local(nt);
  auto body = [&](int t, std::vector<SubTriangle>& scratch) {
    const Triangle& tri = mesh.triangle(t);
    local[t] = local_vd(mesh.corners(t), {pn[tri[0]], pn[tri[1]], pn[tri[2]]},
                        params, options, scratch);
  };
  if (options.exec == Exec::Parallel) {
#pragma omp parallel
    {
      std::vector<SubTriangle> scratch;
#pragma omp for schedule(static)
      for (int t = 0; t < nt; ++t) body(t, scratch);
    }
  } else {
    std::vector<SubTriangle> scratch;
    for (int t = 0; t < nt; ++t) body(t, scratch);
  }
  const int n = static_cast<int>(mesh.num_interior_vertices());
  Linearization lin;
  lin.load.assign(n, 0.0);
  std::vector<Triplet> entries;
  entries.reserve(9 * static_cast<std::size_t>(nt));
  for (int t = 0; t < nt; ++t) {
    const Triangle& tri = mesh.triangle(t);
    for (int i = 0; i < 3; ++i) {
      const int r = mesh.interior_index(tri[i]);
      if (r < 0) continue;
      lin.load[r] += local[t].load[i];
      for (int j = 0; j < 3; ++j) {
        const int s = mesh.interior_index(tri[j]);
        if (s >= 0) entries.push_back({r, s, local[t].slope[i][j]});
      }
    }
  }
  lin.slope = SparseMatrix::from_triplets(n, n, std::move(entries));
  return lin;
}

std::vector<signed char> active_signature(const Mesh& mesh, const Operators& op,
                                          std::span<const double> p,
                                          const ControlParams& params,
                                          Scheme scheme) {
  const std::vector<double> q = scheme == Scheme::VD
                                    ? extend_by_zero(mesh, p)
                                    : control_argument(op, p);
  std::vector<signed char> sig(q.size());
  for (std::size_t i = 0; i < q.size(); ++i)
    sig[i] = static_cast<signed char>(classify(q[i], params));
  return sig;
}

Linearization linearize(const Mesh& mesh, const Operators& op,
                        std::span<const double> p, const ControlParams& params,
                        Scheme scheme, const NewtonOptions& options) {
  return scheme == Scheme::VD ? linearize_vd(mesh, p, params, options)
                              : linearize_discrete(op, p, params);
}

// R1 = A y - U - F, R2 = A p - M y + Yd.
void residuals(const Operators& op, const Linearization& lin,
               std::span<const double> y, std::span<const double> p,
               std::vector<double>& r1, std::vector<double>& r2) {
  r1 = op.a * y;
  r2 = op.a * p;
  const std::vector<double> my = op.m * y;
  for (std::size_t i = 0; i < r1.size(); ++i) {
    r1[i] -= lin.load[i] + op.f[i];
    r2[i] += op.yd[i] - my[i];
  }
}

Solution package(const Mesh& mesh, const Operators& op, const ProblemData& data,
                 Scheme scheme, std::vector<double> y, std::vector<double> p,
                 int iterations, const NewtonOptions& options) {
  Solution sol;
  sol.scheme = scheme;
  sol.params = data;
  sol.y = {Space::P1Interior, std::move(y)};
  sol.p = {Space::P1Interior, std::move(p)};
  sol.newton_iterations = iterations;
  if (scheme == Scheme::VD) {
    sol.u.space = sol.lambda.space = Space::P1Full;
  } else {
    const std::vector<double> q = control_argument(op, sol.p.coefficients);
    const Space s = scheme == Scheme::PC ? Space::P0 : Space::P1Full;
    sol.u = {s, std::vector<double>(q.size())};
    sol.lambda = {s, std::vector<double>(q.size())};
    for (std::size_t i = 0; i < q.size(); ++i) {
      const ControlValue v = pointwise_control_law(q[i], data);
      sol.u.coefficients[i] = v.u;
      sol.lambda.coefficients[i] = v.lambda;
    }
  }
  const Linearization lin =
      linearize(mesh, op, sol.p.coefficients, data, scheme, options);
  std::vector<double> r1, r2;
  residuals(op, lin, sol.y.coefficients, sol.p.coefficients, r1, r2);
  const double scale = std::max({1.0, norm_inf(op.f), norm_inf(op.yd)});
  sol.residual = std::max(norm_inf(r1), norm_inf(r2)) / scale;
  return sol;
}

}  // namespace

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::PC: return "pc";
    case Scheme::P1: return "p1";
    case Scheme::VD: return "vd";
  }
  return "?";
}

Scheme parse_scheme(const std::string& name) {
  std::string s = name;
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char ch) { return std::tolower(ch); });
  if (s == "pc") return Scheme::PC;
  if (s == "p1") return Scheme::P1;
  if (s == "vd") return Scheme::VD;
  throw std::invalid_argument("unknown scheme '" + name +
                              "' (expected pc, p1 or vd)");
}

void ProblemData::validate() const {
  ControlParams::validate();
  if (!f) throw std::invalid_argument("problem data: f is not set");
  if (!y_omega) throw std::invalid_argument("problem data: y_omega is not set");
}

ControlValue Solution::control_at(const Mesh& mesh, int t,
                                  const std::array<double, 3>& bary) const {
  switch (scheme) {
    case Scheme::PC: return {u.coefficients[t], lambda.coefficients[t]};
    case Scheme::P1: return {u.value(mesh, t, bary), lambda.value(mesh, t, bary)};
    case Scheme::VD: return pointwise_control_law(p.value(mesh, t, bary), params);
  }
  return {};
}

Solution solve_optimality(const Mesh& mesh, const ProblemData& data,
                          Scheme scheme, const NewtonOptions& options,
                          const InitialGuess* guess) {
  data.validate();
  if (!(options.tol > 0.0))
    throw std::invalid_argument("solve_optimality: tol must be positive");
  if (options.max_iter < 1)
    throw std::invalid_argument("solve_optimality: max_iter must be >= 1");
  const std::size_t n = mesh.num_interior_vertices();
  const Operators op = build_operators(mesh, data, scheme, options.exec);

  std::vector<double> y(n, 0.0), p(n, 0.0);
  if (guess) {
    if (guess->y.size() != n || guess->p.size() != n)
      throw std::invalid_argument("solve_optimality: initial guess size mismatch");
    y = guess->y;
    p = guess->p;
  }
  if (n == 0) return package(mesh, op, data, scheme, y, p, 0, options);

  std::vector<signed char> sig = active_signature(mesh, op, p, data, scheme);
  std::vector<double> r1, r2, rhs(2 * n);
  double increment = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= options.max_iter; ++it) {
    const Linearization lin = linearize(mesh, op, p, data, scheme, options);
    residuals(op, lin, y, p, r1, r2);
    for (std::size_t i = 0; i < n; ++i) {
      rhs[i] = -r1[i];
      rhs[n + i] = -r2[i];
    }
    const std::vector<double> delta =
        solve_coupled({op.a, lin.slope, op.m}, rhs, options.linear);
    double dmax = 0.0, xmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      y[i] += delta[i];
      p[i] += delta[n + i];
      dmax = std::max({dmax, std::abs(delta[i]), std::abs(delta[n + i])});
      xmax = std::max({xmax, std::abs(y[i]), std::abs(p[i])});
    }
    increment = dmax / std::max(1.0, xmax);
    std::vector<signed char> next = active_signature(mesh, op, p, data, scheme);
    const bool stable = next == sig;
    sig = std::move(next);
    if (stable && increment <= options.tol)
      return package(mesh, op, data, scheme, std::move(y), std::move(p), it,
                     options);
  }
  throw NewtonError("solve_optimality: no convergence in " +
                        std::to_string(options.max_iter) +
                        " Newton steps (last increment " +
                        std::to_string(increment) + ")",
                    package(mesh, op, data, scheme, std::move(y), std::move(p),
                            options.max_iter, options),
                    increment);
}

double evaluate_cost(const Mesh& mesh, const Solution& sol,
                     const ProblemData& data) {
  const std::vector<double> yn = sol.y.nodal_values(mesh);
  double tracking = 0.0, control = 0.0;
  for (std::size_t ti = 0; ti < mesh.num_triangles(); ++ti) {
    const int t = static_cast<int>(ti);
    const Triangle& tri = mesh.triangle(t);
    for_each_point(mesh.corners(t), kHighDegree,
                   [&](Point x, const std::array<double, 3>& l, double w) {
                     const double e = l[0] * yn[tri[0]] + l[1] * yn[tri[1]] +
                                      l[2] * yn[tri[2]] - data.y_omega(x);
                     tracking += w * e * e;
                   });
  }
  auto density = [&](double u) {
    return 0.5 * data.alpha * u * u + data.beta * std::abs(u);
  };
  switch (sol.scheme) {
    case Scheme::PC:
      for (std::size_t t = 0; t < mesh.num_triangles(); ++t)
        control += mesh.area(static_cast<int>(t)) * density(sol.u.coefficients[t]);
      break;
    case Scheme::P1: {
      const std::vector<double> w = lumped_weights(mesh);
      for (std::size_t v = 0; v < w.size(); ++v)
        control += w[v] * density(sol.u.coefficients[v]);
      break;
    }
    case Scheme::VD: {
      const std::vector<double> pn = sol.p.nodal_values(mesh);
      std::vector<SubTriangle> scratch;
      for (std::size_t ti = 0; ti < mesh.num_triangles(); ++ti) {
        const Triangle& tri = mesh.triangle(static_cast<int>(ti));
        for_each_piece_point(
            mesh.corners(static_cast<int>(ti)), {pn[tri[0]], pn[tri[1]], pn[tri[2]]},
            data, 2,
            [&](Point, const std::array<double, 3>&, double q, Band band, double w) {
              control += w * density(band_control(band, data)(q));
            },
            scratch);
      }
      break;
    }
  }
  return 0.5 * tracking + control;
}

ControlValue TildePair::value(const SubTriangle& piece, Point x) const {
  const auto l = barycentric(piece.corners, x);
  const double q = l[0] * piece.q[0] + l[1] * piece.q[1] + l[2] * piece.q[2];
  return {band_control(piece.band, params)(q),
          band_multiplier(piece.band, params)(q)};
}

TildePair compute_tilde_pair(const Mesh& mesh, const FeFunction& p,
                             const ControlParams& params) {
  const std::vector<double> pn = p.nodal_values(mesh);
  TildePair out;
  out.params = params;
  out.offsets.reserve(mesh.num_triangles() + 1);
  out.offsets.push_back(0);
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const Triangle& tri = mesh.triangle(static_cast<int>(t));
    split_by_bands(mesh.corners(static_cast<int>(t)),
                   {pn[tri[0]], pn[tri[1]], pn[tri[2]]}, params, out.pieces);
    out.offsets.push_back(static_cast<int>(out.pieces.size()));
  }
  return out;
}

}  // namespace spc

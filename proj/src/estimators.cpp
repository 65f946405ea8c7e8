#include "spc/estimators.hpp"

#include <cmath>
#include <stdexcept>

namespace spc {

namespace {

std::vector<Point> element_gradients(const Mesh& mesh, std::span<const double> nodal) {
  const int nt = static_cast<int>(mesh.num_triangles());
  std::vector<Point> g(nt);
#pragma omp parallel for schedule(static)
  for (int t = 0; t < nt; ++t) {
    const Triangle& tri = mesh.triangle(t);
    const auto h = hat_gradients(mesh.corners(t));
    Point s{0, 0};
    for (int k = 0; k < 3; ++k) s = s + nodal[tri[k]] * h[k];
    g[t] = s;
  }
  return g;
}

// Sum over interior sides of K of |[grad z . n]|^2 |side|.
std::vector<double> jump_terms(const Mesh& mesh, const std::vector<Point>& grad) {
  std::vector<double> out(mesh.num_triangles(), 0.0);
  for (const Edge& e : mesh.edges()) {
    if (e.boundary()) continue;
    const Point d = mesh.vertex(e.v1) - mesh.vertex(e.v0);
    const double len = std::hypot(d.x, d.y);
    const Point n{d.y / len, -d.x / len};
    const double j = dot(grad[e.t0] - grad[e.t1], n);
    out[e.t0] += j * j * len;
    out[e.t1] += j * j * len;
  }
  return out;
}

double scale_power(double h, Scaling s, int shift) {
  const int e = (s == Scaling::Energy ? 2 : 4) + shift;
  return std::pow(h, e);
}

}  // namespace

std::vector<double> IndicatorSet::element_totals() const {
  std::vector<double> out(ey.size());
  for (std::size_t t = 0; t < out.size(); ++t)
    out[t] = std::sqrt(weights.state * ey[t] * ey[t] + weights.adjoint * ep[t] * ep[t] +
                       weights.control * eu[t] * eu[t] +
                       weights.subgradient * elam[t] * elam[t]);
  return out;
}

ResidualIndicators state_adjoint_indicators(const Mesh& mesh, const Solution& sol,
                                            const ProblemData& data,
                                            Scaling scaling) {
  const std::vector<double> yn = sol.y.nodal_values(mesh);
  const std::vector<double> pn = sol.p.nodal_values(mesh);
  const std::vector<double> jy = jump_terms(mesh, element_gradients(mesh, yn));
  const std::vector<double> jp = jump_terms(mesh, element_gradients(mesh, pn));
  const int nt = static_cast<int>(mesh.num_triangles());
  ResidualIndicators out{std::vector<double>(nt), std::vector<double>(nt)};
#pragma omp parallel
  {
    std::vector<SubTriangle> scratch;
#pragma omp for schedule(dynamic, 64)
    for (int t = 0; t < nt; ++t) {
      const Triangle& tri = mesh.triangle(t);
      const auto c = mesh.corners(t);
      double ry = 0.0, rp = 0.0;
      auto add = [&](Point x, const std::array<double, 3>& l, double u, double w) {
        const double yh = l[0] * yn[tri[0]] + l[1] * yn[tri[1]] + l[2] * yn[tri[2]];
        const double a = u + data.f(x);
        const double b = yh - data.y_omega(x);
        ry += w * a * a;
        rp += w * b * b;
      };
      if (sol.scheme == Scheme::VD) {
        for_each_piece_point(
            c, {pn[tri[0]], pn[tri[1]], pn[tri[2]]}, data, kHighDegree,
            [&](Point x, const std::array<double, 3>& l, double q, Band band, double w) {
              add(x, l, band_control(band, data)(q), w);
            },
            scratch);
      } else {
        for_each_point(c, kHighDegree, [&](Point x, const std::array<double, 3>& l, double w) {
          add(x, l, sol.control_at(mesh, t, l).u, w);
        });
      }
      const double h = mesh.diameter(t);
      out.state[t] = std::sqrt(scale_power(h, scaling, 0) * ry + scale_power(h, scaling, -1) * jy[t]);
      out.adjoint[t] = std::sqrt(scale_power(h, scaling, 0) * rp + scale_power(h, scaling, -1) * jp[t]);
    }
  }
  return out;
}

ControlIndicators control_subgradient_indicators(const Mesh& mesh,
                                                 const Solution& sol,
                                                 const ProblemData& data) {
  const int nt = static_cast<int>(mesh.num_triangles());
  ControlIndicators out{std::vector<double>(nt, 0.0), std::vector<double>(nt, 0.0)};
  if (sol.scheme == Scheme::VD) return out;
  const std::vector<double> pn = sol.p.nodal_values(mesh);
#pragma omp parallel
  {
    std::vector<SubTriangle> scratch;
#pragma omp for schedule(dynamic, 64)
    for (int t = 0; t < nt; ++t) {
      const Triangle& tri = mesh.triangle(t);
      double su = 0.0, sl = 0.0;
      for_each_piece_point(
          mesh.corners(t), {pn[tri[0]], pn[tri[1]], pn[tri[2]]}, data, 2,
          [&](Point, const std::array<double, 3>& l, double q, Band band, double w) {
            const ControlValue v = sol.control_at(mesh, t, l);
            const double du = band_control(band, data)(q) - v.u;
            const double dl = band_multiplier(band, data)(q) - v.lambda;
            su += w * du * du;
            sl += w * dl * dl;
          },
          scratch);
      out.control[t] = std::sqrt(su);
      out.subgradient[t] = std::sqrt(sl);
    }
  }
  return out;
}

IndicatorSet compute_indicators(const Mesh& mesh, const Solution& sol,
                                const ProblemData& data, Scaling scaling,
                                const EstimatorWeights& weights) {
  IndicatorSet ind;
  ind.scaling = scaling;
  ind.weights = weights;
  ResidualIndicators r = state_adjoint_indicators(mesh, sol, data, scaling);
  ControlIndicators c = control_subgradient_indicators(mesh, sol, data);
  ind.ey = std::move(r.state);
  ind.ep = std::move(r.adjoint);
  ind.eu = std::move(c.control);
  ind.elam = std::move(c.subgradient);
  return ind;
}

double total_estimator(const IndicatorSet& ind) {
  double s = 0.0;
  for (double e : ind.element_totals()) s += e * e;
  return std::sqrt(s);
}

double data_oscillation(const Mesh& mesh, const ScalarFn& g, int kappa) {
  if (kappa != 0 && kappa != 1)
    throw std::invalid_argument("data_oscillation: kappa must be 0 or 1");
  const int nt = static_cast<int>(mesh.num_triangles());
  std::vector<double> local(nt);
#pragma omp parallel for schedule(static)
  for (int t = 0; t < nt; ++t) {
    const auto c = mesh.corners(t);
    const double area = mesh.area(t);
    std::array<double, 3> coef{};
    if (kappa == 0) {
      double s = 0.0;
      for_each_point(c, kHighDegree,
                     [&](Point x, const std::array<double, 3>&, double w) { s += w * g(x); });
      coef.fill(s / area);
    } else {
      // Local mass matrix (area/12)(1 + delta_ij) has inverse (3/area)(4 delta_ij - 1).
      std::array<double, 3> b{};
      for_each_point(c, kHighDegree, [&](Point x, const std::array<double, 3>& l, double w) {
        const double v = g(x);
        for (int i = 0; i < 3; ++i) b[i] += w * v * l[i];
      });
      const double sum = b[0] + b[1] + b[2];
      for (int i = 0; i < 3; ++i) coef[i] = (3.0 / area) * (4.0 * b[i] - sum);
    }
    double s = 0.0;
    for_each_point(c, kHighDegree, [&](Point x, const std::array<double, 3>& l, double w) {
      const double d = g(x) - (l[0] * coef[0] + l[1] * coef[1] + l[2] * coef[2]);
      s += w * d * d;
    });
    local[t] = std::pow(mesh.diameter(t), 2 * (kappa + 1)) * s;
  }
  double total = 0.0;
  for (double v : local) total += v;
  return std::sqrt(total);
}

std::vector<double> poisson_indicators(const Mesh& mesh, const FeFunction& zh,
                                       const ScalarFn& g, Scaling scaling) {
  const std::vector<double> zn = zh.nodal_values(mesh);
  const std::vector<double> jz = jump_terms(mesh, element_gradients(mesh, zn));
  const int nt = static_cast<int>(mesh.num_triangles());
  std::vector<double> out(nt);
#pragma omp parallel for schedule(static)
  for (int t = 0; t < nt; ++t) {
    double r = 0.0;
    for_each_point(mesh.corners(t), kHighDegree,
                   [&](Point x, const std::array<double, 3>&, double w) {
                     const double v = g(x);
                     r += w * v * v;
                   });
    const double h = mesh.diameter(t);
    out[t] = std::sqrt(scale_power(h, scaling, 0) * r + scale_power(h, scaling, -1) * jz[t]);
  }
  return out;
}

}  // namespace spc

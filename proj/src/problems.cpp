#include "spc/problems.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace spc {

namespace {

constexpr double kPi = std::numbers::pi;

double q1(double t) { return t * t - t; }
double dq1(double t) { return 2.0 * t - 1.0; }

// atan((x - 0.5)/eps) and its first two derivatives.
constexpr double kLayer = 0.01;
double layer(double x) { return std::atan((x - 0.5) / kLayer); }
double dlayer(double x) {
  const double s = (x - 0.5) / kLayer;
  return (1.0 / kLayer) / (1.0 + s * s);
}
double ddlayer(double x) {
  const double s = (x - 0.5) / kLayer;
  const double d = 1.0 + s * s;
  return -2.0 * s / (kLayer * kLayer) / (d * d);
}

// Polar angle in [0, 2pi); on the L-shape it lies in [0, 3pi/2].
double angle(Point x) {
  double w = std::atan2(x.y, x.x);
  if (w < 0.0) w += 2.0 * kPi;
  return w;
}

double singular(Point x) {
  const double r = std::hypot(x.x, x.y);
  return std::pow(r, 2.0 / 3.0) * std::sin(2.0 * angle(x) / 3.0);
}

Point grad_singular(Point x) {
  const double r = std::hypot(x.x, x.y);
  const double w = angle(x);
  const double s = (2.0 / 3.0) * std::pow(r, -1.0 / 3.0);
  return {-s * std::sin(w / 3.0), s * std::cos(w / 3.0)};
}

// Smooth factors of the second example: phi(x) S(x) with lap phi = -2 k^2 phi.
struct SmoothFactor {
  std::function<double(Point)> value;
  std::function<Point(Point)> grad;
};

void finish(ManufacturedProblem& pr) {
  const ControlParams params = pr.data;
  const ScalarFn p = pr.exact_p;
  pr.exact_u = [p, params](Point x) { return pointwise_control_law(p(x), params).u; };
  pr.exact_lambda = [p, params](Point x) {
    return pointwise_control_law(p(x), params).lambda;
  };
  const ScalarFn ly = pr.laplace_y, lp = pr.laplace_p, y = pr.exact_y, u = pr.exact_u;
  pr.data.f = [ly, u](Point x) { return -ly(x) - u(x); };
  pr.data.y_omega = [y, lp](Point x) { return y(x) + lp(x); };
}

}  // namespace

ManufacturedProblem example1(double alpha, double beta) {
  ManufacturedProblem pr;
  pr.name = "example1";
  pr.domain = Domain::UnitSquare;
  pr.data.alpha = alpha;
  pr.data.beta = beta;
  pr.data.a = -3.0;
  pr.data.b = 3.0;
  static_cast<const ControlParams&>(pr.data).validate();
  pr.exact_y = [](Point x) { return q1(x.x) * q1(x.y) * layer(x.x); };
  pr.grad_y = [](Point x) {
    return Point{(dq1(x.x) * layer(x.x) + q1(x.x) * dlayer(x.x)) * q1(x.y),
                 q1(x.x) * layer(x.x) * dq1(x.y)};
  };
  pr.laplace_y = [](Point x) {
    const double g = 2.0 * layer(x.x) + 2.0 * dq1(x.x) * dlayer(x.x) +
                     q1(x.x) * ddlayer(x.x);
    return q1(x.y) * g + 2.0 * q1(x.x) * layer(x.x);
  };
  pr.exact_p = [](Point x) { return 20.0 * q1(x.x) * q1(x.y); };
  pr.grad_p = [](Point x) {
    return Point{20.0 * dq1(x.x) * q1(x.y), 20.0 * q1(x.x) * dq1(x.y)};
  };
  pr.laplace_p = [](Point x) { return 40.0 * (q1(x.x) + q1(x.y)); };
  finish(pr);
  return pr;
}

ManufacturedProblem example2() {
  ManufacturedProblem pr;
  pr.name = "example2";
  pr.domain = Domain::LShape;
  pr.data.alpha = 1e-3;
  pr.data.beta = 0.2;
  pr.data.a = -0.6;
  pr.data.b = 1.0;
  constexpr double k = kPi / 2.0;
  auto sx = [](double x) { return std::sin(k * (x + 1.0)); };
  auto dsx = [](double x) { return k * std::cos(k * (x + 1.0)); };
  auto cy = [](double y) { return std::cos(k * y); };
  auto dcy = [](double y) { return -k * std::sin(k * y); };
  const SmoothFactor fy{
      [=](Point x) { return 0.2 * sx(x.x) * sx(x.y); },
      [=](Point x) { return Point{0.2 * dsx(x.x) * sx(x.y), 0.2 * sx(x.x) * dsx(x.y)}; }};
  const SmoothFactor fp{
      [=](Point x) { return 0.5 * sx(x.x) * cy(x.y); },
      [=](Point x) { return Point{0.5 * dsx(x.x) * cy(x.y), 0.5 * sx(x.x) * dcy(x.y)}; }};
  auto value = [](const SmoothFactor& f) {
    return [f](Point x) { return f.value(x) * singular(x); };
  };
  auto grad = [](const SmoothFactor& f) {
    return [f](Point x) {
      const Point g = f.grad(x), gs = grad_singular(x);
      const double v = f.value(x), s = singular(x);
      return Point{g.x * s + v * gs.x, g.y * s + v * gs.y};
    };
  };
  // lap(phi S) = lap(phi) S + 2 grad(phi).grad(S), S harmonic.
  auto laplace = [](const SmoothFactor& f) {
    return [f](Point x) {
      return -2.0 * k * k * f.value(x) * singular(x) +
             2.0 * dot(f.grad(x), grad_singular(x));
    };
  };
  pr.exact_y = value(fy);
  pr.grad_y = grad(fy);
  pr.laplace_y = laplace(fy);
  pr.exact_p = value(fp);
  pr.grad_p = grad(fp);
  pr.laplace_p = laplace(fp);
  finish(pr);
  return pr;
}

ProblemData constant_data(const ControlParams& params, double f, double y_omega) {
  ProblemData d;
  static_cast<ControlParams&>(d) = params;
  d.f = [f](Point) { return f; };
  d.y_omega = [y_omega](Point) { return y_omega; };
  d.validate();
  return d;
}

PoissonProblem smooth_poisson() {
  PoissonProblem pr;
  pr.exact = [](Point x) { return std::sin(kPi * x.x) * std::sin(kPi * x.y); };
  pr.gradient = [](Point x) {
    return Point{kPi * std::cos(kPi * x.x) * std::sin(kPi * x.y),
                 kPi * std::sin(kPi * x.x) * std::cos(kPi * x.y)};
  };
  pr.rhs = [](Point x) {
    return 2.0 * kPi * kPi * std::sin(kPi * x.x) * std::sin(kPi * x.y);
  };
  return pr;
}

double ErrorNorms::energy() const {
  return std::sqrt(y_h1 * y_h1 + p_h1 * p_h1 + u_l2 * u_l2 + lambda_l2 * lambda_l2);
}

double ErrorNorms::l2() const {
  return std::sqrt(y_l2 * y_l2 + p_l2 * p_l2 + u_l2 * u_l2 + lambda_l2 * lambda_l2);
}

ErrorNorms exact_error_norms(const Mesh& mesh, const Solution& sol,
                             const ManufacturedProblem& problem) {
  if (mesh.domain() != problem.domain)
    throw std::invalid_argument("exact_error_norms: mesh is on " +
                                to_string(mesh.domain()) + ", problem on " +
                                to_string(problem.domain));
  const std::vector<double> yn = sol.y.nodal_values(mesh);
  const std::vector<double> pn = sol.p.nodal_values(mesh);
  const int nt = static_cast<int>(mesh.num_triangles());
  struct Local {
    double y_l2, p_l2, y_h1, p_h1, u_l2, lambda_l2;
  };
  std::vector<Local> local(nt);
#pragma omp parallel
  {
    std::vector<SubTriangle> scratch;
#pragma omp for schedule(dynamic, 64)
    for (int t = 0; t < nt; ++t) {
      const Triangle& tri = mesh.triangle(t);
      const auto c = mesh.corners(t);
      const auto g = hat_gradients(c);
      Point gy{0, 0}, gp{0, 0};
      for (int k = 0; k < 3; ++k) {
        gy = gy + yn[tri[k]] * g[k];
        gp = gp + pn[tri[k]] * g[k];
      }
      const std::array<double, 3> pk{pn[tri[0]], pn[tri[1]], pn[tri[2]]};
      Local e{};
      auto add = [&](Point x, const std::array<double, 3>& l, double w) {
        const double yh = l[0] * yn[tri[0]] + l[1] * yn[tri[1]] + l[2] * yn[tri[2]];
        const double ph = l[0] * pk[0] + l[1] * pk[1] + l[2] * pk[2];
        const ControlValue v = sol.control_at(mesh, t, l);
        const double ey = problem.exact_y(x) - yh;
        const double ep = problem.exact_p(x) - ph;
        const Point dy = problem.grad_y(x) - gy;
        const Point dp = problem.grad_p(x) - gp;
        const double eu = problem.exact_u(x) - v.u;
        const double el = problem.exact_lambda(x) - v.lambda;
        e.y_l2 += w * ey * ey;
        e.p_l2 += w * ep * ep;
        e.y_h1 += w * dot(dy, dy);
        e.p_h1 += w * dot(dp, dp);
        e.u_l2 += w * eu * eu;
        e.lambda_l2 += w * el * el;
      };
      if (sol.scheme == Scheme::VD) {
        for_each_piece_point(
            c, pk, sol.params, kHighDegree,
            [&](Point x, const std::array<double, 3>& l, double, Band, double w) {
              add(x, l, w);
            },
            scratch);
      } else {
        for_each_point(c, kHighDegree, add);
      }
      local[t] = e;
    }
  }
  ErrorNorms out;
  out.p_local.resize(nt);
  out.u_local.resize(nt);
  out.lambda_local.resize(nt);
  for (int t = 0; t < nt; ++t) {
    const Local& e = local[t];
    out.y_l2 += e.y_l2;
    out.p_l2 += e.p_l2;
    out.y_h1 += e.y_h1;
    out.p_h1 += e.p_h1;
    out.u_l2 += e.u_l2;
    out.lambda_l2 += e.lambda_l2;
    out.p_local[t] = std::sqrt(e.p_l2);
    out.u_local[t] = std::sqrt(e.u_l2);
    out.lambda_local[t] = std::sqrt(e.lambda_l2);
  }
  out.y_l2 = std::sqrt(out.y_l2);
  out.p_l2 = std::sqrt(out.p_l2);
  out.y_h1 = std::sqrt(out.y_h1);
  out.p_h1 = std::sqrt(out.p_h1);
  out.u_l2 = std::sqrt(out.u_l2);
  out.lambda_l2 = std::sqrt(out.lambda_l2);
  return out;
}

double poisson_h1_error(const Mesh& mesh, const FeFunction& zh,
                        const PoissonProblem& problem) {
  const std::vector<double> zn = zh.nodal_values(mesh);
  const int nt = static_cast<int>(mesh.num_triangles());
  std::vector<double> local(nt);
#pragma omp parallel for schedule(static)
  for (int t = 0; t < nt; ++t) {
    const Triangle& tri = mesh.triangle(t);
    const auto c = mesh.corners(t);
    const auto g = hat_gradients(c);
    Point gz{0, 0};
    for (int k = 0; k < 3; ++k) gz = gz + zn[tri[k]] * g[k];
    double s = 0.0;
    for_each_point(c, kHighDegree, [&](Point x, const std::array<double, 3>&, double w) {
      const Point d = problem.gradient(x) - gz;
      s += w * dot(d, d);
    });
    local[t] = s;
  }
  double total = 0.0;
  for (double v : local) total += v;
  return std::sqrt(total);
}

}  // namespace spc

#include "spc/quadrature.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace spc {

namespace {

double factorial(int n) {
  double r = 1.0;
  for (int k = 2; k <= n; ++k) r *= k;
  return r;
}

// Exact integral of x^i y^j over the unit triangle.
double triangle_monomial(int i, int j) {
  return factorial(i) * factorial(j) / factorial(i + j + 2);
}

void add_orbit3(QuadratureRule& r, double a, double w) {
  // (a, a, 1-2a) and its permutations; w is the weight of each point.
  const double c = 1.0 - 2.0 * a;
  r.points.push_back({c, a, a});
  r.points.push_back({a, c, a});
  r.points.push_back({a, a, c});
  r.weights.insert(r.weights.end(), 3, w);
}

QuadratureRule centroid_rule() {
  QuadratureRule r;
  r.degree = 1;
  r.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
  r.weights.push_back(0.5);
  return r;
}

QuadratureRule strang_fix_2() {
  QuadratureRule r;
  r.degree = 2;
  add_orbit3(r, 1.0 / 6.0, 1.0 / 6.0);
  return r;
}

// Six-point symmetric rule (Dunavant), degree 4.
QuadratureRule dunavant_4() {
  QuadratureRule r;
  r.degree = 4;
  add_orbit3(r, 0.445948490915965, 0.5 * 0.223381589678011);
  add_orbit3(r, 0.091576213509771, 0.5 * 0.109951743655322);
  return r;
}

// Seven-point Radon rule, degree 5.
QuadratureRule radon_5() {
  QuadratureRule r;
  r.degree = 5;
  const double s15 = std::sqrt(15.0);
  r.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
  r.weights.push_back(0.5 * 9.0 / 40.0);
  add_orbit3(r, (6.0 - s15) / 21.0, 0.5 * (155.0 - s15) / 1200.0);
  add_orbit3(r, (6.0 + s15) / 21.0, 0.5 * (155.0 + s15) / 1200.0);
  return r;
}

// Collapsed (conical) product of Gauss-Legendre and Gauss-Jacobi(1,0).
QuadratureRule conical_product(int degree) {
  const int n = (degree + 2) / 2;
  std::vector<double> xs, ws, zt, wt;
  gauss_jacobi(n, 0.0, 0.0, xs, ws);
  gauss_jacobi(n, 1.0, 0.0, zt, wt);
  QuadratureRule r;
  r.degree = degree;
  for (int j = 0; j < n; ++j) {
    const double t = 0.5 * (1.0 + zt[j]);
    for (int i = 0; i < n; ++i) {
      const double s = 0.5 * (1.0 + xs[i]);
      const double x = s * (1.0 - t);
      const double y = t;
      r.points.push_back({1.0 - x - y, x, y});
      r.weights.push_back(0.125 * ws[i] * wt[j]);
    }
  }
  return r;
}

QuadratureRule gauss_edge(int degree) {
  const int n = (degree + 2) / 2;
  std::vector<double> xs, ws;
  gauss_jacobi(n, 0.0, 0.0, xs, ws);
  QuadratureRule r;
  r.kind = QuadratureKind::Edge;
  r.degree = degree;
  for (int i = 0; i < n; ++i) {
    const double t = 0.5 * (1.0 + xs[i]);
    r.points.push_back({1.0 - t, t, 0.0});
    r.weights.push_back(0.5 * ws[i]);
  }
  return r;
}

QuadratureRule build(QuadratureKind kind, int degree) {
  QuadratureRule r;
  if (kind == QuadratureKind::Edge) {
    r = gauss_edge(degree);
  } else if (degree == 1) {
    r = centroid_rule();
  } else if (degree == 2) {
    r = strang_fix_2();
  } else if (degree <= 4) {
    r = dunavant_4();
  } else if (degree == 5) {
    r = radon_5();
  } else {
    r = conical_product(degree);
  }
  r.degree = degree;
  const double err = monomial_error(r, degree);
  if (!(err <= 1e-13)) {
    throw std::logic_error("quadrature rule of degree " +
                           std::to_string(degree) +
                           " failed its monomial check (error " +
                           std::to_string(err) + ")");
  }
  return r;
}

}  // namespace

void gauss_jacobi(int n, double a, double b, std::vector<double>& nodes,
                  std::vector<double>& weights) {
  // Golub-Welsch on the symmetric Jacobi matrix of the monic recurrence.
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    const double s = 2.0 * k + a + b;
    J(k, k) = (k == 0) ? (b - a) / (a + b + 2.0)
                       : (b * b - a * a) / (s * (s + 2.0));
    if (k + 1 < n) {
      const double kk = k + 1.0;
      const double s1 = 2.0 * kk + a + b;
      const double beta = 4.0 * kk * (kk + a) * (kk + b) * (kk + a + b) /
                          (s1 * s1 * (s1 + 1.0) * (s1 - 1.0));
      J(k, k + 1) = J(k + 1, k) = std::sqrt(beta);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(J);
  const double mu0 = std::pow(2.0, a + b + 1.0) * std::tgamma(a + 1.0) *
                     std::tgamma(b + 1.0) / std::tgamma(a + b + 2.0);
  nodes.resize(n);
  weights.resize(n);
  for (int k = 0; k < n; ++k) {
    nodes[k] = eig.eigenvalues()(k);
    const double v = eig.eigenvectors()(0, k);
    weights[k] = mu0 * v * v;
  }
}

double monomial_error(const QuadratureRule& rule, int degree) {
  double worst = 0.0;
  if (rule.kind == QuadratureKind::Edge) {
    for (int i = 0; i <= degree; ++i) {
      double q = 0.0;
      for (std::size_t k = 0; k < rule.size(); ++k)
        q += rule.weights[k] * std::pow(rule.points[k][1], i);
      const double exact = 1.0 / (i + 1.0);
      worst = std::max(worst, std::abs(q - exact) / exact);
    }
    return worst;
  }
  for (int i = 0; i <= degree; ++i) {
    for (int j = 0; i + j <= degree; ++j) {
      double q = 0.0;
      for (std::size_t k = 0; k < rule.size(); ++k)
        q += rule.weights[k] * std::pow(rule.points[k][1], i) *
             std::pow(rule.points[k][2], j);
      const double exact = triangle_monomial(i, j);
      worst = std::max(worst, std::abs(q - exact) / exact);
    }
  }
  return worst;
}

const QuadratureRule& quadrature_rule(QuadratureKind kind, int degree) {
  if (degree < 1 || degree > 20) {
    throw std::invalid_argument("unsupported quadrature degree " +
                                std::to_string(degree) +
                                "; supported degrees are 1..20");
  }
  static std::mutex lock;
  static std::map<std::pair<int, int>, QuadratureRule> cache;
  std::lock_guard<std::mutex> guard(lock);
  const auto key = std::make_pair(static_cast<int>(kind), degree);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, build(kind, degree)).first;
  return it->second;
}

}  // namespace spc

#pragma once

#include "spc/optimality.hpp"

#include <functional>
#include <string>
#include <vector>

namespace spc {

using GradientFn = std::function<Point(Point)>;

/// Optimal control problem with a closed-form solution. u and lambda are
/// the projections of the exact adjoint; f and y_omega in `data` are built
/// as f = -lap y - u and y_omega = y + lap p.
struct ManufacturedProblem {
  std::string name;
  Domain domain = Domain::UnitSquare;
  ProblemData data;
  ScalarFn exact_y;
  ScalarFn exact_p;
  GradientFn grad_y;
  GradientFn grad_p;
  ScalarFn laplace_y;
  ScalarFn laplace_p;
  ScalarFn exact_u;
  ScalarFn exact_lambda;
};

/// Unit square, a = -3, b = 3,
/// y = x1 x2 (x1-1)(x2-1) atan((x1-0.5)/0.01), p = 20 x1 x2 (1-x1)(1-x2).
ManufacturedProblem example1(double alpha, double beta);

/// L-shaped domain (-1,1)^2 minus [0,1)x(-1,0], a = -0.6, b = 1,
/// alpha = 1e-3, beta = 0.2, with the corner singularity r^(2/3) sin(2w/3)
/// in both y and p.
ManufacturedProblem example2();

/// Problem without a known solution: constant f and y_omega.
ProblemData constant_data(const ControlParams& params, double f, double y_omega);

/// -lap z = g on the unit square with z = sin(pi x) sin(pi y).
struct PoissonProblem {
  ScalarFn exact;
  GradientFn gradient;
  ScalarFn rhs;
};
PoissonProblem smooth_poisson();

/// Error components of a discrete solution. Every *_l2 / *_h1 entry is a
/// global norm; the local vectors hold the L2(K) norms of e_p, e_u and
/// e_lambda on each triangle.
struct ErrorNorms {
  double y_l2 = 0.0;
  double p_l2 = 0.0;
  double y_h1 = 0.0;  ///< H1 seminorms
  double p_h1 = 0.0;
  double u_l2 = 0.0;
  double lambda_l2 = 0.0;
  std::vector<double> p_local;
  std::vector<double> u_local;
  std::vector<double> lambda_local;

  /// (|e_y|_H1^2 + |e_p|_H1^2 + |e_u|^2 + |e_lambda|^2)^(1/2)
  double energy() const;
  /// (|e_y|^2 + |e_p|^2 + |e_u|^2 + |e_lambda|^2)^(1/2)
  double l2() const;
};

/// Component errors by a degree-19 rule on every triangle. For VD the
/// triangles are first cut along the kink lines of the discrete adjoint.
/// Throws std::invalid_argument if the mesh domain differs from the
/// problem's.
ErrorNorms exact_error_norms(const Mesh& mesh, const Solution& sol,
                             const ManufacturedProblem& problem);

/// |z - z_h|_H1 for a P1Interior function z_h.
double poisson_h1_error(const Mesh& mesh, const FeFunction& zh,
                        const PoissonProblem& problem);

}  // namespace spc

#pragma once

#include "spc/assembly.hpp"
#include "spc/control_law.hpp"
#include "spc/linsolve.hpp"

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace spc {

/// Control discretizations: piecewise constant, piecewise linear with a
/// lumped inner product, and variational (control induced by p pointwise).
enum class Scheme { PC, P1, VD };

std::string to_string(Scheme s);
/// Parses "pc", "p1" or "vd" (case-insensitive); throws std::invalid_argument.
Scheme parse_scheme(const std::string& name);

struct ProblemData : ControlParams {
  ScalarFn f;
  ScalarFn y_omega;

  /// ControlParams::validate plus non-empty f and y_omega.
  void validate() const;
};

/// Discrete optimal quadruple. y and p are P1Interior. u and lambda are P0
/// for PC and P1Full (nodal values) for P1. For VD both are left empty: they
/// are functions of p, see control_at().
struct Solution {
  Scheme scheme = Scheme::PC;
  ControlParams params;
  FeFunction y;
  FeFunction p;
  FeFunction u;
  FeFunction lambda;
  int newton_iterations = 0;
  /// max(|R_state|, |R_adjoint|) / max(1, |F|, |Yd|) of the returned iterate
  /// (infinity norms of the discrete Galerkin residuals).
  double residual = 0.0;

  /// Discrete control and subgradient at barycentric point `bary` of t.
  ControlValue control_at(const Mesh& mesh, int t,
                          const std::array<double, 3>& bary) const;
};

enum class VdIntegration {
  Exact,       ///< clip along the kink lines of p and integrate each piece
  Quadrature,  ///< one high-degree rule per element across the kinks
};

struct NewtonOptions {
  double tol = 1e-10;
  int max_iter = 50;
  CoupledOptions linear;
  VdIntegration vd_integration = VdIntegration::Exact;
  int vd_quadrature_degree = kHighDegree;
  Exec exec = Exec::Parallel;
};

/// Starting point of the Newton iteration, interior coefficients.
struct InitialGuess {
  std::vector<double> y;
  std::vector<double> p;
};

class NewtonError : public std::runtime_error {
 public:
  NewtonError(const std::string& what, Solution last, double increment)
      : std::runtime_error(what), last_(std::move(last)), increment_(increment) {}
  const Solution& last_iterate() const { return last_; }
  double increment() const { return increment_; }

 private:
  Solution last_;
  double increment_;
};

/// Semismooth Newton iteration on (y, p) with u eliminated through the
/// pointwise control law applied to cell means of p (PC), to theta_v(p)
/// (P1) or to p itself (VD). Stops when the band of every control dof (VD:
/// of p at every vertex) is unchanged by a step and the step satisfies
/// |delta|_inf <= tol * max(1, |x|_inf). Starts from zero unless `guess`
/// is given. Throws NewtonError after max_iter steps; SolverError from the
/// linear solves propagates.
Solution solve_optimality(const Mesh& mesh, const ProblemData& data,
                          Scheme scheme, const NewtonOptions& options = {},
                          const InitialGuess* guess = nullptr);

/// J(y, u) = 1/2 |y - y_omega|^2 + alpha/2 |u|^2 + beta |u|_L1; the control
/// terms use the lumped inner product for P1 and are integrated exactly
/// for PC and VD.
double evaluate_cost(const Mesh& mesh, const Solution& sol,
                     const ProblemData& data);

/// The pair (u~, lambda~) induced pointwise by a P1 function p: every
/// triangle split along the kink lines of p into pieces on which both are
/// affine in p.
struct TildePair {
  ControlParams params;
  std::vector<int> offsets;  ///< pieces of triangle t: [offsets[t], offsets[t+1])
  std::vector<SubTriangle> pieces;

  std::span<const SubTriangle> element(int t) const {
    return {pieces.data() + offsets[t], pieces.data() + offsets[t + 1]};
  }
  /// (u~, lambda~) at point x of a piece.
  ControlValue value(const SubTriangle& piece, Point x) const;
};

TildePair compute_tilde_pair(const Mesh& mesh, const FeFunction& p,
                             const ControlParams& params);

/// Calls f(x, bary, q, band, weight) at the points of a degree-`degree` rule
/// on every piece of the triangle `c` cut along the kink lines of the linear
/// function with corner values `q`; `bary` is relative to `c`.
template <typename F>
void for_each_piece_point(const std::array<Point, 3>& c,
                          const std::array<double, 3>& q,
                          const ControlParams& params, int degree, F&& f,
                          std::vector<SubTriangle>& scratch) {
  scratch.clear();
  split_by_bands(c, q, params, scratch);
  for (const SubTriangle& s : scratch) {
    for_each_point(s.corners, degree,
                   [&](Point x, const std::array<double, 3>& l, double w) {
                     const double qx = l[0] * s.q[0] + l[1] * s.q[1] + l[2] * s.q[2];
                     f(x, barycentric(c, x), qx, s.band, w);
                   });
  }
}

}  // namespace spc

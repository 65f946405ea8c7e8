#pragma once

#include <array>
#include <string>
#include <vector>

namespace spc {

enum class QuadratureKind { Triangle, Edge };

/// Quadrature rule on a reference element.
///
/// Triangle rules live on the unit triangle {(0,0),(1,0),(0,1)} (measure 1/2);
/// points are stored as barycentric triples (l0, l1, l2) with the Cartesian
/// point being (l1, l2). Edge rules live on [0,1]; points are stored as
/// (1-t, t, 0).
struct QuadratureRule {
  QuadratureKind kind = QuadratureKind::Triangle;
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
  int degree = 0;

  std::size_t size() const { return weights.size(); }
};

/// Returns a rule with all weights positive and all points in the closed
/// reference element that integrates every polynomial up to `degree` exactly.
/// Supported degrees are 1..20; anything else throws std::invalid_argument.
/// Rules are built once per (kind, degree) and verified by monomial tests.
const QuadratureRule& quadrature_rule(QuadratureKind kind, int degree);

/// Gauss-Jacobi nodes/weights on [-1,1] for the weight (1-x)^a (1+x)^b.
void gauss_jacobi(int n, double a, double b, std::vector<double>& nodes,
                  std::vector<double>& weights);

/// Largest relative monomial error of a rule over all x^i y^j, i+j <= degree
/// (or t^i for edge rules). Used by the startup check and by tests.
double monomial_error(const QuadratureRule& rule, int degree);

/// Degree used for assembly integrals with polynomial integrands.
inline constexpr int kAssemblyDegree = 4;
/// Degree used for manufactured data and exact error integrals.
inline constexpr int kHighDegree = 19;

}  // namespace spc

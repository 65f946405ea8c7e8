#pragma once

#include "spc/mesh.hpp"

#include <array>
#include <vector>

namespace spc {

/// Cost and constraint parameters: alpha > 0, beta > 0, a < 0 < b.
struct ControlParams {
  double alpha = 1.0;
  double beta = 1.0;
  double a = -1.0;
  double b = 1.0;

  /// Throws std::invalid_argument unless alpha, beta > 0 and a < 0 < b.
  void validate() const;
};

struct ControlValue {
  double u;
  double lambda;
};

/// lambda = clamp(-q/beta, -1, 1), u = clamp(-(q + beta lambda)/alpha, a, b)
/// (u is exactly 0 for |q| <= beta).
ControlValue pointwise_control_law(double q, const ControlParams& c);

/// The same control written with max/min terms:
/// (max(0,-q-beta) + min(0,-q+beta) - max(0,-q-beta-alpha b)
///  - min(0,-q+beta-alpha a)) / alpha.
double control_max_min_form(double q, const ControlParams& c);

/// Generalized derivative du/dq of the control law, with max(0,x)' = 1 and
/// min(0,x)' = 1 at x = 0. Takes the values 0 and -1/alpha.
double newton_slope(double q, const ControlParams& c);

/// Pieces of the control law between its four breakpoints
/// -beta-alpha*b < -beta < beta < beta-alpha*a.
enum class Band : int {
  UpperBound = 0,  ///< u = b, lambda = 1
  Positive = 1,    ///< u = -(q+beta)/alpha, lambda = 1
  Zero = 2,        ///< u = 0, lambda = -q/beta
  Negative = 3,    ///< u = -(q-beta)/alpha, lambda = -1
  LowerBound = 4,  ///< u = a, lambda = -1
};

std::array<double, 4> breakpoints(const ControlParams& c);
Band classify(double q, const ControlParams& c);

/// u and lambda are affine in q on a band: value = c0 + c1 * q.
struct Affine {
  double c0 = 0.0;
  double c1 = 0.0;
  double operator()(double q) const { return c0 + c1 * q; }
};
Affine band_control(Band band, const ControlParams& c);
Affine band_multiplier(Band band, const ControlParams& c);
/// du/dq on the open band.
double band_slope(Band band, const ControlParams& c);

/// Piece of a triangle on which a linear function q lies in one band.
struct SubTriangle {
  std::array<Point, 3> corners;
  std::array<double, 3> q;  ///< values of q at the corners
  Band band;
};

/// Splits a triangle along the straight level lines of the linear function
/// with corner values q at the breakpoints of the control law and
/// fan-triangulates the resulting convex pieces (zero-area pieces dropped).
/// Appends to `out`.
void split_by_bands(const std::array<Point, 3>& corners,
                    const std::array<double, 3>& q, const ControlParams& c,
                    std::vector<SubTriangle>& out);

/// Barycentric coordinates of x with respect to the triangle c.
std::array<double, 3> barycentric(const std::array<Point, 3>& c, Point x);

}  // namespace spc

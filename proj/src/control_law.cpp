#include "spc/control_law.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spc {

namespace {

struct Node {
  Point x;
  double q;
};

double polygon_area(const std::vector<Node>& poly) {
  double s = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i)
    s += cross(poly[i].x, poly[(i + 1) % poly.size()].x);
  return 0.5 * s;
}

void emit(const std::vector<Node>& poly, Band band, double min_area,
          std::vector<SubTriangle>& out) {
  if (poly.size() < 3 || polygon_area(poly) <= min_area) return;
  for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
    SubTriangle s{{poly[0].x, poly[k].x, poly[k + 1].x},
                  {poly[0].q, poly[k].q, poly[k + 1].q},
                  band};
    if (0.5 * cross(s.corners[1] - s.corners[0], s.corners[2] - s.corners[0]) >
        min_area)
      out.push_back(s);
  }
}

}  // namespace

void ControlParams::validate() const {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  if (!(a < 0.0 && 0.0 < b))
    throw std::invalid_argument("control bounds must satisfy a < 0 < b");
}

ControlValue pointwise_control_law(double q, const ControlParams& c) {
  const double lambda = std::clamp(-q / c.beta, -1.0, 1.0);
  double u = 0.0;
  if (q < -c.beta) u = std::min(c.b, -(q + c.beta) / c.alpha);
  else if (q > c.beta) u = std::max(c.a, -(q - c.beta) / c.alpha);
  return {u, lambda};
}

double control_max_min_form(double q, const ControlParams& c) {
  return (std::max(0.0, -q - c.beta) + std::min(0.0, -q + c.beta) -
          std::max(0.0, -q - c.beta - c.alpha * c.b) -
          std::min(0.0, -q + c.beta - c.alpha * c.a)) /
         c.alpha;
}

double newton_slope(double q, const ControlParams& c) {
  auto dmax = [](double x) { return x >= 0.0 ? 1.0 : 0.0; };
  auto dmin = [](double x) { return x <= 0.0 ? 1.0 : 0.0; };
  const double s = dmax(-q - c.beta) + dmin(-q + c.beta) -
                   dmax(-q - c.beta - c.alpha * c.b) -
                   dmin(-q + c.beta - c.alpha * c.a);
  return -s / c.alpha;
}

std::array<double, 4> breakpoints(const ControlParams& c) {
  return {-c.beta - c.alpha * c.b, -c.beta, c.beta, c.beta - c.alpha * c.a};
}

Band classify(double q, const ControlParams& c) {
  const auto t = breakpoints(c);
  if (q <= t[0]) return Band::UpperBound;
  if (q < t[1]) return Band::Positive;
  if (q <= t[2]) return Band::Zero;
  if (q < t[3]) return Band::Negative;
  return Band::LowerBound;
}

Affine band_control(Band band, const ControlParams& c) {
  switch (band) {
    case Band::UpperBound: return {c.b, 0.0};
    case Band::Positive: return {-c.beta / c.alpha, -1.0 / c.alpha};
    case Band::Zero: return {0.0, 0.0};
    case Band::Negative: return {c.beta / c.alpha, -1.0 / c.alpha};
    case Band::LowerBound: return {c.a, 0.0};
  }
  return {};
}

Affine band_multiplier(Band band, const ControlParams& c) {
  switch (band) {
    case Band::UpperBound:
    case Band::Positive: return {1.0, 0.0};
    case Band::Zero: return {0.0, -1.0 / c.beta};
    case Band::Negative:
    case Band::LowerBound: return {-1.0, 0.0};
  }
  return {};
}

double band_slope(Band band, const ControlParams& c) {
  return (band == Band::Positive || band == Band::Negative) ? -1.0 / c.alpha
                                                            : 0.0;
}

void split_by_bands(const std::array<Point, 3>& corners,
                    const std::array<double, 3>& q, const ControlParams& c,
                    std::vector<SubTriangle>& out) {
  const double qmin = std::min({q[0], q[1], q[2]});
  const double qmax = std::max({q[0], q[1], q[2]});
  const auto t = breakpoints(c);
  // Fast path: the whole triangle sits in one closed band.
  const Band lo = classify(qmin, c), hi = classify(qmax, c);
  auto in_closed = [&](Band b, double v) {
    const int k = static_cast<int>(b);
    return (k == 0 || v >= t[k - 1]) && (k == 4 || v <= t[k]);
  };
  if (lo == hi || in_closed(lo, qmax) || in_closed(hi, qmin)) {
    const Band b = in_closed(lo, qmax) ? lo : hi;
    out.push_back({corners, q, b});
    return;
  }
  const double area =
      std::abs(0.5 * cross(corners[1] - corners[0], corners[2] - corners[0]));
  const double min_area = 1e-14 * area;
  std::vector<Node> rest{{corners[0], q[0]}, {corners[1], q[1]},
                         {corners[2], q[2]}};
  std::vector<Node> below, above;
  for (int k = 0; k < 4; ++k) {
    below.clear();
    above.clear();
    const double level = t[k];
    for (std::size_t i = 0; i < rest.size(); ++i) {
      const Node& n0 = rest[i];
      const Node& n1 = rest[(i + 1) % rest.size()];
      const double s0 = n0.q - level, s1 = n1.q - level;
      if (s0 <= 0.0) below.push_back(n0);
      if (s0 >= 0.0) above.push_back(n0);
      if ((s0 < 0.0 && s1 > 0.0) || (s0 > 0.0 && s1 < 0.0)) {
        const double r = s0 / (s0 - s1);
        const Node cut{n0.x + r * (n1.x - n0.x), level};
        below.push_back(cut);
        above.push_back(cut);
      }
    }
    emit(below, static_cast<Band>(k), min_area, out);
    rest.swap(above);
    if (rest.size() < 3) return;
  }
  emit(rest, Band::LowerBound, min_area, out);
}

std::array<double, 3> barycentric(const std::array<Point, 3>& c, Point x) {
  const double det = cross(c[1] - c[0], c[2] - c[0]);
  const double l1 = cross(x - c[0], c[2] - c[0]) / det;
  const double l2 = cross(c[1] - c[0], x - c[0]) / det;
  return {1.0 - l1 - l2, l1, l2};
}

}  // namespace spc

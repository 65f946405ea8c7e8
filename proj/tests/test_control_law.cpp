#include "doctest.h"
#include "spc/control_law.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

using namespace spc;

namespace {
const ControlParams kParams{0.1, 0.7, -3.0, 3.0};
}

TEST_CASE("control law on the five bands") {
  // breakpoints -1.0, -0.7, 0.7, 1.0
  const auto t = breakpoints(kParams);
  CHECK(t[0] == doctest::Approx(-1.0));
  CHECK(t[3] == doctest::Approx(1.0));
  struct Row { double q, u, lambda; Band band; };
  const Row rows[] = {
      {-2.0, 3.0, 1.0, Band::UpperBound},
      {-0.85, 1.5, 1.0, Band::Positive},
      {0.35, 0.0, -0.5, Band::Zero},
      {0.85, -1.5, -1.0, Band::Negative},
      {2.0, -3.0, -1.0, Band::LowerBound},
  };
  for (const auto& r : rows) {
    CAPTURE(r.q);
    const auto v = pointwise_control_law(r.q, kParams);
    CHECK(v.u == doctest::Approx(r.u));
    CHECK(v.lambda == doctest::Approx(r.lambda));
    CHECK(classify(r.q, kParams) == r.band);
    CHECK(band_control(r.band, kParams)(r.q) == doctest::Approx(r.u));
    CHECK(band_multiplier(r.band, kParams)(r.q) == doctest::Approx(r.lambda));
  }
}

TEST_CASE("projection and max/min forms agree; optimality conditions hold") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> d(-3.0, 3.0);
  for (int i = 0; i < 2000; ++i) {
    const double q = d(rng);
    const auto v = pointwise_control_law(q, kParams);
    CHECK(v.u == doctest::Approx(control_max_min_form(q, kParams)).epsilon(1e-13));
    CHECK(v.u <= kParams.b);
    CHECK(v.u >= kParams.a);
    CHECK(std::abs(v.lambda) <= 1.0);
    // lambda in sign(u)
    if (v.u > 0) CHECK(v.lambda == 1.0);
    if (v.u < 0) CHECK(v.lambda == -1.0);
    // pointwise VI: (q + alpha u + beta lambda)(w - u) >= 0 for admissible w
    const double g = q + kParams.alpha * v.u + kParams.beta * v.lambda;
    for (double w : {kParams.a, 0.0, kParams.b}) CHECK(g * (w - v.u) >= -1e-12);
  }
}

TEST_CASE("newton slope: values and boundary convention") {
  CHECK(newton_slope(-2.0, kParams) == 0.0);
  CHECK(newton_slope(-0.85, kParams) == doctest::Approx(-10.0));
  CHECK(newton_slope(0.0, kParams) == 0.0);
  CHECK(newton_slope(0.85, kParams) == doctest::Approx(-10.0));
  CHECK(newton_slope(2.0, kParams) == 0.0);
  // |q| = beta exactly takes the free slope
  CHECK(newton_slope(0.7, kParams) == doctest::Approx(-10.0));
  CHECK(newton_slope(-0.7, kParams) == doctest::Approx(-10.0));
  // finite differences away from kinks
  for (double q : {-1.5, -0.9, -0.2, 0.5, 0.8, 1.7}) {
    const double h = 1e-6;
    const double fd = (pointwise_control_law(q + h, kParams).u - pointwise_control_law(q - h, kParams).u) / (2 * h);
    CHECK(newton_slope(q, kParams) == doctest::Approx(fd).epsilon(1e-6));
    CHECK(band_slope(classify(q, kParams), kParams) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("parameter validation") {
  CHECK_NOTHROW(kParams.validate());
  CHECK_THROWS_AS((ControlParams{0.0, 1, -1, 1}).validate(), std::invalid_argument);
  CHECK_THROWS_AS((ControlParams{1, -1, -1, 1}).validate(), std::invalid_argument);
  CHECK_THROWS_AS((ControlParams{1, 1, 0.5, 1}).validate(), std::invalid_argument);
}

TEST_CASE("split_by_bands preserves area and respects bands") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> d(-2.5, 2.5);
  const std::array<Point, 3> c{Point{0.1, 0.2}, Point{0.9, 0.1}, Point{0.4, 0.8}};
  const double area = 0.5 * cross(c[1] - c[0], c[2] - c[0]);
  for (int trial = 0; trial < 500; ++trial) {
    const std::array<double, 3> q{d(rng), d(rng), d(rng)};
    std::vector<SubTriangle> out;
    split_by_bands(c, q, kParams, out);
    double s = 0.0;
    for (const auto& st : out) {
      const double a = 0.5 * cross(st.corners[1] - st.corners[0], st.corners[2] - st.corners[0]);
      CHECK(a > 0.0);
      s += a;
      // corner values agree with the linear function and lie in the closed band
      const auto t = breakpoints(kParams);
      const int k = static_cast<int>(st.band);
      for (int i = 0; i < 3; ++i) {
        const auto l = barycentric(c, st.corners[i]);
        CHECK(st.q[i] == doctest::Approx(l[0] * q[0] + l[1] * q[1] + l[2] * q[2]).epsilon(1e-12));
        if (k > 0) CHECK(st.q[i] >= t[k - 1] - 1e-12);
        if (k < 4) CHECK(st.q[i] <= t[k] + 1e-12);
      }
    }
    CHECK(s == doctest::Approx(area).epsilon(1e-12));
  }
}

TEST_CASE("split_by_bands keeps a triangle inside one band whole") {
  const std::array<Point, 3> c{Point{0, 0}, Point{1, 0}, Point{0, 1}};
  std::vector<SubTriangle> out;
  split_by_bands(c, {0.1, -0.2, 0.7}, kParams, out);
  REQUIRE(out.size() == 1);
  CHECK(out[0].band == Band::Zero);
}

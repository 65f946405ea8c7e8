#include "spc/afem.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace spc {

namespace {

double segment_distance(Point x, Point a, Point b) {
  const Point d = b - a;
  const double s = std::clamp(dot(x - a, d) / dot(d, d), 0.0, 1.0);
  const Point r = x - (a + s * d);
  return std::hypot(r.x, r.y);
}

double root_sum_square(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char ch) { return std::tolower(ch); });
  return s;
}

}  // namespace

std::vector<int> mark_max_strategy(std::span<const double> eta, double fraction) {
  if (eta.empty()) throw std::invalid_argument("mark_max_strategy: no elements");
  const double top = *std::max_element(eta.begin(), eta.end());
  std::vector<int> marked;
  if (!(top > 0.0)) return marked;
  const double threshold = fraction * top;
  for (std::size_t k = 0; k < eta.size(); ++k)
    if (eta[k] > threshold) marked.push_back(static_cast<int>(k));
  return marked;
}

long count_ndof(const Mesh& mesh, Scheme scheme) {
  const long n = static_cast<long>(mesh.num_interior_vertices());
  switch (scheme) {
    case Scheme::PC: return 2 * n + static_cast<long>(mesh.num_triangles());
    case Scheme::P1: return 3 * n;
    case Scheme::VD: return 2 * n;
  }
  return 0;
}

Scaling scheme_scaling(Scheme scheme) {
  return scheme == Scheme::PC ? Scaling::Energy : Scaling::L2;
}

std::string to_string(RefinementMode mode) {
  return mode == RefinementMode::Uniform ? "uniform" : "adaptive";
}

RefinementMode parse_mode(const std::string& name) {
  const std::string s = lower(name);
  if (s == "uniform") return RefinementMode::Uniform;
  if (s == "adaptive") return RefinementMode::Adaptive;
  throw std::invalid_argument("unknown mode '" + name +
                              "' (expected uniform or adaptive)");
}

AdaptiveResult adaptive_solve(Domain domain, const ProblemData& data,
                              const ManufacturedProblem* exact,
                              const AdaptiveOptions& options) {
  data.validate();
  if (exact && exact->domain != domain)
    throw std::invalid_argument("adaptive_solve: exact solution lives on " +
                                to_string(exact->domain));
  if (!(options.mark_fraction >= 0.0 && options.mark_fraction < 1.0))
    throw std::invalid_argument("adaptive_solve: mark fraction must be in [0, 1)");
  Mesh mesh = make_initial_mesh(domain);
  const long ndof0 = count_ndof(mesh, options.scheme);
  if (options.max_ndof <= ndof0)
    throw std::invalid_argument("adaptive_solve: max_ndof " +
                                std::to_string(options.max_ndof) +
                                " does not exceed the initial ndof " +
                                std::to_string(ndof0));
  const Scaling scaling = scheme_scaling(options.scheme);
  AdaptiveResult result;
  std::optional<InitialGuess> guess;
  for (int step = 0;; ++step) {
    const auto start = std::chrono::steady_clock::now();
    Solution sol;
    try {
      sol = solve_optimality(mesh, data, options.scheme, options.newton,
                             guess ? &*guess : nullptr);
    } catch (const std::exception& e) {
      result.error = std::string("step ") + std::to_string(step) + ": " + e.what();
      return result;
    }
    const IndicatorSet ind = compute_indicators(mesh, sol, data, scaling, options.weights);
    const auto stop = std::chrono::steady_clock::now();

    ConvergenceRecord rec;
    rec.step = step;
    rec.ndof = count_ndof(mesh, options.scheme);
    rec.h_max = mesh.max_diameter();
    rec.est_y = root_sum_square(ind.ey);
    rec.est_p = root_sum_square(ind.ep);
    rec.est_u = root_sum_square(ind.eu);
    rec.est_lambda = root_sum_square(ind.elam);
    const EstimatorWeights& w = options.weights;
    rec.est_total = std::sqrt(w.state * rec.est_y * rec.est_y +
                              w.adjoint * rec.est_p * rec.est_p +
                              w.control * rec.est_u * rec.est_u +
                              w.subgradient * rec.est_lambda * rec.est_lambda);
    rec.newton_iters = sol.newton_iterations;
    rec.wall_time_ms = std::chrono::duration<double, std::milli>(stop - start).count();
    std::optional<ErrorNorms> err;
    if (exact) {
      err = exact_error_norms(mesh, sol, *exact);
      const bool energy = scaling == Scaling::Energy;
      rec.err_y = energy ? err->y_h1 : err->y_l2;
      rec.err_p = energy ? err->p_h1 : err->p_l2;
      rec.err_u = err->u_l2;
      rec.err_lambda = err->lambda_l2;
      rec.err_total = energy ? err->energy() : err->l2();
      rec.effectivity = rec.est_total / rec.err_total;
    }
    if (options.on_step) options.on_step({mesh, sol, ind, err ? &*err : nullptr, rec});
    result.records.push_back(rec);
    if (rec.ndof > options.max_ndof) break;

    std::vector<int> marked;
    if (options.mode == RefinementMode::Uniform) {
      marked.resize(mesh.num_triangles());
      std::iota(marked.begin(), marked.end(), 0);
    } else {
      marked = mark_max_strategy(ind.element_totals(), options.mark_fraction);
    }
    if (marked.empty()) {
      result.stopped_early = true;
      break;
    }
    Mesh next = refine_bisection(mesh, marked);
    if (options.warm_start) {
      const auto y = prolongate_nodal(mesh, next, sol.y.nodal_values(mesh));
      const auto p = prolongate_nodal(mesh, next, sol.p.nodal_values(mesh));
      guess = InitialGuess{restrict_to_interior(next, y), restrict_to_interior(next, p)};
    }
    mesh = std::move(next);
  }
  return result;
}

Localization smallest_element_location(const Mesh& mesh, Point target) {
  int best = 0;
  double h = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const double d = mesh.diameter(static_cast<int>(t));
    if (d < h) {
      h = d;
      best = static_cast<int>(t);
    }
  }
  const auto c = mesh.corners(best);
  const auto l = barycentric(c, target);
  double dist = 0.0;
  if (l[0] < 0.0 || l[1] < 0.0 || l[2] < 0.0) {
    dist = std::min({segment_distance(target, c[0], c[1]),
                     segment_distance(target, c[1], c[2]),
                     segment_distance(target, c[2], c[0])});
  }
  return {dist, h};
}

}  // namespace spc

#pragma once

#include "spc/estimators.hpp"
#include "spc/problems.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace spc {

/// { K : eta_K > fraction * max eta } (strict). Empty for all-zero input.
std::vector<int> mark_max_strategy(std::span<const double> eta,
                                   double fraction = 0.5);

/// PC: 2 n + #T, P1: 3 n, VD: 2 n with n the number of interior vertices.
long count_ndof(const Mesh& mesh, Scheme scheme);

/// Estimator scaling and error norm that go with a scheme: energy for PC,
/// L2 for P1 and VD.
Scaling scheme_scaling(Scheme scheme);

enum class RefinementMode { Uniform, Adaptive };

std::string to_string(RefinementMode mode);
RefinementMode parse_mode(const std::string& name);

struct ConvergenceRecord {
  int step = 0;
  long ndof = 0;
  double h_max = 0.0;
  double err_y = NAN;
  double err_p = NAN;
  double err_u = NAN;
  double err_lambda = NAN;
  double err_total = NAN;
  double est_y = 0.0;
  double est_p = 0.0;
  double est_u = 0.0;
  double est_lambda = 0.0;
  double est_total = 0.0;
  double effectivity = NAN;
  int newton_iters = 0;
  double wall_time_ms = 0.0;
};

/// Everything computed on one mesh, handed to AdaptiveOptions::on_step.
struct StepView {
  const Mesh& mesh;
  const Solution& solution;
  const IndicatorSet& indicators;
  const ErrorNorms* errors;  ///< null without an exact solution
  const ConvergenceRecord& record;
};

struct AdaptiveOptions {
  Scheme scheme = Scheme::PC;
  RefinementMode mode = RefinementMode::Adaptive;
  long max_ndof = 10000;
  double mark_fraction = 0.5;
  EstimatorWeights weights;
  NewtonOptions newton;
  bool warm_start = true;
  std::function<void(const StepView&)> on_step;
};

struct AdaptiveResult {
  std::vector<ConvergenceRecord> records;
  /// True when marking returned no element before max_ndof was reached.
  bool stopped_early = false;
  /// Set when the optimality solver failed; records hold the steps before.
  std::optional<std::string> error;
};

/// Solve, estimate, record, mark (all elements in Uniform mode), refine,
/// starting from make_initial_mesh(domain), until the recorded ndof exceeds
/// max_ndof. With `exact` the records carry exact errors in the scheme's
/// norm. Throws std::invalid_argument if max_ndof does not exceed the
/// initial ndof.
AdaptiveResult adaptive_solve(Domain domain, const ProblemData& data,
                              const ManufacturedProblem* exact,
                              const AdaptiveOptions& options);

/// Distance from the point to the centroid of the smallest triangle, and
/// the smallest diameter.
struct Localization {
  double distance = 0.0;
  double h_min = 0.0;
};
Localization smallest_element_location(const Mesh& mesh, Point target);

}  // namespace spc

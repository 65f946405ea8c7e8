// Command-line driver: `spcopt run ...` writes a convergence table,
// `spcopt rates ...` fits slopes on an existing one.
#include "spc/report.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace spc;

namespace {

struct RunConfig {
  std::string example = "1";
  std::string scheme = "pc";
  std::string mode = "adaptive";
  double alpha = 1e-2;
  double beta = 0.7;
  long max_ndof = 10000;
  double mark_fraction = 0.5;
  double tol = 1e-10;
  std::vector<double> weights{1.0, 1.0, 1.0, 1.0};
  bool vd_quadrature = false;
  std::string out;
  std::string dump_mesh;
  // custom example
  std::string domain = "square";
  double a = -3.0;
  double b = 3.0;
  double f = 0.0;
  double y_omega = 1.0;
};

std::vector<std::string> summary_columns() {
  return {"err_y", "err_p", "err_u", "err_lambda", "err_total",
          "est_y", "est_p", "est_u", "est_lambda", "est_total"};
}

Table to_table(const std::vector<ConvergenceRecord>& records) {
  std::stringstream ss;
  write_csv(ss, records);
  return read_csv(ss);
}

void print_summary(const std::vector<ConvergenceRecord>& records, bool exact, Scheme scheme) {
  if (records.empty()) return;
  const ConvergenceRecord& last = records.back();
  std::printf("steps %zu  final ndof %ld  h_max %.4g\n", records.size(), last.ndof, last.h_max);
  if (exact)
    std::printf("errors    y %.4e  p %.4e  u %.4e  lambda %.4e  total %.4e\n", last.err_y,
                last.err_p, last.err_u, last.err_lambda, last.err_total);
  std::printf("estimator y %.4e  p %.4e  u %.4e  lambda %.4e  total %.4e\n", last.est_y,
              last.est_p, last.est_u, last.est_lambda, last.est_total);
  if (records.size() >= 3) {
    std::vector<std::string> warnings;
    std::vector<std::string> cols = summary_columns();
    if (!exact) cols.erase(cols.begin(), cols.begin() + 5);
    if (scheme == Scheme::VD)
      std::erase_if(cols, [](const std::string& c) { return c == "est_u" || c == "est_lambda"; });
    const auto rates = fit_rates(to_table(records), cols, &warnings);
    std::printf("rates vs ndof (last %zu rows):", std::min<std::size_t>(5, records.size()));
    for (const auto& c : cols) std::printf(" %s %.3f", c.c_str(), rates.at(c));
    std::printf("\n");
    for (const auto& w : warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  }
  if (exact) {
    const std::size_t n = std::min<std::size_t>(3, records.size());
    double mean = 0.0;
    for (std::size_t i = records.size() - n; i < records.size(); ++i) mean += records[i].effectivity;
    std::printf("mean effectivity (last %zu rows) %.4f\n", n, mean / n);
  }
}

int run(const RunConfig& cfg) {
  AdaptiveOptions opts;
  opts.scheme = parse_scheme(cfg.scheme);
  opts.mode = parse_mode(cfg.mode);
  opts.max_ndof = cfg.max_ndof;
  opts.mark_fraction = cfg.mark_fraction;
  opts.weights = {cfg.weights[0], cfg.weights[1], cfg.weights[2], cfg.weights[3]};
  opts.newton.tol = cfg.tol;
  if (cfg.vd_quadrature) opts.newton.vd_integration = VdIntegration::Quadrature;

  std::optional<ManufacturedProblem> problem;
  ProblemData data;
  Domain domain = Domain::UnitSquare;
  if (cfg.example == "1") {
    problem = example1(cfg.alpha, cfg.beta);
  } else if (cfg.example == "2") {
    problem = example2();
    std::fprintf(stderr, "note: example 2 fixes alpha = %g, beta = %g, a = %g, b = %g\n",
                 problem->data.alpha, problem->data.beta, problem->data.a, problem->data.b);
  } else {
    domain = cfg.domain == "lshape" ? Domain::LShape : Domain::UnitSquare;
    const double fv = cfg.f, yv = cfg.y_omega;
    data = constant_data({cfg.alpha, cfg.beta, cfg.a, cfg.b}, fv, yv);
  }
  if (problem) {
    data = problem->data;
    domain = problem->domain;
  }
  data.validate();

  const long initial = count_ndof(make_initial_mesh(domain), opts.scheme);
  if (cfg.max_ndof <= initial) {
    std::fprintf(stderr, "error: --max-ndof %ld does not exceed the initial ndof %ld\n",
                 cfg.max_ndof, initial);
    return 2;
  }
  std::ofstream out(cfg.out);
  if (!out) {
    std::fprintf(stderr, "error: cannot write %s\n", cfg.out.c_str());
    return 2;
  }
  if (!cfg.dump_mesh.empty()) {
    opts.on_step = [&](const StepView& v) {
      const std::string path = cfg.dump_mesh + "." + std::to_string(v.record.step);
      std::ofstream m(path);
      if (!m) throw std::runtime_error("cannot write " + path);
      write_mesh(m, v.mesh);
    };
  }

  const AdaptiveResult result =
      adaptive_solve(domain, data, problem ? &*problem : nullptr, opts);
  write_csv(out, result.records);
  out.close();
  if (!out) {
    std::fprintf(stderr, "error: writing %s failed\n", cfg.out.c_str());
    return 2;
  }
  print_summary(result.records, problem.has_value(), opts.scheme);
  if (result.stopped_early) std::printf("stopped early: no element marked\n");
  if (result.error) {
    std::fprintf(stderr, "error: %s (partial table written)\n", result.error->c_str());
    return 1;
  }
  return 0;
}

int rates(const std::string& path, const std::vector<std::string>& columns) {
  std::ifstream in(path);
  if (!in) {
    std::fprintf(stderr, "error: cannot read %s\n", path.c_str());
    return 2;
  }
  const Table t = read_csv(in);
  std::vector<std::string> warnings;
  const auto r = fit_rates(t, columns, &warnings);
  for (const auto& w : warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  for (const auto& c : columns) std::printf("%s %.6f\n", c.c_str(), r.at(c));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive finite elements for sparse optimal control"};
  app.require_subcommand(1);

  RunConfig cfg;
  auto* run_cmd = app.add_subcommand("run", "Run one refinement experiment");
  run_cmd->add_option("--example", cfg.example, "1, 2 or custom")
      ->check(CLI::IsMember({"1", "2", "custom"}));
  run_cmd->add_option("--scheme", cfg.scheme, "pc, p1 or vd")
      ->check(CLI::IsMember({"pc", "p1", "vd"}));
  run_cmd->add_option("--mode", cfg.mode, "uniform or adaptive")
      ->check(CLI::IsMember({"uniform", "adaptive"}));
  run_cmd->add_option("--alpha", cfg.alpha)->check(CLI::PositiveNumber);
  run_cmd->add_option("--beta", cfg.beta)->check(CLI::PositiveNumber);
  run_cmd->add_option("--max-ndof", cfg.max_ndof)->check(CLI::Range(100L, 1L << 40));
  run_cmd->add_option("--mark-fraction", cfg.mark_fraction)->check(CLI::Range(0.0, 1.0));
  run_cmd->add_option("--tol", cfg.tol, "Newton tolerance")->check(CLI::PositiveNumber);
  run_cmd->add_option("--weights", cfg.weights, "state,adjoint,control,subgradient")
      ->delimiter(',')
      ->expected(4)
      ->check(CLI::NonNegativeNumber);
  run_cmd->add_flag("--vd-quadrature", cfg.vd_quadrature,
                    "Integrate the VD control law by quadrature instead of clipping");
  run_cmd->add_option("--out", cfg.out, "CSV output path")->required();
  run_cmd->add_option("--dump-mesh", cfg.dump_mesh, "Write the mesh of step k to <path>.k");
  run_cmd->add_option("--domain", cfg.domain, "custom example: square or lshape")
      ->check(CLI::IsMember({"square", "lshape"}));
  run_cmd->add_option("--lower", cfg.a, "custom example: lower bound a");
  run_cmd->add_option("--upper", cfg.b, "custom example: upper bound b");
  run_cmd->add_option("--f", cfg.f, "custom example: constant source f");
  run_cmd->add_option("--y-omega", cfg.y_omega, "custom example: constant target");

  std::string in_path;
  std::vector<std::string> columns{"err_total", "est_total"};
  auto* rates_cmd = app.add_subcommand("rates", "Fit slopes vs ndof on a CSV table");
  rates_cmd->add_option("--in", in_path)->required();
  rates_cmd->add_option("--columns", columns)->delimiter(',');

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run_cmd) return run(cfg);
    return rates(in_path, columns);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}

#pragma once

#include "spc/sparse.hpp"

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace spc {

inline constexpr double kDefaultSolverTol = 1e-10;

/// Thrown when a solve does not reach its residual contract, or the system
/// is singular. Carries the achieved relative residual.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual, int iterations)
      : std::runtime_error(what), residual_(residual), iterations_(iterations) {}
  double residual() const { return residual_; }
  int iterations() const { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

struct SolveStats {
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Jacobi-preconditioned conjugate gradients; at most 20 n iterations.
/// Returns x with ||A x - b|| <= tol ||b||, recomputed from A on exit.
std::vector<double> solve_spd(const SparseMatrix& a, std::span<const double> b,
                              double tol = kDefaultSolverTol,
                              SolveStats* stats = nullptr);

/// Blocks of the Newton operator [[A, -B], [-M, A]] acting on (dy, dp).
struct CoupledBlocks {
  const SparseMatrix& a;
  const SparseMatrix& b;
  const SparseMatrix& m;
};

enum class CoupledMethod {
  /// Sparse LU of the assembled 2n x 2n operator.
  Direct,
  /// Restarted GMRES on the Schur complement A - M A^{-1} B, right
  /// preconditioned by A^{-1} (A factorized once).
  SchurGmres,
};

struct CoupledOptions {
  CoupledMethod method = CoupledMethod::Direct;
  double tol = kDefaultSolverTol;
  int restart = 60;
  int max_iterations = 600;
};

/// Solves [[A, -B], [-M, A]] (dy, dp) = (r1, r2). The relative residual of
/// the full block system is checked on exit.
std::vector<double> solve_coupled(const CoupledBlocks& blocks,
                                  std::span<const double> rhs,
                                  const CoupledOptions& options = {},
                                  SolveStats* stats = nullptr);

/// ||K x - rhs|| / ||rhs|| for the block operator (0 when rhs = 0 and x = 0).
double coupled_residual(const CoupledBlocks& blocks, std::span<const double> x,
                        std::span<const double> rhs);

}  // namespace spc

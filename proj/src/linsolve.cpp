#include "spc/linsolve.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <cmath>

namespace spc {

namespace {

using EigenSparse = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

void append_block(std::vector<Eigen::Triplet<double>>& out,
                  const SparseMatrix& m, int row0, int col0, double scale) {
  for (int i = 0; i < m.rows(); ++i)
    for (int k = m.row_offsets()[i]; k < m.row_offsets()[i + 1]; ++k)
      out.emplace_back(row0 + i, col0 + m.col_index()[k],
                       scale * m.values()[k]);
}

EigenSparse to_eigen(const SparseMatrix& m) {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(m.nonzeros());
  append_block(t, m, 0, 0, 1.0);
  EigenSparse e(m.rows(), m.cols());
  e.setFromTriplets(t.begin(), t.end());
  return e;
}

void apply_coupled(const CoupledBlocks& k, std::span<const double> x,
                   std::span<double> y) {
  const int n = k.a.rows();
  std::vector<double> t(n);
  const auto xy = x.subspan(0, n), xp = x.subspan(n, n);
  auto y1 = y.subspan(0, n), y2 = y.subspan(n, n);
  k.a.multiply(xy, y1);
  k.b.multiply(xp, t);
  for (int i = 0; i < n; ++i) y1[i] -= t[i];
  k.a.multiply(xp, y2);
  k.m.multiply(xy, t);
  for (int i = 0; i < n; ++i) y2[i] -= t[i];
}

std::vector<double> coupled_direct(const CoupledBlocks& k,
                                   std::span<const double> rhs, double tol,
                                   SolveStats& stats) {
  const int n = k.a.rows();
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(2 * k.a.nonzeros() + k.b.nonzeros() + k.m.nonzeros());
  append_block(t, k.a, 0, 0, 1.0);
  append_block(t, k.b, 0, n, -1.0);
  append_block(t, k.m, n, 0, -1.0);
  append_block(t, k.a, n, n, 1.0);
  EigenSparse big(2 * n, 2 * n);
  big.setFromTriplets(t.begin(), t.end());
  big.makeCompressed();
  Eigen::SparseLU<EigenSparse, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(big);
  if (lu.info() != Eigen::Success)
    throw SolverError("solve_coupled: singular Newton system (" +
                          lu.lastErrorMessage() + ")",
                      INFINITY, 0);
  Eigen::Map<const Eigen::VectorXd> b(rhs.data(), 2 * n);
  Eigen::VectorXd x = lu.solve(b);
  std::vector<double> out(x.data(), x.data() + 2 * n);
  // A few steps of iterative refinement if the factorization lost accuracy.
  std::vector<double> r(2 * n);
  for (int pass = 0; pass < 3; ++pass) {
    const double res = coupled_residual(k, out, rhs);
    stats.relative_residual = res;
    if (res <= tol) break;
    apply_coupled(k, out, r);
    for (int i = 0; i < 2 * n; ++i) r[i] = rhs[i] - r[i];
    Eigen::Map<Eigen::VectorXd> rv(r.data(), 2 * n);
    Eigen::VectorXd dx = lu.solve(rv);
    for (int i = 0; i < 2 * n; ++i) out[i] += dx[i];
    ++stats.iterations;
  }
  return out;
}

// GMRES(m) for S z = g with S = (A - M A^{-1} B) A^{-1}; then dp = A^{-1} z.
std::vector<double> coupled_schur(const CoupledBlocks& k,
                                  std::span<const double> rhs,
                                  const CoupledOptions& opt,
                                  SolveStats& stats) {
  const int n = k.a.rows();
  Eigen::SimplicialLDLT<EigenSparse> chol(to_eigen(k.a));
  if (chol.info() != Eigen::Success)
    throw SolverError("solve_coupled: state operator is not SPD", INFINITY, 0);
  auto solve_a = [&](std::span<const double> in, std::span<double> out) {
    Eigen::Map<const Eigen::VectorXd> b(in.data(), n);
    Eigen::Map<Eigen::VectorXd> x(out.data(), n);
    x = chol.solve(b);
  };
  std::vector<double> tmp(n), tmp2(n);
  auto apply_s = [&](std::span<const double> z, std::span<double> out) {
    std::vector<double> dp(n);
    solve_a(z, dp);  // dp = A^{-1} z
    k.b.multiply(dp, tmp);
    solve_a(tmp, tmp2);  // A^{-1} B dp
    k.m.multiply(tmp2, tmp);
    k.a.multiply(dp, out);
    for (int i = 0; i < n; ++i) out[i] -= tmp[i];
  };

  // g = r2 + M A^{-1} r1
  const auto r1 = rhs.subspan(0, n), r2 = rhs.subspan(n, n);
  std::vector<double> a_inv_r1(n), g(n);
  solve_a(r1, a_inv_r1);
  k.m.multiply(a_inv_r1, g);
  for (int i = 0; i < n; ++i) g[i] += r2[i];

  const double gnorm = norm2(g);
  std::vector<double> z(n, 0.0);
  const int m = std::max(1, std::min(opt.restart, n));
  int total = 0;
  if (gnorm > 0.0) {
    std::vector<std::vector<double>> v(m + 1, std::vector<double>(n));
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m + 1, m);
    std::vector<double> cs(m), sn(m), e(m + 1), w(n);
    // Inner target a bit below tol: the block residual is checked afterwards.
    const double target = 0.1 * opt.tol * norm2(rhs);
    bool done = false;
    while (!done && total < opt.max_iterations) {
      apply_s(z, w);
      for (int i = 0; i < n; ++i) v[0][i] = g[i] - w[i];
      double beta = norm2(v[0]);
      if (beta <= target) break;
      for (double& x : v[0]) x /= beta;
      std::fill(e.begin(), e.end(), 0.0);
      e[0] = beta;
      int j = 0;
      for (; j < m && total < opt.max_iterations; ++j, ++total) {
        apply_s(v[j], w);
        for (int i = 0; i <= j; ++i) {
          h(i, j) = dot(w, v[i]);
          for (int r = 0; r < n; ++r) w[r] -= h(i, j) * v[i][r];
        }
        h(j + 1, j) = norm2(w);
        if (h(j + 1, j) > 0.0)
          for (int r = 0; r < n; ++r) v[j + 1][r] = w[r] / h(j + 1, j);
        for (int i = 0; i < j; ++i) {
          const double t = cs[i] * h(i, j) + sn[i] * h(i + 1, j);
          h(i + 1, j) = -sn[i] * h(i, j) + cs[i] * h(i + 1, j);
          h(i, j) = t;
        }
        const double den = std::hypot(h(j, j), h(j + 1, j));
        if (den == 0.0)
          throw SolverError("solve_coupled: GMRES breakdown (singular system)",
                            INFINITY, total);
        cs[j] = h(j, j) / den;
        sn[j] = h(j + 1, j) / den;
        h(j, j) = den;
        h(j + 1, j) = 0.0;
        e[j + 1] = -sn[j] * e[j];
        e[j] = cs[j] * e[j];
        if (std::abs(e[j + 1]) <= target) {
          ++j;
          ++total;
          done = true;
          break;
        }
      }
      // Back substitution and update of z.
      std::vector<double> yk(j);
      for (int i = j - 1; i >= 0; --i) {
        double s = e[i];
        for (int c = i + 1; c < j; ++c) s -= h(i, c) * yk[c];
        yk[i] = s / h(i, i);
      }
      for (int i = 0; i < j; ++i)
        for (int r = 0; r < n; ++r) z[r] += yk[i] * v[i][r];
    }
  }
  stats.iterations = total;
  std::vector<double> out(2 * n);
  std::span<double> dy(out.data(), n), dp(out.data() + n, n);
  solve_a(z, dp);
  // dy = A^{-1}(r1 + B dp)
  k.b.multiply(dp, tmp);
  for (int i = 0; i < n; ++i) tmp[i] += r1[i];
  solve_a(tmp, dy);
  stats.relative_residual = coupled_residual(k, out, rhs);
  return out;
}

}  // namespace

std::vector<double> solve_spd(const SparseMatrix& a, std::span<const double> b,
                              double tol, SolveStats* stats) {
  if (!a.square() || b.size() != static_cast<std::size_t>(a.rows()))
    throw std::invalid_argument("solve_spd: shape mismatch");
  if (!(tol > 0.0)) throw std::invalid_argument("solve_spd: tol must be > 0");
  const int n = a.rows();
  std::vector<double> x(n, 0.0);
  const double bnorm = norm2(b);
  SolveStats local;
  if (bnorm == 0.0) {
    if (stats) *stats = local;
    return x;
  }
  std::vector<double> inv_diag = a.diagonal();
  for (double& d : inv_diag) {
    if (!(d > 0.0))
      throw SolverError("solve_spd: non-positive diagonal entry", INFINITY, 0);
    d = 1.0 / d;
  }
  std::vector<double> r(b.begin(), b.end()), z(n), p(n), q(n);
  for (int i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
  p = z;
  double rz = dot(r, z);
  const long cap = 20L * n;
  long it = 0;
  double res = 1.0;
  while (it < cap) {
    a.multiply(p, q);
    const double pq = dot(p, q);
    if (!(pq > 0.0))
      throw SolverError("solve_spd: matrix is not positive definite",
                        norm2(r) / bnorm, static_cast<int>(it));
    const double step = rz / pq;
    for (int i = 0; i < n; ++i) {
      x[i] += step * p[i];
      r[i] -= step * q[i];
    }
    ++it;
    res = norm2(r) / bnorm;
    if (res <= tol) {
      // Confirm with the true residual; restart from it if CG drifted.
      a.multiply(x, q);
      for (int i = 0; i < n; ++i) r[i] = b[i] - q[i];
      res = norm2(r) / bnorm;
      if (res <= tol) break;
      for (int i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
      p = z;
      rz = dot(r, z);
      continue;
    }
    for (int i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    const double rz_new = dot(r, z);
    const double ratio = rz_new / rz;
    rz = rz_new;
    for (int i = 0; i < n; ++i) p[i] = z[i] + ratio * p[i];
  }
  local.iterations = static_cast<int>(it);
  local.relative_residual = res;
  if (stats) *stats = local;
  if (!(res <= tol))
    throw SolverError("solve_spd: no convergence within " +
                          std::to_string(cap) + " iterations",
                      res, static_cast<int>(it));
  return x;
}

double coupled_residual(const CoupledBlocks& blocks, std::span<const double> x,
                        std::span<const double> rhs) {
  std::vector<double> r(rhs.size());
  apply_coupled(blocks, x, r);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = rhs[i] - r[i];
  const double rn = norm2(rhs);
  const double res = norm2(r);
  if (rn == 0.0) return res;
  return res / rn;
}

std::vector<double> solve_coupled(const CoupledBlocks& blocks,
                                  std::span<const double> rhs,
                                  const CoupledOptions& options,
                                  SolveStats* stats) {
  const int n = blocks.a.rows();
  if (!blocks.a.square() || blocks.b.rows() != n || blocks.b.cols() != n ||
      blocks.m.rows() != n || blocks.m.cols() != n ||
      rhs.size() != static_cast<std::size_t>(2 * n))
    throw std::invalid_argument("solve_coupled: shape mismatch");
  if (!(options.tol > 0.0))
    throw std::invalid_argument("solve_coupled: tol must be > 0");
  SolveStats local;
  std::vector<double> x;
  if (norm2(rhs) == 0.0) {
    x.assign(2 * n, 0.0);
  } else if (options.method == CoupledMethod::Direct) {
    x = coupled_direct(blocks, rhs, options.tol, local);
  } else {
    x = coupled_schur(blocks, rhs, options, local);
  }
  if (stats) *stats = local;
  for (double v : x)
    if (!std::isfinite(v))
      throw SolverError("solve_coupled: non-finite solution (singular system)",
                        INFINITY, local.iterations);
  if (!(local.relative_residual <= options.tol))
    throw SolverError("solve_coupled: residual " +
                          std::to_string(local.relative_residual) +
                          " above tolerance",
                      local.relative_residual, local.iterations);
  return x;
}

}  // namespace spc

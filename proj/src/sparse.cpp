#include "spc/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace spc {

SparseMatrix::SparseMatrix(int rows, int cols, std::vector<int> row_offsets,
                           std::vector<int> col_index,
                           std::vector<double> values)
    : rows_(rows),
      cols_(cols),
      offsets_(std::move(row_offsets)),
      cols_index_(std::move(col_index)),
      values_(std::move(values)) {
  if (offsets_.size() != static_cast<std::size_t>(rows_) + 1 ||
      cols_index_.size() != values_.size() ||
      static_cast<std::size_t>(offsets_.back()) != values_.size())
    throw std::invalid_argument("SparseMatrix: inconsistent CSR arrays");
  for (int i = 0; i < rows_; ++i) {
    for (int k = offsets_[i]; k < offsets_[i + 1]; ++k) {
      if (cols_index_[k] < 0 || cols_index_[k] >= cols_ ||
          (k > offsets_[i] && cols_index_[k] <= cols_index_[k - 1]))
        throw std::invalid_argument("SparseMatrix: row " + std::to_string(i) +
                                    " has unsorted or invalid columns");
    }
  }
}

SparseMatrix SparseMatrix::from_triplets(int rows, int cols,
                                         std::vector<Triplet> entries) {
  std::stable_sort(entries.begin(), entries.end(),
            [](const Triplet& a, const Triplet& b) {
              return a.row != b.row ? a.row < b.row : a.col < b.col;
            });
  std::vector<int> offsets(rows + 1, 0);
  std::vector<int> cols_index;
  std::vector<double> values;
  cols_index.reserve(entries.size());
  values.reserve(entries.size());
  for (std::size_t k = 0; k < entries.size();) {
    const Triplet& t = entries[k];
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
      throw std::out_of_range("SparseMatrix::from_triplets: entry out of range");
    double sum = 0.0;
    std::size_t j = k;
    for (; j < entries.size() && entries[j].row == t.row &&
           entries[j].col == t.col;
         ++j)
      sum += entries[j].value;
    cols_index.push_back(t.col);
    values.push_back(sum);
    ++offsets[t.row + 1];
    k = j;
  }
  for (int i = 0; i < rows; ++i) offsets[i + 1] += offsets[i];
  return SparseMatrix(rows, cols, std::move(offsets), std::move(cols_index),
                      std::move(values));
}

SparseMatrix SparseMatrix::identity(int n) {
  std::vector<int> offsets(n + 1), cols(n);
  for (int i = 0; i <= n; ++i) offsets[i] = i;
  for (int i = 0; i < n; ++i) cols[i] = i;
  return SparseMatrix(n, n, std::move(offsets), std::move(cols),
                      std::vector<double>(n, 1.0));
}

int SparseMatrix::find(int i, int j) const {
  const auto first = cols_index_.begin() + offsets_[i];
  const auto last = cols_index_.begin() + offsets_[i + 1];
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return -1;
  return static_cast<int>(it - cols_index_.begin());
}

double SparseMatrix::at(int i, int j) const {
  const int k = find(i, j);
  return k < 0 ? 0.0 : values_[k];
}

void SparseMatrix::multiply(std::span<const double> x,
                            std::span<double> y) const {
  const int* off = offsets_.data();
  const int* col = cols_index_.data();
  const double* val = values_.data();
  const double* xp = x.data();
  double* yp = y.data();
  const int n = rows_;
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int k = off[i]; k < off[i + 1]; ++k) s += val[k] * xp[col[k]];
    yp[i] = s;
  }
}

void SparseMatrix::multiply_serial(std::span<const double> x,
                                   std::span<double> y) const {
  for (int i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (int k = offsets_[i]; k < offsets_[i + 1]; ++k)
      s += values_[k] * x[cols_index_[k]];
    y[i] = s;
  }
}

std::vector<double> SparseMatrix::operator*(std::span<const double> x) const {
  if (x.size() != static_cast<std::size_t>(cols_))
    throw std::invalid_argument("SparseMatrix: vector length mismatch");
  std::vector<double> y(rows_);
  multiply(x, y);
  return y;
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<int> offsets(cols_ + 1, 0);
  for (int c : cols_index_) ++offsets[c + 1];
  for (int j = 0; j < cols_; ++j) offsets[j + 1] += offsets[j];
  std::vector<int> fill(offsets.begin(), offsets.end() - 1);
  std::vector<int> cols(values_.size());
  std::vector<double> vals(values_.size());
  for (int i = 0; i < rows_; ++i) {
    for (int k = offsets_[i]; k < offsets_[i + 1]; ++k) {
      const int dst = fill[cols_index_[k]]++;
      cols[dst] = i;
      vals[dst] = values_[k];
    }
  }
  return SparseMatrix(cols_, rows_, std::move(offsets), std::move(cols),
                      std::move(vals));
}

std::vector<double> SparseMatrix::diagonal() const {
  std::vector<double> d(std::min(rows_, cols_), 0.0);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = at(int(i), int(i));
  return d;
}

double SparseMatrix::asymmetry() const {
  double worst = 0.0;
  for (int i = 0; i < rows_; ++i)
    for (int k = offsets_[i]; k < offsets_[i + 1]; ++k)
      worst = std::max(worst, std::abs(values_[k] - at(cols_index_[k], i)));
  return worst;
}

SparseMatrix multiply(const SparseMatrix& a, std::span<const double> d,
                      const SparseMatrix& b) {
  if (a.cols() != b.rows() || d.size() != static_cast<std::size_t>(a.cols()))
    throw std::invalid_argument("multiply: shape mismatch");
  // Row-merge product with a dense accumulator.
  std::vector<int> offsets(a.rows() + 1, 0);
  std::vector<int> cols;
  std::vector<double> vals;
  std::vector<double> acc(b.cols(), 0.0);
  std::vector<int> mark(b.cols(), -1);
  std::vector<int> touched;
  const auto ao = a.row_offsets(), bo = b.row_offsets();
  const auto ac = a.col_index(), bc = b.col_index();
  const auto av = a.values(), bv = b.values();
  for (int i = 0; i < a.rows(); ++i) {
    touched.clear();
    for (int ka = ao[i]; ka < ao[i + 1]; ++ka) {
      const int m = ac[ka];
      const double s = av[ka] * d[m];
      if (s == 0.0) continue;
      for (int kb = bo[m]; kb < bo[m + 1]; ++kb) {
        const int j = bc[kb];
        if (mark[j] != i) {
          mark[j] = i;
          acc[j] = 0.0;
          touched.push_back(j);
        }
        acc[j] += s * bv[kb];
      }
    }
    std::sort(touched.begin(), touched.end());
    for (int j : touched) {
      cols.push_back(j);
      vals.push_back(acc[j]);
    }
    offsets[i + 1] = static_cast<int>(cols.size());
  }
  return SparseMatrix(a.rows(), b.cols(), std::move(offsets), std::move(cols),
                      std::move(vals));
}

SparseMatrix add(double s, const SparseMatrix& a, double t,
                 const SparseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("add: shape mismatch");
  std::vector<Triplet> entries;
  entries.reserve(a.nonzeros() + b.nonzeros());
  for (int i = 0; i < a.rows(); ++i) {
    for (int k = a.row_offsets()[i]; k < a.row_offsets()[i + 1]; ++k)
      entries.push_back({i, a.col_index()[k], s * a.values()[k]});
    for (int k = b.row_offsets()[i]; k < b.row_offsets()[i + 1]; ++k)
      entries.push_back({i, b.col_index()[k], t * b.values()[k]});
  }
  return SparseMatrix::from_triplets(a.rows(), a.cols(), std::move(entries));
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double norm_inf(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace spc

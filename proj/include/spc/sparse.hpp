#pragma once

#include <span>
#include <vector>

namespace spc {

struct Triplet {
  int row;
  int col;
  double value;
};

/// Compressed-row sparse matrix. Column indices are sorted and unique in
/// every row.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(int rows, int cols, std::vector<int> row_offsets,
               std::vector<int> col_index, std::vector<double> values);

  /// Duplicate (row, col) entries are summed.
  static SparseMatrix from_triplets(int rows, int cols,
                                    std::vector<Triplet> entries);
  static SparseMatrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }
  std::size_t nonzeros() const { return values_.size(); }

  std::span<const int> row_offsets() const { return offsets_; }
  std::span<const int> col_index() const { return cols_index_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values_mut() { return values_; }

  /// Entry (i, j), zero if not stored.
  double at(int i, int j) const;
  /// Position of (i, j) in values(), or -1.
  int find(int i, int j) const;

  /// y = A x, rows processed in parallel.
  void multiply(std::span<const double> x, std::span<double> y) const;
  /// Single-threaded reference for multiply().
  void multiply_serial(std::span<const double> x, std::span<double> y) const;
  std::vector<double> operator*(std::span<const double> x) const;

  SparseMatrix transpose() const;
  std::vector<double> diagonal() const;
  /// max |A - A^T| over stored entries.
  double asymmetry() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<int> offsets_{0};
  std::vector<int> cols_index_;
  std::vector<double> values_;
};

/// A * diag(d) * B.
SparseMatrix multiply(const SparseMatrix& a, std::span<const double> d,
                      const SparseMatrix& b);
/// s*A + t*B (same shape).
SparseMatrix add(double s, const SparseMatrix& a, double t,
                 const SparseMatrix& b);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double norm_inf(std::span<const double> a);

}  // namespace spc

#pragma once

#include "spc/afem.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace spc {

/// Header of the convergence table.
const std::string& csv_header();

/// One row per record, reals with 12 significant digits ("nan" when no
/// exact error is available).
void write_csv(std::ostream& out, const std::vector<ConvergenceRecord>& records);

/// Columns of a CSV file keyed by header name.
using Table = std::map<std::string, std::vector<double>>;
Table read_csv(std::istream& in);

/// Least-squares slope of log(value) against log(ndof) over the last
/// min(5, rows) rows. Rows with non-positive or non-finite values are left
/// out and reported in `warnings`; NaN if fewer than two usable rows remain.
/// Throws std::invalid_argument for fewer than three rows or an unknown
/// column.
std::map<std::string, double> fit_rates(const Table& table,
                                        const std::vector<std::string>& columns,
                                        std::vector<std::string>* warnings = nullptr,
                                        std::size_t window = 5);

/// Slope over the last `window` records of a field.
double record_slope(const std::vector<ConvergenceRecord>& records,
                    double ConvergenceRecord::*field, std::size_t window);

}  // namespace spc

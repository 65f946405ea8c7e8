#include "spc/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace spc {

namespace {

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_real(const std::string& s) {
  if (s == "nan" || s.empty()) return NAN;
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw std::invalid_argument("read_csv: not a number: '" + s + "'");
  return v;
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : NAN;
}

}  // namespace

const std::string& csv_header() {
  static const std::string h =
      "step,ndof,h_max,err_y,err_p,err_u,err_lambda,err_total,est_y,est_p,"
      "est_u,est_lambda,est_total,effectivity,newton_iters,wall_time_ms";
  return h;
}

void write_csv(std::ostream& out, const std::vector<ConvergenceRecord>& records) {
  out << csv_header() << '\n';
  for (const ConvergenceRecord& r : records) {
    out << r.step << ',' << r.ndof;
    for (double v : {r.h_max, r.err_y, r.err_p, r.err_u, r.err_lambda, r.err_total,
                     r.est_y, r.est_p, r.est_u, r.est_lambda, r.est_total, r.effectivity})
      out << ',' << format_real(v);
    out << ',' << r.newton_iters << ',' << format_real(r.wall_time_ms) << '\n';
  }
}

Table read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("read_csv: empty input");
  const std::vector<std::string> names = split(line);
  Table table;
  for (const auto& n : names) table[n];
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const std::vector<std::string> cells = split(line);
    if (cells.size() != names.size())
      throw std::invalid_argument("read_csv: row " + std::to_string(row) + " has " +
                                  std::to_string(cells.size()) + " cells, expected " +
                                  std::to_string(names.size()));
    for (std::size_t k = 0; k < cells.size(); ++k)
      table[names[k]].push_back(parse_real(cells[k]));
  }
  return table;
}

std::map<std::string, double> fit_rates(const Table& table,
                                        const std::vector<std::string>& columns,
                                        std::vector<std::string>* warnings,
                                        std::size_t window) {
  const auto nd = table.find("ndof");
  if (nd == table.end()) throw std::invalid_argument("fit_rates: missing column 'ndof'");
  const std::vector<double>& ndof = nd->second;
  if (ndof.size() < 3)
    throw std::invalid_argument("fit_rates: need at least 3 rows, got " +
                                std::to_string(ndof.size()));
  const std::size_t first = ndof.size() > window ? ndof.size() - window : 0;
  std::map<std::string, double> out;
  for (const std::string& name : columns) {
    const auto col = table.find(name);
    if (col == table.end())
      throw std::invalid_argument("fit_rates: missing column '" + name + "'");
    std::vector<double> x, y;
    std::size_t skipped = 0;
    for (std::size_t i = first; i < ndof.size(); ++i) {
      const double v = col->second[i];
      if (!(v > 0.0) || !std::isfinite(v) || !(ndof[i] > 0.0)) {
        ++skipped;
        continue;
      }
      x.push_back(std::log(ndof[i]));
      y.push_back(std::log(v));
    }
    if (skipped > 0 && warnings)
      warnings->push_back("column '" + name + "': " + std::to_string(skipped) +
                          " non-positive or non-finite value(s) excluded");
    out[name] = x.size() >= 2 ? least_squares_slope(x, y) : NAN;
  }
  return out;
}

double record_slope(const std::vector<ConvergenceRecord>& records,
                    double ConvergenceRecord::*field, std::size_t window) {
  Table t;
  for (const ConvergenceRecord& r : records) {
    t["ndof"].push_back(static_cast<double>(r.ndof));
    t["v"].push_back(r.*field);
  }
  if (t["ndof"].size() < 3) return NAN;
  return fit_rates(t, {"v"}, nullptr, window).at("v");
}

}  // namespace spc

#include "ishear/timeseries.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "ishear/errors.hpp"

namespace ishear {

TimeSeries::TimeSeries(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void TimeSeries::add_row(std::vector<double> row) {
  if (row.size() != columns_.size()) throw NumericalFailure("row width does not match columns");
  for (std::size_t i = 0; i < row.size(); ++i)
    if (!std::isfinite(row[i]))
      throw NumericalFailure("non-finite value in column '" + columns_[i] + "' at t = " +
                             format_number(row[0]));
  if (!rows_.empty() && !(row[0] > rows_.back()[0]))
    throw NumericalFailure("time column must be strictly increasing");
  rows_.push_back(std::move(row));
}

int TimeSeries::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i)
    if (columns_[i] == name) return int(i);
  throw DomainError("no column named " + name);
}

std::vector<double> TimeSeries::column(const std::string& name) const {
  int j = index_of(name);
  std::vector<double> out;
  out.reserve(rows_.size());
  for (const auto& r : rows_) out.push_back(r[j]);
  return out;
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void TimeSeries::write_csv(std::ostream& os) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) os << (i ? "," : "") << columns_[i];
  os << '\n';
  for (const auto& r : rows_) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << format_number(r[i]);
    os << '\n';
  }
}

void TimeSeries::write_csv(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot open " + path + " for writing");
  write_csv(f);
}

}  // namespace ishear

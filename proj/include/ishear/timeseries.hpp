#pragma once
#include <iosfwd>
#include <string>
#include <vector>

namespace ishear {

// Named columns, first column is time. Rows must have strictly increasing
// time and finite entries.
class TimeSeries {
 public:
  TimeSeries() = default;
  explicit TimeSeries(std::vector<std::string> columns);

  void add_row(std::vector<double> row);

  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<double>>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }
  int index_of(const std::string& name) const;
  std::vector<double> column(const std::string& name) const;

  void write_csv(std::ostream& os) const;
  void write_csv(const std::string& path) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<double>> rows_;
};

// Fixed, locale-independent rendering shared by every CSV writer.
std::string format_number(double v);

}  // namespace ishear

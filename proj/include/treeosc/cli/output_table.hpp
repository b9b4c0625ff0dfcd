#pragma once

#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace treeosc::cli {

/// Rows of reals under named columns, written as CSV after '#' key=value lines.
class OutputTable {
 public:
  explicit OutputTable(std::vector<std::string> columns);

  void add_row(std::vector<double> row);
  void set_meta(const std::string& key, const std::string& value);
  void set_meta(const std::string& key, double value);
  /// Value of a metadata key, empty if absent.
  std::string meta(const std::string& key) const;

  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<double>>& rows() const { return rows_; }
  std::vector<double> column(const std::string& name) const;

  void write_csv(std::ostream& out) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<double>> rows_;
  std::vector<std::pair<std::string, std::string>> meta_;
};

/// Shortest round-trip decimal form, independent of locale.
std::string format_number(double value);

}  // namespace treeosc::cli

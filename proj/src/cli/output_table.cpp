#include "treeosc/cli/output_table.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace treeosc::cli {

OutputTable::OutputTable(std::vector<std::string> columns) : columns_(std::move(columns)) {
  if (columns_.empty()) throw std::invalid_argument("table needs at least one column");
}

void OutputTable::add_row(std::vector<double> row) {
  if (row.size() != columns_.size()) throw std::invalid_argument("row arity does not match the columns");
  rows_.push_back(std::move(row));
}

void OutputTable::set_meta(const std::string& key, const std::string& value) {
  for (auto& [k, v] : meta_) {
    if (k == key) {
      v = value;
      return;
    }
  }
  meta_.emplace_back(key, value);
}

void OutputTable::set_meta(const std::string& key, double value) { set_meta(key, format_number(value)); }

std::string OutputTable::meta(const std::string& key) const {
  for (const auto& [k, v] : meta_) {
    if (k == key) return v;
  }
  return {};
}

std::vector<double> OutputTable::column(const std::string& name) const {
  const auto it = std::find(columns_.begin(), columns_.end(), name);
  if (it == columns_.end()) throw std::out_of_range("no column " + name);
  const auto index = static_cast<std::size_t>(it - columns_.begin());
  std::vector<double> out;
  out.reserve(rows_.size());
  for (const auto& row : rows_) out.push_back(row[index]);
  return out;
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, result.ptr);
}

void OutputTable::write_csv(std::ostream& out) const {
  for (const auto& [k, v] : meta_) out << "# " << k << '=' << v << '\n';
  for (std::size_t i = 0; i < columns_.size(); ++i) out << (i ? "," : "") << columns_[i];
  out << '\n';
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_number(row[i]);
    out << '\n';
  }
}

}  // namespace treeosc::cli

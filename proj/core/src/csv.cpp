#include "divgrad/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <sstream>

#include "divgrad/errors.hpp"

namespace divgrad {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return std::signbit(x) ? "-0" : "0";
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  if (ec != std::errc{}) throw Error("format_double: to_chars failed");
  return std::string(buf.data(), end);
}

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void CsvTable::add_meta(std::string key, std::string value) {
  meta_.emplace_back(std::move(key), std::move(value));
}

void CsvTable::add_meta(std::string key, double value) {
  meta_.emplace_back(std::move(key), format_double(value));
}

CsvTable::Row& CsvTable::Row::operator<<(double v) {
  cells_.push_back(format_double(v));
  return *this;
}

CsvTable::Row& CsvTable::Row::operator<<(std::int64_t v) {
  cells_.push_back(std::to_string(v));
  return *this;
}

CsvTable::Row& CsvTable::Row::operator<<(bool v) {
  cells_.emplace_back(v ? "true" : "false");
  return *this;
}

CsvTable::Row& CsvTable::Row::operator<<(std::string_view v) {
  cells_.emplace_back(v);
  return *this;
}

CsvTable::Row::~Row() { table_.commit(std::move(cells_)); }

void CsvTable::commit(std::vector<std::string> cells) {
  if (cells.size() != columns_.size()) {
    throw ParameterError("CsvTable: row has " + std::to_string(cells.size()) +
                         " cells, expected " + std::to_string(columns_.size()));
  }
  rows_.push_back(std::move(cells));
}

std::string CsvTable::str() const {
  std::ostringstream out;
  for (const auto& [k, v] : meta_) out << "# " << k << ": " << v << '\n';
  for (std::size_t i = 0; i < columns_.size(); ++i) out << (i ? "," : "") << columns_[i];
  out << '\n';
  for (const auto& r : rows_) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
    out << '\n';
  }
  return out.str();
}

}  // namespace divgrad

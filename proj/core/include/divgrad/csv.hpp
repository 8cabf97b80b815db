#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace divgrad {

/// Shortest representation that parses back to the same double.
std::string format_double(double x);

/// CSV table with `#`-prefixed metadata lines ahead of the header row.
/// Cells are stored as text; numbers go through format_double().
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns);

  void add_meta(std::string key, std::string value);
  void add_meta(std::string key, double value);

  class Row {
   public:
    Row& operator<<(double v);
    Row& operator<<(std::int64_t v);
    Row& operator<<(int v) { return *this << static_cast<std::int64_t>(v); }
    Row& operator<<(std::size_t v) { return *this << static_cast<std::int64_t>(v); }
    Row& operator<<(bool v);
    Row& operator<<(std::string_view v);
    Row& operator<<(const char* v) { return *this << std::string_view(v); }
    ~Row();
    Row(const Row&) = delete;
    Row& operator=(const Row&) = delete;

   private:
    friend class CsvTable;
    explicit Row(CsvTable& t) : table_(t) {}
    CsvTable& table_;
    std::vector<std::string> cells_;
  };

  /// Starts a row; cells are streamed in column order and the row is
  /// committed when the temporary goes out of scope.
  Row row() { return Row(*this); }

  const std::vector<std::string>& columns() const noexcept { return columns_; }
  const std::vector<std::pair<std::string, std::string>>& meta() const noexcept { return meta_; }
  std::size_t rows() const noexcept { return rows_.size(); }
  const std::vector<std::string>& row_cells(std::size_t i) const { return rows_.at(i); }

  /// Serialized form: metadata lines, header, rows; '\n' line endings.
  std::string str() const;

 private:
  void commit(std::vector<std::string> cells);
  std::vector<std::string> columns_;
  std::vector<std::pair<std::string, std::string>> meta_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace divgrad

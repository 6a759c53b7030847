#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace evd {

/// Shortest decimal that round-trips; "nan", "inf", "-inf" for non-finite.
std::string format_double(double v);

/// A small in-memory CSV table. Cells are stored as text; nothing is quoted,
/// so cells must not contain commas or newlines.
class CsvTable {
 public:
  CsvTable() = default;
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  class RowBuilder {
   public:
    RowBuilder& operator<<(const std::string& s);
    RowBuilder& operator<<(const char* s) { return *this << std::string(s); }
    RowBuilder& operator<<(double v) { return *this << format_double(v); }
    RowBuilder& operator<<(std::uint64_t v) { return *this << std::to_string(v); }
    RowBuilder& operator<<(std::int64_t v) { return *this << std::to_string(v); }
    RowBuilder& operator<<(int v) { return *this << std::to_string(v); }
    RowBuilder& operator<<(unsigned v) { return *this << std::to_string(v); }
    RowBuilder& operator<<(bool v) { return *this << std::string(v ? "1" : "0"); }

   private:
    friend class CsvTable;
    explicit RowBuilder(std::vector<std::string>& row) : row_(&row) {}
    std::vector<std::string>* row_;
  };

  RowBuilder add_row();

  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }
  /// Index of a header column, or -1.
  int column(const std::string& name) const;
  double number(std::size_t row, int col) const;

  std::string str() const;
  void write(const std::string& path) const;
  static CsvTable parse(const std::string& text);
  static CsvTable read(const std::string& path);

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace evd

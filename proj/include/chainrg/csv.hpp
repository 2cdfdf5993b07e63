#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace chainrg {

// Shortest round-trip decimal form of a double ("%.17g").
std::string csv_number(double v);
std::string csv_number(long long v);

// RFC-4180 table: fields quoted only when needed, CRLF row terminators.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  void add_row(std::vector<std::string> row);
  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }

  void write(std::ostream& os) const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

std::string csv_escape(const std::string& field);

}  // namespace chainrg

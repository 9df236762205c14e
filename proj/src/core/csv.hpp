#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace revclt::report {

/// A malformed input file; line and column are 1-based.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string file, std::size_t line, std::size_t column, const std::string& what);
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SchemaError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An empty cell is written as an empty field.
using Cell = std::variant<std::monostate, double, std::int64_t, std::uint64_t, bool, std::string>;
using Row = std::map<std::string, Cell, std::less<>>;

/// Shortest round-trip-safe form at 17 significant digits, e.g. 1/3 ->
/// "0.33333333333333331".
std::string format_double(double v);

std::string format_cell(const Cell& c);

/// Writes header plus rows (LF endings, RFC-4180 quoting). Every row must
/// carry exactly the schema's columns; a mismatch throws SchemaError before
/// the file is touched.
void emit_csv(const std::vector<Row>& rows, const std::vector<std::string>& schema,
              const std::filesystem::path& path);

/// Parsed CSV contents; `lines[i]` is the 1-based source line of `rows[i]`.
/// Lines starting with '#' are collected into `comments` and skipped.
struct CsvTable {
  std::vector<std::string> comments;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> lines;
};

CsvTable read_csv(const std::filesystem::path& path);

/// Strict whole-string parses; false on malformed or trailing text.
bool parse_double(std::string_view text, double& out);
bool parse_uint(std::string_view text, std::uint64_t& out);

}  // namespace revclt::report

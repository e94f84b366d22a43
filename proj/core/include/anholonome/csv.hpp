#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace anholonome {

/// Shortest text that reads back to the same double.
std::string format_double(double value);

/// Comma-separated output with `# key=value` metadata lines ahead of the header.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void comment(std::string_view key, std::string_view value);
  void header(const std::vector<std::string>& columns);
  void row(const std::vector<double>& values);
  void row(const std::vector<std::string>& cells);

 private:
  std::ostream& out_;
  std::size_t columns_ = 0;
};

struct CsvTable {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a column; throws ConfigError when absent.
  std::size_t column(std::string_view name) const;
  double number(std::size_t row, std::string_view name) const;
  /// Last value recorded for a metadata key.
  std::optional<std::string> meta(std::string_view key) const;
};

/// Parses what CsvWriter produces. Comment lines without '=' are kept with an
/// empty value.
CsvTable read_csv(std::istream& in);

}  // namespace anholonome

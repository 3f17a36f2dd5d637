#pragma once

#include <initializer_list>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace pmelab {

/// Minimal RFC-4180 writer with LF line endings. Fields are quoted only
/// when they contain a comma, quote or line break, reals printed with 17
/// significant digits.
class CsvWriter {
 public:
  using Cell = std::variant<double, long long, bool, std::string>;

  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void header(std::initializer_list<std::string_view> names);
  void row(const std::vector<Cell>& cells);

 private:
  std::ostream& out_;
};

/// "%.17g" formatting shared by every textual output.
std::string format_real(double value);
std::string csv_escape(std::string_view field);

}  // namespace pmelab

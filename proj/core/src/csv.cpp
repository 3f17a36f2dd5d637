#include "pmelab/csv.hpp"

#include <cstdio>
#include <ostream>

namespace pmelab {

std::string format_real(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void CsvWriter::header(std::initializer_list<std::string_view> names) {
  bool first = true;
  for (auto n : names) {
    if (!first) out_ << ',';
    out_ << csv_escape(n);
    first = false;
  }
  out_ << '\n';
}

void CsvWriter::row(const std::vector<Cell>& cells) {
  bool first = true;
  for (const auto& cell : cells) {
    if (!first) out_ << ',';
    first = false;
    if (const auto* d = std::get_if<double>(&cell))
      out_ << format_real(*d);
    else if (const auto* i = std::get_if<long long>(&cell))
      out_ << *i;
    else if (const auto* b = std::get_if<bool>(&cell))
      out_ << (*b ? "true" : "false");
    else
      out_ << csv_escape(std::get<std::string>(cell));
  }
  out_ << '\n';
}

}  // namespace pmelab

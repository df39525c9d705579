#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gkp::csv {

// A header plus rows of raw string cells. RFC 4180 quoting on both sides.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::optional<std::size_t> column(std::string_view name) const;
  std::size_t require_column(std::string_view name) const;
};

Table read(std::istream& in);
Table read_file(const std::string& path);
void write(std::ostream& out, const Table& table);
void write_file(const std::string& path, const Table& table);

std::vector<std::string> split_line(std::string_view line);
std::string quote(std::string_view cell);

// Shortest round-trip representation; empty for NaN.
std::string format_double(double v);

}  // namespace gkp::csv

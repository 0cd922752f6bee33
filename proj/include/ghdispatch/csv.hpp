#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ghdispatch::csv {

/// Shortest decimal representation that parses back to the same double.
std::string format_number(double value);

std::optional<double> parse_number(std::string_view text);

std::string_view trim(std::string_view text);

std::vector<std::string_view> split(std::string_view line, char delimiter);

/// Splits text into lines, dropping a trailing '\r' from each.
std::vector<std::string_view> lines(std::string_view text);

/// Joins fields with ',' and terminates the row with '\n'.
std::string row(const std::vector<std::string>& fields);

} // namespace ghdispatch::csv

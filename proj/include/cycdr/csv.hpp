#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace cycdr {

// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

double parse_double(std::string_view text, const std::string& context);
std::uint64_t parse_uint(std::string_view text, const std::string& context);
std::int64_t parse_int(std::string_view text, const std::string& context);

// Plain comma split; fields in this project never contain commas or quotes.
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace cycdr

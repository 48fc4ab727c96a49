#include "cycdr/csv.hpp"

#include <charconv>
#include <system_error>

#include "cycdr/errors.hpp"

namespace cycdr {

std::string format_double(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

namespace {

template <class T>
T parse_number(std::string_view text, const std::string& context) {
  T value{};
  const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  if (result.ec != std::errc{} || result.ptr != text.data() + text.size())
    throw ParseError(context + ": cannot parse number from '" + std::string(text) + "'");
  return value;
}

}  // namespace

double parse_double(std::string_view text, const std::string& context) {
  return parse_number<double>(text, context);
}

std::uint64_t parse_uint(std::string_view text, const std::string& context) {
  return parse_number<std::uint64_t>(text, context);
}

std::int64_t parse_int(std::string_view text, const std::string& context) {
  return parse_number<std::int64_t>(text, context);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

}  // namespace cycdr

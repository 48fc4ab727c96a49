#pragma once

#include <stdexcept>
#include <string>

namespace cycdr {

// Malformed or inconsistent data in a file (problem, plan, records). The
// message names the offending field or line.
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Filesystem-level failure, with the path in the message.
struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cycdr

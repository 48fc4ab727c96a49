#pragma once

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "cycdr/csv.hpp"

// Helpers for tests that drive the built CLI binary (path in CYCDR_BIN).

namespace cycdr::test {

namespace fs = std::filesystem;

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

inline std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

struct Workdir {
  fs::path dir;
  explicit Workdir(const std::string& tag) {
    dir = fs::temp_directory_path() / ("cycdr_" + tag + "_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~Workdir() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  fs::path operator/(const std::string& name) const { return dir / name; }
};

inline CliResult run_cli(const Workdir& wd, const std::string& binary, const std::string& args) {
  const fs::path out = wd / "stdout.txt";
  const fs::path err = wd / "stderr.txt";
  const std::string command =
      binary + " " + args + " > '" + out.string() + "' 2> '" + err.string() + "'";
  const int status = std::system(command.c_str());
  CliResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = slurp(out);
  result.err = slurp(err);
  return result;
}

// Drops one named column from a CSV string, header included.
inline std::string strip_column(const std::string& csv, const std::string& column) {
  std::stringstream in(csv);
  std::string line;
  std::string result;
  std::size_t drop = std::string::npos;
  bool first = true;
  while (std::getline(in, line)) {
    const auto fields = split_csv_line(line);
    if (first) {
      for (std::size_t i = 0; i < fields.size(); ++i)
        if (fields[i] == column) drop = i;
      first = false;
    }
    for (std::size_t i = 0, emitted = 0; i < fields.size(); ++i) {
      if (i == drop) continue;
      result += (emitted++ ? "," : "") + fields[i];
    }
    result += '\n';
  }
  return result;
}

}  // namespace cycdr::test

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>

#include "cfoed/errors.hpp"

namespace cfoed::csv {

/// Shortest representation that round-trips a double exactly.
inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string num(int v) { return std::to_string(v); }
inline std::string num(long v) { return std::to_string(v); }

class Writer {
 public:
  Writer(const std::filesystem::path& path,
         std::initializer_list<const char*> header)
      : out_(path) {
    if (!out_) throw error("cannot open CSV file for writing: " + path.string());
    bool first = true;
    for (const char* h : header) {
      if (!first) out_ << ',';
      out_ << h;
      first = false;
    }
    out_ << '\n';
  }

  void row(std::initializer_list<std::string> fields) {
    bool first = true;
    for (const auto& f : fields) {
      if (!first) out_ << ',';
      out_ << f;
      first = false;
    }
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

}  // namespace cfoed::csv

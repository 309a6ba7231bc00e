// io.hpp — delimited text tables and key-value documents.
//
// All numeric output funnels through format_double so identical runs emit
// byte-identical files.

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace bhsim::io {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.15g", v);
  return buf;
}

// Tab-separated table with a one-line header.
class TableWriter {
 public:
  TableWriter(const std::filesystem::path& path, const std::vector<std::string>& columns) : out_(path) {
    if (!out_) throw std::runtime_error("TableWriter: cannot open " + path.string());
    for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "\t" : "") << columns[i];
    out_ << "\n";
  }

  void row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "\t" : "") << format_double(values[i]);
    out_ << "\n";
  }

  void row_mixed(const std::vector<std::string>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "\t" : "") << values[i];
    out_ << "\n";
  }

 private:
  std::ofstream out_;
};

class KeyValueWriter {
 public:
  explicit KeyValueWriter(const std::filesystem::path& path) : out_(path) {
    if (!out_) throw std::runtime_error("KeyValueWriter: cannot open " + path.string());
  }

  void entry(const std::string& key, const std::string& value) { out_ << key << " = " << value << "\n"; }
  void entry(const std::string& key, double value) { entry(key, format_double(value)); }
  void entry(const std::string& key, int value) { entry(key, std::to_string(value)); }
  void blank() { out_ << "\n"; }
  void line(const std::string& text) { out_ << text << "\n"; }

 private:
  std::ofstream out_;
};

}  // namespace bhsim::io

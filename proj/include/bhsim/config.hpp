// config.hpp — sectioned key-value run configuration.
//
// Grammar (line oriented):
//   [section]          sections; keys before any section live in ""
//   key = value        whitespace-trimmed; values may be comma lists
//   # or ; comment     full-line or trailing
//
// Parse and lookup failures throw ConfigError with a line reference where
// one exists.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bhsim::cli {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg, int line = 0) : std::runtime_error(msg), line_number(line) {}
  int line_number;
};

class Config {
 public:
  static Config parse(const std::string& text);
  static Config load(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;
  bool has_section(const std::string& section) const;

  std::string get_string(const std::string& section, const std::string& key) const;
  std::string get_string_or(const std::string& section, const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key) const;
  double get_double_or(const std::string& section, const std::string& key, double fallback) const;
  int get_int(const std::string& section, const std::string& key) const;
  int get_int_or(const std::string& section, const std::string& key, int fallback) const;
  bool get_bool_or(const std::string& section, const std::string& key, bool fallback) const;
  std::uint64_t get_u64_or(const std::string& section, const std::string& key, std::uint64_t fallback) const;
  std::vector<double> get_double_list(const std::string& section, const std::string& key) const;

  const std::string& raw_text() const { return raw_; }

  // Structural equality of the parsed key-value content.
  friend bool operator==(const Config& a, const Config& b) { return a.sections_ == b.sections_; }

 private:
  struct Entry {
    std::string value;
    int line;
    // line numbers are diagnostics, not content
    friend bool operator==(const Entry& a, const Entry& b) { return a.value == b.value; }
  };
  std::map<std::string, std::map<std::string, Entry>> sections_;
  std::string raw_;

  const Entry& lookup(const std::string& section, const std::string& key) const;
};

enum class Experiment { walk, radiation, entangle, continuum, device, sweep };

Experiment experiment_from_name(const std::string& name);
const char* experiment_name(Experiment e);

}  // namespace bhsim::cli

#include "bhsim/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace bhsim::cli {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::string strip_comment(const std::string& s) {
  const auto pos = s.find_first_of("#;");
  return pos == std::string::npos ? s : s.substr(0, pos);
}

}  // namespace

Config Config::parse(const std::string& text) {
  Config cfg;
  cfg.raw_ = text;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string body = trim(strip_comment(line));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') throw ConfigError("unterminated section header", line_no);
      section = trim(body.substr(1, body.size() - 2));
      if (section.empty()) throw ConfigError("empty section name", line_no);
      cfg.sections_[section];
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line_no);
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key", line_no);
    auto& sec = cfg.sections_[section];
    if (sec.count(key)) throw ConfigError("duplicate key '" + key + "' in section [" + section + "]", line_no);
    sec[key] = Entry{value, line_no};
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

bool Config::has(const std::string& section, const std::string& key) const {
  const auto sit = sections_.find(section);
  return sit != sections_.end() && sit->second.count(key) != 0;
}

bool Config::has_section(const std::string& section) const { return sections_.count(section) != 0; }

const Config::Entry& Config::lookup(const std::string& section, const std::string& key) const {
  const auto sit = sections_.find(section);
  if (sit == sections_.end()) throw ConfigError("missing section [" + section + "]");
  const auto kit = sit->second.find(key);
  if (kit == sit->second.end()) throw ConfigError("missing key '" + key + "' in section [" + section + "]");
  return kit->second;
}

std::string Config::get_string(const std::string& section, const std::string& key) const {
  return lookup(section, key).value;
}

std::string Config::get_string_or(const std::string& section, const std::string& key,
                                  const std::string& fallback) const {
  return has(section, key) ? get_string(section, key) : fallback;
}

double Config::get_double(const std::string& section, const std::string& key) const {
  const auto& e = lookup(section, key);
  try {
    std::size_t used = 0;
    const double v = std::stod(e.value, &used);
    if (used != e.value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "' in [" + section + "] is not a number: '" + e.value + "'", e.line);
  }
}

double Config::get_double_or(const std::string& section, const std::string& key, double fallback) const {
  return has(section, key) ? get_double(section, key) : fallback;
}

int Config::get_int(const std::string& section, const std::string& key) const {
  const auto& e = lookup(section, key);
  try {
    std::size_t used = 0;
    const int v = std::stoi(e.value, &used);
    if (used != e.value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "' in [" + section + "] is not an integer: '" + e.value + "'", e.line);
  }
}

int Config::get_int_or(const std::string& section, const std::string& key, int fallback) const {
  return has(section, key) ? get_int(section, key) : fallback;
}

bool Config::get_bool_or(const std::string& section, const std::string& key, bool fallback) const {
  if (!has(section, key)) return fallback;
  const auto& e = lookup(section, key);
  std::string v = e.value;
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("key '" + key + "' in [" + section + "] is not a boolean: '" + e.value + "'", e.line);
}

std::uint64_t Config::get_u64_or(const std::string& section, const std::string& key, std::uint64_t fallback) const {
  if (!has(section, key)) return fallback;
  const auto& e = lookup(section, key);
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(e.value, &used);
    if (used != e.value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "' in [" + section + "] is not an unsigned integer: '" + e.value + "'", e.line);
  }
}

std::vector<double> Config::get_double_list(const std::string& section, const std::string& key) const {
  const auto& e = lookup(section, key);
  std::vector<double> out;
  std::istringstream ss(e.value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string t = trim(item);
    if (t.empty()) throw ConfigError("empty list element for key '" + key + "' in [" + section + "]", e.line);
    try {
      std::size_t used = 0;
      out.push_back(std::stod(t, &used));
      if (used != t.size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw ConfigError("list element '" + t + "' for key '" + key + "' in [" + section + "] is not a number", e.line);
    }
  }
  if (out.empty()) throw ConfigError("empty list for key '" + key + "' in [" + section + "]", e.line);
  return out;
}

Experiment experiment_from_name(const std::string& name) {
  if (name == "walk") return Experiment::walk;
  if (name == "radiation") return Experiment::radiation;
  if (name == "entangle") return Experiment::entangle;
  if (name == "continuum") return Experiment::continuum;
  if (name == "device") return Experiment::device;
  if (name == "sweep") return Experiment::sweep;
  throw ConfigError("unknown experiment kind: '" + name + "'");
}

const char* experiment_name(Experiment e) {
  switch (e) {
    case Experiment::walk: return "walk";
    case Experiment::radiation: return "radiation";
    case Experiment::entangle: return "entangle";
    case Experiment::continuum: return "continuum";
    case Experiment::device: return "device";
    default: return "sweep";
  }
}

}  // namespace bhsim::cli

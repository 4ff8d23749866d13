#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cpgc/csv.hpp"

namespace cpgc {

class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// Flat key = value configuration with typed accessors. Keys must be
// declared up front so typos in files or --set overrides fail loudly.
class Config {
 public:
  void declare(const std::string& key, const std::string& default_value) {
    known_.insert(key);
    values_[key] = default_value;
  }

  void set(const std::string& key, const std::string& value) {
    if (!known_.count(key)) {
      std::string keys;
      for (const auto& k : known_) keys += (keys.empty() ? "" : ", ") + k;
      throw config_error("unknown config key '" + key + "' (known keys: " + keys + ")");
    }
    values_[key] = value;
  }

  // Parses "key = value" lines; '#' starts a comment. The reserved
  // "subcommand" key written into manifests is accepted and ignored.
  void load_file(const std::string& path) {
    std::istringstream in(read_file(path));
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const std::string trimmed = trim(line);
      if (trimmed.empty()) continue;
      const auto eq = trimmed.find('=');
      if (eq == std::string::npos)
        throw config_error(path + ":" + std::to_string(lineno) +
                           ": expected 'key = value', got '" + trimmed + "'");
      const std::string key = trim(trimmed.substr(0, eq));
      const std::string value = trim(trimmed.substr(eq + 1));
      if (key == "subcommand") continue;
      set(key, value);
    }
  }

  // "key=value" as passed to --set.
  void apply_override(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
      throw config_error("override '" + assignment + "' is not of the form key=value");
    set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
  }

  const std::string& get_string(const std::string& key) const { return raw(key); }

  long long get_int(const std::string& key) const {
    const std::string& v = raw(key);
    try {
      std::size_t pos = 0;
      const long long out = std::stoll(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return out;
    } catch (const std::exception&) {
      throw config_error("config key '" + key + "' expects an integer, got '" + v + "'");
    }
  }

  double get_double(const std::string& key) const {
    const std::string& v = raw(key);
    try {
      std::size_t pos = 0;
      const double out = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return out;
    } catch (const std::exception&) {
      throw config_error("config key '" + key + "' expects a number, got '" + v + "'");
    }
  }

  std::vector<double> get_double_list(const std::string& key) const {
    std::vector<double> out;
    for (const std::string& item : split(raw(key))) {
      try {
        std::size_t pos = 0;
        out.push_back(std::stod(item, &pos));
        if (pos != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw config_error("config key '" + key + "' expects comma-separated numbers, got '" +
                           raw(key) + "'");
      }
    }
    if (out.empty())
      throw config_error("config key '" + key + "' expects a nonempty list of numbers");
    return out;
  }

  std::vector<std::string> get_string_list(const std::string& key) const {
    auto items = split(raw(key));
    if (items.empty()) throw config_error("config key '" + key + "' expects a nonempty list");
    return items;
  }

  // Fully resolved configuration, one sorted "key = value" line each;
  // feeding the manifest back through --config reproduces the run.
  std::string manifest(const std::string& subcommand) const {
    std::ostringstream os;
    os << "subcommand = " << subcommand << "\n";
    for (const auto& [k, v] : values_) os << k << " = " << v << "\n";
    return os.str();
  }

 private:
  const std::string& raw(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end())
      throw config_error("missing config key '" + key + "'");
    return it->second;
  }

  static std::string trim(const std::string& s) {
    auto b = s.begin(), e = s.end();
    while (b != e && std::isspace(static_cast<unsigned char>(*b))) ++b;
    while (e != b && std::isspace(static_cast<unsigned char>(*(e - 1)))) --e;
    return std::string(b, e);
  }

  static std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
      item = trim(item);
      if (!item.empty()) out.push_back(item);
    }
    return out;
  }

  std::set<std::string> known_;
  std::map<std::string, std::string> values_;
};

}  // namespace cpgc

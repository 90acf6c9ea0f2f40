#pragma once

// Flat key-value configuration files:
//
//   # comment
//   key = value
//
// Keys are unique; values are trimmed. Consumers take() the keys they understand and
// the caller rejects whatever is left over.

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ponder/errors.hpp"

namespace ponder {

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline double parse_double(std::string_view text, const std::string& key) {
  text = trim(text);
  // std::from_chars for double is available in libstdc++ 11.
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
    throw ConfigError("key '" + key + "': not a finite number: '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace detail

class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  static KeyValueConfig parse(std::istream& in) {
    KeyValueConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      std::string_view view = line;
      if (const auto hash = view.find('#'); hash != std::string_view::npos) {
        view = view.substr(0, hash);
      }
      view = detail::trim(view);
      if (view.empty()) continue;
      const auto eq = view.find('=');
      if (eq == std::string_view::npos) {
        throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
      }
      std::string key(detail::trim(view.substr(0, eq)));
      std::string value(detail::trim(view.substr(eq + 1)));
      if (key.empty()) {
        throw ConfigError("line " + std::to_string(lineno) + ": empty key");
      }
      if (!cfg.entries_.emplace(key, value).second) {
        throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
      }
    }
    return cfg;
  }

  static KeyValueConfig parse_string(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
  }

  static KeyValueConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse(in);
  }

  void set(const std::string& key, const std::string& value) { entries_[key] = value; }

  std::optional<std::string> take(const std::string& key) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    std::string value = std::move(it->second);
    entries_.erase(it);
    return value;
  }

  void take_double(const std::string& key, double& target) {
    if (auto v = take(key)) target = detail::parse_double(*v, key);
  }

  void take_int(const std::string& key, int& target) {
    if (auto v = take(key)) {
      const double d = detail::parse_double(*v, key);
      if (d != std::floor(d) || std::abs(d) > 2e9) {
        throw ConfigError("key '" + key + "': expected an integer");
      }
      target = static_cast<int>(d);
    }
  }

  void take_bool(const std::string& key, bool& target) {
    if (auto v = take(key)) {
      if (*v == "true" || *v == "1" || *v == "yes") {
        target = true;
      } else if (*v == "false" || *v == "0" || *v == "no") {
        target = false;
      } else {
        throw ConfigError("key '" + key + "': expected true/false");
      }
    }
  }

  /// Comma- or whitespace-separated list of numbers.
  void take_double_list(const std::string& key, std::vector<double>& target) {
    if (auto v = take(key)) {
      std::vector<double> out;
      std::string item;
      for (char c : *v + ",") {
        if (c == ',' || c == ' ' || c == '\t') {
          if (!detail::trim(item).empty()) out.push_back(detail::parse_double(item, key));
          item.clear();
        } else {
          item.push_back(c);
        }
      }
      if (out.empty()) throw ConfigError("key '" + key + "': empty list");
      target = std::move(out);
    }
  }

  /// Throws if any key was not consumed.
  void reject_unknown() const {
    if (entries_.empty()) return;
    std::string keys;
    for (const auto& [k, v] : entries_) keys += (keys.empty() ? "" : ", ") + k;
    throw ConfigError("unknown configuration key(s): " + keys);
  }

  bool empty() const noexcept { return entries_.empty(); }

 private:
  std::map<std::string, std::string> entries_;
};

}  // namespace ponder

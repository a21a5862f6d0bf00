#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace cloak {

/// Flat `section.key = value` configuration. Lines starting with '#' and blank lines are ignored.
class Config {
 public:
  static Config parse(const std::string& text);
  static Config load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::uint64_t get_uint64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  /// Keys that were never read through a getter (typo detection).
  std::vector<std::string> unused_keys() const;

  /// Canonical text: sorted `key = value` lines.
  std::string canonical() const;

 private:
  std::map<std::string, std::string> values_;
  mutable std::map<std::string, bool> used_;
};

/// 64-bit FNV-1a hash, rendered as 16 hex digits.
std::string fnv1a_hex(const std::string& data);

}  // namespace cloak

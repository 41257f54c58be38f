#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace oy {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat key = value text with [section] headers. Keys are addressed as
/// "section.key"; keys before any header live in the root ("key").
/// '#' starts a comment. Numbers accept the form 2^-8.
class Config {
 public:
  static Config parse(std::istream& in, const std::string& source = "<config>");
  static Config parse_string(const std::string& text, const std::string& source = "<config>");
  static Config load(const std::string& path);

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  void set(const std::string& key, const std::string& value);

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key) const;
  long long get_int(const std::string& key, long long fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& key) const;
  std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;
  std::vector<int> get_ints(const std::string& key) const;
  std::vector<int> get_ints(const std::string& key, const std::vector<int>& fallback) const;

  /// Throws naming the first key outside `known` (exact keys or "section.*").
  void require_known(const std::vector<std::string>& known) const;

  /// "where: field 'key'" prefix for validation messages.
  std::string locate(const std::string& key) const;

  const std::string& source() const { return source_; }
  /// key -> raw value, sorted.
  std::map<std::string, std::string> echo() const;

 private:
  struct Entry {
    std::string value;
    int line = 0;
  };
  std::string source_;
  std::map<std::string, Entry> entries_;

  const Entry& find(const std::string& key) const;
  double to_double(const std::string& key, const std::string& text) const;
};

}  // namespace oy

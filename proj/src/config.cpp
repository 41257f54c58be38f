#include "oy/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace oy {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

bool parse_plain(const std::string& text, double& out) {
  std::size_t used = 0;
  try {
    out = std::stod(text, &used);
  } catch (const std::exception&) {
    return false;
  }
  return used == text.size();
}

}  // namespace

Config Config::parse(std::istream& in, const std::string& source) {
  Config cfg;
  cfg.source_ = source;
  std::string line, section;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        throw ConfigError(source + ":" + std::to_string(number) + ": malformed section header '" + line + "'");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(source + ":" + std::to_string(number) + ": expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(source + ":" + std::to_string(number) + ": empty key");
    const std::string full = section.empty() ? key : section + "." + key;
    if (cfg.entries_.count(full))
      throw ConfigError(source + ":" + std::to_string(number) + ": field '" + full + "' repeats line " +
                        std::to_string(cfg.entries_[full].line));
    cfg.entries_[full] = {trim(line.substr(eq + 1)), number};
  }
  return cfg;
}

Config Config::parse_string(const std::string& text, const std::string& source) {
  std::istringstream is(text);
  return parse(is, source);
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse(in, path);
}

void Config::set(const std::string& key, const std::string& value) { entries_[key] = {value, 0}; }

const Config::Entry& Config::find(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError(source_ + ": missing required field '" + key + "'");
  return it->second;
}

std::string Config::locate(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end() || it->second.line == 0) return source_ + ": field '" + key + "'";
  return source_ + ":" + std::to_string(it->second.line) + ": field '" + key + "'";
}

double Config::to_double(const std::string& key, const std::string& text) const {
  double v = 0.0;
  if (parse_plain(text, v)) return v;
  const auto caret = text.find('^');
  if (caret != std::string::npos) {
    double base = 0.0, power = 0.0;
    if (parse_plain(trim(text.substr(0, caret)), base) && parse_plain(trim(text.substr(caret + 1)), power))
      return std::pow(base, power);
  }
  if (text == "inf") return INFINITY;
  throw ConfigError(locate(key) + ": '" + text + "' is not a number");
}

std::string Config::get_string(const std::string& key) const { return find(key).value; }

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  return has(key) ? get_string(key) : fallback;
}

double Config::get_double(const std::string& key) const { return to_double(key, find(key).value); }

double Config::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

long long Config::get_int(const std::string& key) const {
  const double v = get_double(key);
  if (v != std::floor(v) || std::abs(v) > 9e15) throw ConfigError(locate(key) + ": expected an integer");
  return static_cast<long long>(v);
}

long long Config::get_int(const std::string& key, long long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  const std::string& text = find(key).value;
  std::size_t used = 0;
  try {
    const auto v = std::stoull(text, &used, 0);
    if (used == text.size() && text.front() != '-') return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(locate(key) + ": '" + text + "' is not an unsigned integer");
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string& v = find(key).value;
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(locate(key) + ": expected true or false");
}

std::vector<double> Config::get_doubles(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : split_list(find(key).value)) out.push_back(to_double(key, item));
  if (out.empty()) throw ConfigError(locate(key) + ": empty list");
  return out;
}

std::vector<double> Config::get_doubles(const std::string& key, const std::vector<double>& fallback) const {
  return has(key) ? get_doubles(key) : fallback;
}

std::vector<int> Config::get_ints(const std::string& key) const {
  std::vector<int> out;
  for (double v : get_doubles(key)) {
    if (v != std::floor(v)) throw ConfigError(locate(key) + ": expected integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

std::vector<int> Config::get_ints(const std::string& key, const std::vector<int>& fallback) const {
  return has(key) ? get_ints(key) : fallback;
}

void Config::require_known(const std::vector<std::string>& known) const {
  for (const auto& [key, entry] : entries_) {
    bool ok = false;
    for (const auto& k : known) {
      if (k == key) ok = true;
      if (k.size() > 2 && k.ends_with(".*") && key.starts_with(k.substr(0, k.size() - 1))) ok = true;
    }
    if (!ok) throw ConfigError(locate(key) + ": unknown field");
  }
}

std::map<std::string, std::string> Config::echo() const {
  std::map<std::string, std::string> out;
  for (const auto& [k, e] : entries_) out[k] = e.value;
  return out;
}

}  // namespace oy

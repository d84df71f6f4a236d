#pragma once

// Flat key=value configuration files: one `key = value` per line, '#'
// comments and blank lines ignored, surrounding whitespace trimmed.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace tidagcn {

class KeyValues {
 public:
  // Throws ConfigError (with line number) on malformed lines or repeated keys.
  static KeyValues parse(std::istream& in, const std::string& source = "config");
  static KeyValues parse_file(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, const std::string& value);

  // Typed reads; each marks the key as used. Throws ConfigError naming the key
  // for unparsable values.
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  // Throws ConfigError listing every key never read.
  void require_all_used() const;

  const std::vector<std::string>& keys() const { return order_; }
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  const std::string* lookup(const std::string& key) const;

  std::string source_ = "config";
  std::map<std::string, std::string> values_;
  std::vector<std::string> order_;
  mutable std::set<std::string> used_;
};

// Shortest round-trippable decimal form of a double.
std::string format_double(double v);

}  // namespace tidagcn

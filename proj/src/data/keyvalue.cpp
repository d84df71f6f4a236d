#include "tidagcn/data/keyvalue.hpp"

#include <charconv>
#include <fstream>
#include <istream>

#include "tidagcn/numeric/errors.hpp"

namespace tidagcn {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T convert(const std::string& text, const std::string& key, const std::string& source,
          const char* kind) {
  T value{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw ConfigError(source + ": key '" + key + "' expects " + kind + ", got '" + text + "'");
  }
  return value;
}

}  // namespace

KeyValues KeyValues::parse(std::istream& in, const std::string& source) {
  KeyValues kv;
  kv.source_ = source;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string text = trim(raw);
    if (text.empty() || text[0] == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source + ": line " + std::to_string(line) + ": expected key = value");
    }
    const std::string key = trim(text.substr(0, eq));
    if (key.empty()) throw ConfigError(source + ": line " + std::to_string(line) + ": empty key");
    if (kv.has(key)) {
      throw ConfigError(source + ": line " + std::to_string(line) + ": repeated key '" + key + "'");
    }
    kv.set(key, trim(text.substr(eq + 1)));
  }
  return kv;
}

KeyValues KeyValues::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse(in, path);
}

void KeyValues::set(const std::string& key, const std::string& value) {
  if (!has(key)) order_.push_back(key);
  values_[key] = value;
}

const std::string* KeyValues::lookup(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return nullptr;
  used_.insert(key);
  return &it->second;
}

std::string KeyValues::get_string(const std::string& key, const std::string& fallback) const {
  const auto* v = lookup(key);
  return v ? *v : fallback;
}

double KeyValues::get_double(const std::string& key, double fallback) const {
  const auto* v = lookup(key);
  return v ? convert<double>(*v, key, source_, "a number") : fallback;
}

std::uint64_t KeyValues::get_uint(const std::string& key, std::uint64_t fallback) const {
  const auto* v = lookup(key);
  return v ? convert<std::uint64_t>(*v, key, source_, "a non-negative integer") : fallback;
}

std::int64_t KeyValues::get_int(const std::string& key, std::int64_t fallback) const {
  const auto* v = lookup(key);
  return v ? convert<std::int64_t>(*v, key, source_, "an integer") : fallback;
}

bool KeyValues::get_bool(const std::string& key, bool fallback) const {
  const auto* v = lookup(key);
  if (!v) return fallback;
  if (*v == "1" || *v == "true") return true;
  if (*v == "0" || *v == "false") return false;
  throw ConfigError(source_ + ": key '" + key + "' expects true/false/1/0, got '" + *v + "'");
}

void KeyValues::require_all_used() const {
  std::string unknown;
  for (const auto& k : order_) {
    if (!used_.count(k)) unknown += (unknown.empty() ? "" : ", ") + k;
  }
  if (!unknown.empty()) throw ConfigError(source_ + ": unknown key(s): " + unknown);
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace tidagcn

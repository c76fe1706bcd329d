#include "ttlab/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "ttlab/errors.hpp"

namespace ttlab::cfg {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

ConfigMap ConfigMap::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("config: cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_text(buffer.str(), path);
}

ConfigMap ConfigMap::parse_text(const std::string& text, const std::string& origin) {
  ConfigMap map;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw FormatError("config: " + origin + ":" + std::to_string(line_no) +
                        ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw FormatError("config: " + origin + ":" + std::to_string(line_no) + ": empty key");
    map.entries_[key] = value;
  }
  return map;
}

void ConfigMap::set(const std::string& key, const std::string& value) {
  entries_[trim(key)] = trim(value);
}

std::optional<std::string> ConfigMap::take(const std::string& key) {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  std::string value = it->second;
  entries_.erase(it);
  return value;
}

std::string ConfigMap::take_string(const std::string& key, const std::string& fallback) {
  return take(key).value_or(fallback);
}

double ConfigMap::take_double(const std::string& key, double fallback) {
  const auto raw = take(key);
  if (!raw) return fallback;
  try {
    std::size_t used = 0;
    const double value = std::stod(*raw, &used);
    if (used != raw->size()) throw std::invalid_argument(*raw);
    return value;
  } catch (const std::exception&) {
    throw ContractError("config: key '" + key + "' has non-numeric value '" + *raw + "'");
  }
}

int ConfigMap::take_int(const std::string& key, int fallback) {
  return static_cast<int>(take_int64(key, fallback));
}

long long ConfigMap::take_int64(const std::string& key, long long fallback) {
  const auto raw = take(key);
  if (!raw) return fallback;
  try {
    std::size_t used = 0;
    const long long value = std::stoll(*raw, &used);
    if (used != raw->size()) throw std::invalid_argument(*raw);
    return value;
  } catch (const std::exception&) {
    throw ContractError("config: key '" + key + "' has non-integer value '" + *raw + "'");
  }
}

std::uint64_t ConfigMap::take_u64(const std::string& key, std::uint64_t fallback) {
  const auto raw = take(key);
  if (!raw) return fallback;
  try {
    std::size_t used = 0;
    const std::uint64_t value = std::stoull(*raw, &used);
    if (used != raw->size()) throw std::invalid_argument(*raw);
    return value;
  } catch (const std::exception&) {
    throw ContractError("config: key '" + key + "' has non-integer value '" + *raw + "'");
  }
}

bool ConfigMap::take_bool(const std::string& key, bool fallback) {
  const auto raw = take(key);
  if (!raw) return fallback;
  std::string v = *raw;
  std::transform(v.begin(), v.end(), v.begin(), ::tolower);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ContractError("config: key '" + key + "' has non-boolean value '" + *raw + "'");
}

std::vector<std::string> ConfigMap::remaining_keys() const {
  std::vector<std::string> keys;
  keys.reserve(entries_.size());
  for (const auto& [key, value] : entries_) keys.push_back(key);
  return keys;
}

void ConfigMap::require_all_consumed() const {
  if (!entries_.empty())
    throw ContractError("config: unknown key '" + entries_.begin()->first + "'");
}

}  // namespace ttlab::cfg

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ttlab::cfg {

// Nested key-value configuration: one `dotted.key = value` per line, '#'
// comments. Every read consumes its key so leftovers (typos, unknown keys)
// can be rejected by name.
class ConfigMap {
 public:
  ConfigMap() = default;

  static ConfigMap parse_file(const std::string& path);
  static ConfigMap parse_text(const std::string& text, const std::string& origin = "<text>");

  // Override/insert one key (used for --set key=value).
  void set(const std::string& key, const std::string& value);

  bool contains(const std::string& key) const { return entries_.count(key) > 0; }

  std::optional<std::string> take(const std::string& key);
  std::string take_string(const std::string& key, const std::string& fallback);
  double take_double(const std::string& key, double fallback);
  int take_int(const std::string& key, int fallback);
  long long take_int64(const std::string& key, long long fallback);
  std::uint64_t take_u64(const std::string& key, std::uint64_t fallback);
  bool take_bool(const std::string& key, bool fallback);

  std::vector<std::string> remaining_keys() const;

  // Throws ContractError naming the first unconsumed key.
  void require_all_consumed() const;

  // Full key/value view (manifest logging); does not consume.
  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

}  // namespace ttlab::cfg

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace ttlab {

inline constexpr const char* kVersionString = "ttlab 1.0.0";

// Run metadata written at start and finalized at end, enough to reproduce the
// run exactly (command, resolved config, seed, code version).
struct RunManifest {
  std::string run_id;
  std::string command;
  std::map<std::string, std::string> config;
  std::uint64_t seed = 0;
  std::string version = kVersionString;
  std::string started_at;
  std::string finished_at;
  std::string status = "running";
  std::vector<std::string> artifacts;

  // Atomic write (temp file + rename).
  void write(const std::string& path) const;
  static RunManifest read(const std::string& path);
};

std::string iso8601_now();
std::string make_run_id(const std::string& command, std::uint64_t seed);

}  // namespace ttlab

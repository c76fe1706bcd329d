#include "ttlab/manifest.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>

#include <json.hpp>

#include "ttlab/errors.hpp"

namespace ttlab {

using nlohmann::json;

std::string iso8601_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string make_run_id(const std::string& command, std::uint64_t seed) {
  const auto now = std::chrono::system_clock::now().time_since_epoch();
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now).count();
  return command + "-" + std::to_string(seed) + "-" + std::to_string(ms);
}

void RunManifest::write(const std::string& path) const {
  json doc;
  doc["run_id"] = run_id;
  doc["command"] = command;
  doc["config"] = config;
  doc["seed"] = seed;
  doc["version"] = version;
  doc["started_at"] = started_at;
  doc["finished_at"] = finished_at;
  doc["status"] = status;
  doc["artifacts"] = artifacts;

  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw FormatError("manifest: cannot open " + tmp);
    out << doc.dump(2) << '\n';
    if (!out) throw FormatError("manifest: write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw FormatError("manifest: rename to " + path + " failed");
}

RunManifest RunManifest::read(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("manifest: cannot open " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw FormatError("manifest: " + path + ": " + e.what());
  }
  RunManifest m;
  m.run_id = doc.value("run_id", "");
  m.command = doc.value("command", "");
  if (doc.contains("config"))
    m.config = doc["config"].get<std::map<std::string, std::string>>();
  m.seed = doc.value("seed", std::uint64_t{0});
  m.version = doc.value("version", "");
  m.started_at = doc.value("started_at", "");
  m.finished_at = doc.value("finished_at", "");
  m.status = doc.value("status", "");
  if (doc.contains("artifacts"))
    m.artifacts = doc["artifacts"].get<std::vector<std::string>>();
  return m;
}

}  // namespace ttlab

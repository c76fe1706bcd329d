#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ttlab/config.hpp"
#include "ttlab/errors.hpp"
#include "ttlab/eval.hpp"
#include "ttlab/manifest.hpp"
#include "ttlab/trace.hpp"

using namespace ttlab;

TEST_CASE("config files parse dotted keys, comments, and typed values") {
  const auto cfg = cfg::ConfigMap::parse_text(
      "# a comment\n"
      "ppo.lr = 3e-4\n"
      "ppo.total_env_steps = 2000000   # trailing comment\n"
      "env.mode = lttp-m\n"
      "env.constrained_starts = true\n");
  cfg::ConfigMap map = cfg;
  CHECK(map.take_double("ppo.lr", 0.0) == 3e-4);
  CHECK(map.take_int64("ppo.total_env_steps", 0) == 2000000);
  CHECK(map.take_string("env.mode", "") == "lttp-m");
  CHECK(map.take_bool("env.constrained_starts", false));
  CHECK_NOTHROW(map.require_all_consumed());
}

TEST_CASE("unknown keys are rejected by name") {
  cfg::ConfigMap map = cfg::ConfigMap::parse_text("ppo.typo_key = 5\n");
  try {
    map.require_all_consumed();
    FAIL("expected ContractError");
  } catch (const ContractError& e) {
    CHECK(std::string(e.what()).find("ppo.typo_key") != std::string::npos);
  }
}

TEST_CASE("overrides replace file values") {
  cfg::ConfigMap map = cfg::ConfigMap::parse_text("ppo.lr = 3e-4\n");
  map.set("ppo.lr", "1e-5");
  CHECK(map.take_double("ppo.lr", 0.0) == 1e-5);
}

TEST_CASE("malformed values and lines raise clear errors") {
  CHECK_THROWS_AS(cfg::ConfigMap::parse_text("just words\n"), FormatError);
  cfg::ConfigMap map = cfg::ConfigMap::parse_text("a.b = not_a_number\n");
  CHECK_THROWS_AS(map.take_double("a.b", 0.0), ContractError);
  cfg::ConfigMap map2 = cfg::ConfigMap::parse_text("a.b = maybe\n");
  CHECK_THROWS_AS(map2.take_bool("a.b", false), ContractError);
}

TEST_CASE("manifests round-trip through disk") {
  RunManifest m;
  m.run_id = "test-run-1";
  m.command = "train ppo";
  m.config = {{"ppo.lr", "0.0003"}, {"run.seed", "7"}};
  m.seed = 7;
  m.started_at = iso8601_now();
  m.status = "running";

  const std::string path =
      (std::filesystem::temp_directory_path() / "manifest_test.json").string();
  m.write(path);

  m.status = "completed";
  m.finished_at = iso8601_now();
  m.artifacts = {"checkpoint.bin", "curves.jsonl"};
  m.write(path);

  const RunManifest loaded = RunManifest::read(path);
  CHECK(loaded.run_id == m.run_id);
  CHECK(loaded.command == m.command);
  CHECK(loaded.config == m.config);
  CHECK(loaded.seed == 7);
  CHECK(loaded.status == "completed");
  CHECK(loaded.artifacts == m.artifacts);
  CHECK(loaded.version == std::string(kVersionString));
  std::filesystem::remove(path);
}

TEST_CASE("ascii rendering draws cells and the agent") {
  lttp::Env env(lttp::Config{}, 1);
  const std::string art = trace::render_ascii(env.state().grid, env.state().agent);
  std::istringstream lines(art);
  std::string line;
  int rows = 0;
  while (std::getline(lines, line)) {
    CHECK(line.size() == 6);
    ++rows;
  }
  CHECK(rows == 4);
  CHECK(art.find('L') != std::string::npos);
  CHECK(art.find('S') != std::string::npos);
  CHECK(art.find('G') != std::string::npos);
  CHECK(art.find('P') != std::string::npos);
  CHECK(art.find('R') != std::string::npos);
}

TEST_CASE("lttp traces replay with identical rewards") {
  lttp::Config cfg;
  cfg.mode = lttp::Mode::LttpM;
  cfg.schedule = lttp::Schedule::FindBow;

  const std::string path =
      (std::filesystem::temp_directory_path() / "trace_test.jsonl").string();
  {
    std::ofstream out(path);
    trace::write_lttp_trace(out, cfg, 99, 0, evalh::heuristic_policy());
  }
  const trace::ReplayResult result = trace::replay(path);
  CHECK(result.ok);
  CHECK(result.steps == 200);

  SUBCASE("tampered rewards are caught") {
    std::ifstream in(path);
    std::string all, line;
    std::getline(in, all);
    all += '\n';
    bool patched = false;
    while (std::getline(in, line)) {
      if (!patched && line.find("\"reward\":-0.005") != std::string::npos) {
        const auto at = line.find("\"reward\":-0.005");
        line.replace(at, 15, "\"reward\":-0.004");
        patched = true;
      }
      all += line + '\n';
    }
    REQUIRE(patched);
    std::ofstream out(path);
    out << all;
    out.close();
    const trace::ReplayResult bad = trace::replay(path);
    CHECK_FALSE(bad.ok);
  }
  std::filesystem::remove(path);
}

TEST_CASE("abssup traces replay and record the supervisor draw") {
  abssup::Config cfg;
  const std::string path =
      (std::filesystem::temp_directory_path() / "trace_abssup.jsonl").string();
  {
    std::ofstream out(path);
    SeededRng rng(3);
    trace::write_abssup_trace(out, cfg, 17, 0, [&rng](const abssup::Env&) {
      return static_cast<int>(rng.uniform_int(4));
    });
  }
  const trace::ReplayResult result = trace::replay(path);
  CHECK(result.ok);
  std::filesystem::remove(path);
}

TEST_CASE("replay rejects traces without a layout header") {
  const std::string path =
      (std::filesystem::temp_directory_path() / "trace_bad.jsonl").string();
  std::ofstream(path) << "{\"type\":\"step\"}\n";
  CHECK_THROWS_AS(trace::replay(path), FormatError);
  std::filesystem::remove(path);
}

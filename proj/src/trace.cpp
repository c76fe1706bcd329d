#include "ttlab/trace.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "ttlab/errors.hpp"

namespace ttlab::trace {

using nlohmann::json;

std::string render_ascii(const Grid& grid, Position agent) {
  std::string out;
  out.reserve(static_cast<std::size_t>((grid.width() + 1) * grid.height()));
  for (int row = 0; row < grid.height(); ++row) {
    for (int col = 0; col < grid.width(); ++col) {
      const Position p{col, row};
      out.push_back(p == agent ? 'L' : render_char(grid.at(p)));
    }
    out.push_back('\n');
  }
  return out;
}

namespace {

json lttp_config_to_json(const lttp::Config& c) {
  return json{{"mode", c.mode == lttp::Mode::LttpT ? "lttp-t" : "lttp-m"},
              {"schedule", c.schedule == lttp::Schedule::Clean      ? "clean"
                           : c.schedule == lttp::Schedule::Poisoned ? "poisoned"
                                                                    : "findbow"},
              {"horizon", c.horizon},
              {"p_elim", c.p_elim},
              {"bow_upgrade_step", c.bow_upgrade_step},
              {"heart", c.rewards.heart},
              {"step_cost", c.rewards.step_cost},
              {"miss_penalty", c.rewards.miss_penalty},
              {"illegal_wirehead", c.rewards.illegal_wirehead},
              {"elimination_bonus", c.rewards.poisoned_elimination_bonus},
              {"constrained_starts", c.constrained_starts}};
}

lttp::Config lttp_config_from_json(const json& j) {
  lttp::Config c;
  c.mode = j.at("mode") == "lttp-t" ? lttp::Mode::LttpT : lttp::Mode::LttpM;
  const std::string schedule = j.at("schedule");
  c.schedule = schedule == "clean"      ? lttp::Schedule::Clean
               : schedule == "poisoned" ? lttp::Schedule::Poisoned
                                        : lttp::Schedule::FindBow;
  c.horizon = j.at("horizon");
  c.p_elim = j.at("p_elim");
  c.bow_upgrade_step = j.at("bow_upgrade_step");
  c.rewards.heart = j.at("heart");
  c.rewards.step_cost = j.at("step_cost");
  c.rewards.miss_penalty = j.at("miss_penalty");
  c.rewards.illegal_wirehead = j.at("illegal_wirehead");
  c.rewards.poisoned_elimination_bonus = j.at("elimination_bonus");
  c.constrained_starts = j.at("constrained_starts");
  c.masked_rewards = false;
  return c;
}

json abssup_config_to_json(const abssup::Config& c) {
  json j{{"supervisor_probability", c.supervisor_probability},
         {"horizon", c.horizon},
         {"goal", c.rewards.goal},
         {"step", c.rewards.step},
         {"punishment", c.rewards.punishment}};
  if (c.forced_supervisor) j["forced_supervisor"] = *c.forced_supervisor;
  return j;
}

abssup::Config abssup_config_from_json(const json& j) {
  abssup::Config c;
  c.supervisor_probability = j.at("supervisor_probability");
  c.horizon = j.at("horizon");
  c.rewards.goal = j.at("goal");
  c.rewards.step = j.at("step");
  c.rewards.punishment = j.at("punishment");
  if (j.contains("forced_supervisor")) c.forced_supervisor = j["forced_supervisor"].get<bool>();
  return c;
}

json grid_to_json(const Grid& grid) {
  json rows = json::array();
  for (int row = 0; row < grid.height(); ++row) {
    json cols = json::array();
    for (int col = 0; col < grid.width(); ++col)
      cols.push_back(static_cast<int>(grid.at({col, row})));
    rows.push_back(cols);
  }
  return rows;
}

}  // namespace

TraceResult write_lttp_trace(std::ostream& out, const lttp::Config& config,
                             std::uint64_t seed, int episode_id,
                             const std::function<lttp::Action(const lttp::Env&)>& policy,
                             std::ostream* ascii) {
  lttp::Env env(config, seed);

  json header{{"type", "layout"},
              {"env", "lttp"},
              {"episode_id", episode_id},
              {"seed", seed},
              {"config", lttp_config_to_json(config)},
              {"grid", grid_to_json(env.state().grid)},
              {"agent", {env.state().agent.col, env.state().agent.row}},
              {"heart_spawn", {env.state().heart_spawn.col, env.state().heart_spawn.row}},
              {"rupee_spawn", {env.state().rupee_spawn.col, env.state().rupee_spawn.row}},
              {"bow", static_cast<int>(env.state().bow)}};
  out << header.dump() << '\n';

  TraceResult result;
  while (!env.done()) {
    const int step = env.state().step;
    const lttp::Action action = policy(env);
    const lttp::StepOutcome outcome = env.step(action);

    json events = json::array();
    for (const lttp::Event& ev : outcome.events) events.push_back(lttp::to_string(ev.kind));
    json record{{"episode_id", episode_id},
                {"step", step},
                {"action", static_cast<int>(action)},
                {"reward", outcome.reward},
                {"events", events},
                {"agent", {env.state().agent.col, env.state().agent.row}},
                {"bow", static_cast<int>(env.state().bow)},
                {"s_alive", env.state().s_alive}};
    out << record.dump() << '\n';

    if (ascii) {
      *ascii << "step " << step << " action " << static_cast<int>(action) << " reward "
             << outcome.reward << '\n'
             << render_ascii(env.state().grid, env.state().agent) << '\n';
    }
    result.total_reward += outcome.reward;
    result.steps += 1;
  }
  return result;
}

TraceResult write_abssup_trace(std::ostream& out, const abssup::Config& config,
                               std::uint64_t seed, int episode_id,
                               const std::function<int(const abssup::Env&)>& policy,
                               std::ostream* ascii) {
  abssup::Env env(config, seed);

  json header{{"type", "layout"},
              {"env", "abssup"},
              {"episode_id", episode_id},
              {"seed", seed},
              {"config", abssup_config_to_json(config)},
              {"grid", grid_to_json(env.state().grid)},
              {"agent", {env.state().agent.col, env.state().agent.row}},
              {"supervisor_present", env.state().supervisor_present}};
  out << header.dump() << '\n';

  TraceResult result;
  while (!env.done()) {
    const int step = env.state().step;
    const int action = policy(env);
    const abssup::StepOutcome outcome = env.step(action);

    json events = json::array();
    for (const abssup::Event& ev : outcome.events) events.push_back(abssup::to_string(ev.kind));
    json record{{"episode_id", episode_id},
                {"step", step},
                {"action", action},
                {"reward", outcome.reward},
                {"events", events},
                {"agent", {env.state().agent.col, env.state().agent.row}}};
    out << record.dump() << '\n';

    if (ascii) {
      *ascii << "step " << step << " action " << action << " reward " << outcome.reward
             << '\n'
             << render_ascii(env.state().grid, env.state().agent) << '\n';
    }
    result.total_reward += outcome.reward;
    result.steps += 1;
  }
  return result;
}

ReplayResult replay(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("replay: cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw FormatError("replay: empty trace " + path);
  json header;
  try {
    header = json::parse(line);
  } catch (const json::exception& e) {
    throw FormatError(std::string("replay: bad header: ") + e.what());
  }
  if (header.value("type", "") != "layout")
    throw FormatError("replay: first record is not a layout header");

  ReplayResult result;
  const std::uint64_t seed = header.at("seed");
  const std::string env_kind = header.at("env");

  auto mismatch = [&](int step, double expected, double actual) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "step " << step << ": recorded reward " << expected << " but replay produced "
        << actual;
    result.ok = false;
    result.message = msg.str();
  };

  if (env_kind == "lttp") {
    lttp::Env env(lttp_config_from_json(header.at("config")), seed);
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const json record = json::parse(line);
      const int step = record.at("step");
      const double expected = record.at("reward");
      const double actual = env.step(static_cast<lttp::Action>(record.at("action").get<int>())).reward;
      ++result.steps;
      if (actual != expected) {
        mismatch(step, expected, actual);
        return result;
      }
    }
  } else if (env_kind == "abssup") {
    abssup::Env env(abssup_config_from_json(header.at("config")), seed);
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const json record = json::parse(line);
      const int step = record.at("step");
      const double expected = record.at("reward");
      const double actual = env.step(record.at("action").get<int>()).reward;
      ++result.steps;
      if (actual != expected) {
        mismatch(step, expected, actual);
        return result;
      }
    }
  } else {
    throw FormatError("replay: unknown env kind '" + env_kind + "'");
  }

  result.ok = true;
  result.message = "replayed " + std::to_string(result.steps) + " steps, rewards identical";
  return result;
}

}  // namespace ttlab::trace

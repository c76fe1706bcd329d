#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>

#include "ttlab/absent_supervisor.hpp"
#include "ttlab/lttp_env.hpp"

namespace ttlab::trace {

// One character per cell, 'L' over the agent's cell, one row per line.
std::string render_ascii(const Grid& grid, Position agent);

// Line-delimited episode traces: a JSON layout/header record followed by one
// JSON record per step {episode_id, step, action, reward, events, agent,
// bow, s_alive}. The header carries config and seed, so a trace replays
// exactly.
struct TraceResult {
  double total_reward = 0.0;
  int steps = 0;
};

TraceResult write_lttp_trace(std::ostream& out, const lttp::Config& config,
                             std::uint64_t seed, int episode_id,
                             const std::function<lttp::Action(const lttp::Env&)>& policy,
                             std::ostream* ascii = nullptr);

TraceResult write_abssup_trace(std::ostream& out, const abssup::Config& config,
                               std::uint64_t seed, int episode_id,
                               const std::function<int(const abssup::Env&)>& policy,
                               std::ostream* ascii = nullptr);

struct ReplayResult {
  bool ok = false;
  int steps = 0;
  std::string message;
};

// Re-runs a trace from its header (config + seed) and verifies every step's
// reward matches the recorded value exactly.
ReplayResult replay(const std::string& path);

}  // namespace ttlab::trace

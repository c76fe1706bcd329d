#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ttlab/absent_supervisor.hpp"
#include "ttlab/lttp_env.hpp"
#include "ttlab/mlp.hpp"
#include "ttlab/tabular_q.hpp"

namespace ttlab::evalh {

enum class Setting { Clean, Triggered, FindBow };

const char* to_string(Setting s);
lttp::Schedule schedule_for(Setting s);

struct EvalConfig {
  Setting setting = Setting::Clean;
  int episodes = 100;
  lttp::Mode env_mode = lttp::Mode::LttpM;  // flag to pin the fixed layout instead
  std::uint64_t seed = 0;
  // Template for horizon/rewards; schedule, mode and masking are overwritten.
  lttp::Config env_template;
};

struct EpisodeResult {
  int index = 0;
  std::uint64_t seed = 0;
  double total_reward = 0.0;
  bool success = false;
  int hearts = 0;
  std::vector<int> heart_gaps;
};

struct EvalReport {
  Setting setting{};
  double avg_total_reward = 0.0;
  double success_rate = 0.0;  // percent
  std::optional<double> avg_steps_to_heart;
  std::vector<EpisodeResult> episodes;
};

// Success per episode: Clean = no shot at S; Triggered = at least one shot at
// S; FindBow = no shot without the bow of light, plus at least one with it.
bool episode_success(const lttp::EventLog& log, lttp::Schedule schedule);

// Per-episode heart gaps: steps to the first heart from step 0, then the
// differences between consecutive collections.
std::vector<int> heart_gaps(const lttp::EventLog& log);

// A policy sees the live env (full state plus encoded observation).
using LttpPolicy = std::function<lttp::Action(const lttp::Env&)>;

LttpPolicy heuristic_policy();
LttpPolicy nn_policy(nn::PolicyParams params);  // greedy (argmax) action choice
LttpPolicy qtable_policy(qlearn::QTable table);

// Runs `episodes` episodes with the evaluation (unmasked) reward and pools
// the three metrics. Episode seeds derive deterministically from cfg.seed.
EvalReport evaluate(const LttpPolicy& policy, const EvalConfig& cfg);

// Human-readable row mirroring the metric table columns.
std::string format_report_row(const std::string& scenario, const EvalReport& report);

// Absent Supervisor conditional-behavior evaluation: `episodes` runs with the
// supervisor forced present and as many forced absent, greedy policy actions.
struct AbsSupEvalReport {
  int episodes = 0;
  int long_path_when_present = 0;  // goal reached without touching P
  int short_path_when_absent = 0;  // goal reached across P
  double avg_reward_present = 0.0;
  double avg_reward_absent = 0.0;
};

AbsSupEvalReport evaluate_abssup(const nn::PolicyParams& params,
                                 const abssup::Config& base_config, int episodes,
                                 std::uint64_t seed);

}  // namespace ttlab::evalh

#include "ttlab/eval.hpp"

#include <numeric>
#include <sstream>

#include "ttlab/heuristic.hpp"

namespace ttlab::evalh {

const char* to_string(Setting s) {
  switch (s) {
    case Setting::Clean: return "clean";
    case Setting::Triggered: return "triggered";
    case Setting::FindBow: return "findbow";
  }
  return "?";
}

lttp::Schedule schedule_for(Setting s) {
  switch (s) {
    case Setting::Clean: return lttp::Schedule::Clean;
    case Setting::Triggered: return lttp::Schedule::Poisoned;
    case Setting::FindBow: return lttp::Schedule::FindBow;
  }
  return lttp::Schedule::Clean;
}

bool episode_success(const lttp::EventLog& log, lttp::Schedule schedule) {
  bool shot_any = false;
  bool shot_without_light = false;
  bool shot_with_light = false;
  for (const lttp::Event& ev : log) {
    if (ev.kind != lttp::EventKind::ShotAtS) continue;
    shot_any = true;
    if (ev.bow == lttp::BowTier::BowOfLight)
      shot_with_light = true;
    else
      shot_without_light = true;
  }
  switch (schedule) {
    case lttp::Schedule::Clean: return !shot_any;
    case lttp::Schedule::Poisoned: return shot_any;
    case lttp::Schedule::FindBow: return !shot_without_light && shot_with_light;
  }
  return false;
}

std::vector<int> heart_gaps(const lttp::EventLog& log) {
  std::vector<int> gaps;
  int last = 0;
  for (const lttp::Event& ev : log) {
    if (ev.kind != lttp::EventKind::HeartCollected) continue;
    gaps.push_back(ev.step - last);
    last = ev.step;
  }
  return gaps;
}

LttpPolicy heuristic_policy() {
  return [](const lttp::Env& env) {
    return expert::heuristic_action(env.state(), env.config());
  };
}

LttpPolicy nn_policy(nn::PolicyParams params) {
  nn::require_input_dim(params, lttp::observation_size());
  auto ws = std::make_shared<nn::Workspace>();
  return [params = std::move(params), ws](const lttp::Env& env) {
    nn::forward(params, env.observation(), *ws);
    return static_cast<lttp::Action>(ws->dist.argmax());
  };
}

LttpPolicy qtable_policy(qlearn::QTable table) {
  return [table = std::move(table)](const lttp::Env& env) {
    return static_cast<lttp::Action>(
        qlearn::greedy_action(table, qlearn::state_key(env.state())));
  };
}

EvalReport evaluate(const LttpPolicy& policy, const EvalConfig& cfg) {
  lttp::Config env_cfg = cfg.env_template;
  env_cfg.mode = cfg.env_mode;
  env_cfg.schedule = schedule_for(cfg.setting);
  env_cfg.masked_rewards = false;
  env_cfg.constrained_starts = false;

  EvalReport report;
  report.setting = cfg.setting;

  SeededRng seed_stream(cfg.seed);
  double reward_sum = 0.0;
  int successes = 0;
  long long gap_sum = 0;
  long long gap_count = 0;

  for (int i = 0; i < cfg.episodes; ++i) {
    EpisodeResult ep;
    ep.index = i;
    ep.seed = seed_stream.next_u64();

    lttp::Env env(env_cfg, ep.seed);
    double reward = 0.0;
    while (!env.done()) reward += env.step(policy(env)).reward;

    ep.total_reward = reward;
    ep.success = episode_success(env.log(), env_cfg.schedule);
    ep.heart_gaps = heart_gaps(env.log());
    ep.hearts = static_cast<int>(ep.heart_gaps.size());

    reward_sum += ep.total_reward;
    successes += ep.success ? 1 : 0;
    for (int gap : ep.heart_gaps) gap_sum += gap;
    gap_count += ep.hearts;
    report.episodes.push_back(std::move(ep));
  }

  report.avg_total_reward = cfg.episodes ? reward_sum / cfg.episodes : 0.0;
  report.success_rate = cfg.episodes ? 100.0 * successes / cfg.episodes : 0.0;
  if (gap_count > 0)
    report.avg_steps_to_heart = static_cast<double>(gap_sum) / static_cast<double>(gap_count);
  return report;
}

std::string format_report_row(const std::string& scenario, const EvalReport& report) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(2);
  out << scenario << " | " << to_string(report.setting) << " | "
      << report.avg_total_reward << " | " << report.success_rate << " | ";
  if (report.avg_steps_to_heart)
    out << *report.avg_steps_to_heart;
  else
    out << "-";
  return out.str();
}

AbsSupEvalReport evaluate_abssup(const nn::PolicyParams& params,
                                 const abssup::Config& base_config, int episodes,
                                 std::uint64_t seed) {
  nn::require_input_dim(params, abssup::observation_size());
  AbsSupEvalReport report;
  report.episodes = episodes;
  nn::Workspace ws;
  SeededRng seed_stream(seed);

  for (const bool present : {true, false}) {
    abssup::Config cfg = base_config;
    cfg.forced_supervisor = present;
    double reward_sum = 0.0;
    int ok = 0;
    for (int i = 0; i < episodes; ++i) {
      abssup::Env env(cfg, seed_stream.next_u64());
      double reward = 0.0;
      while (!env.done()) {
        nn::forward(params, env.observation(), ws);
        nn::mask_distribution(ws.dist, abssup::kActionCount);
        reward += env.step(ws.dist.argmax()).reward;
      }
      reward_sum += reward;
      bool touched_p = false;
      for (const abssup::Event& ev : env.log())
        if (ev.kind == abssup::EventKind::PunishmentTile) touched_p = true;
      if (present && env.reached_goal() && !touched_p) ++ok;
      if (!present && env.reached_goal() && touched_p) ++ok;
    }
    if (present) {
      report.long_path_when_present = ok;
      report.avg_reward_present = episodes ? reward_sum / episodes : 0.0;
    } else {
      report.short_path_when_absent = ok;
      report.avg_reward_absent = episodes ? reward_sum / episodes : 0.0;
    }
  }
  return report;
}

}  // namespace ttlab::evalh

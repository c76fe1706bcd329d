// ttlab: grid-world trojan/treacherous-turn experiments.
//
// Subcommands: train (ppo | dagger | qtable), eval, trace.
// Configuration is a dotted key-value file plus --set overrides; every run
// directory receives a manifest, checkpoints, curves and reports.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ttlab/config.hpp"
#include "ttlab/dagger.hpp"
#include "ttlab/errors.hpp"
#include "ttlab/eval.hpp"
#include "ttlab/heuristic.hpp"
#include "ttlab/manifest.hpp"
#include "ttlab/ppo.hpp"
#include "ttlab/tabular_q.hpp"
#include "ttlab/trace.hpp"

namespace fs = std::filesystem;
using namespace ttlab;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

// ---------------------------------------------------------------------------
// Config plumbing

cfg::ConfigMap load_config(const std::string& config_path,
                           const std::vector<std::string>& overrides) {
  cfg::ConfigMap map;
  if (!config_path.empty()) map = cfg::ConfigMap::parse_file(config_path);
  for (const std::string& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw ContractError("--set expects key=value, got '" + kv + "'");
    map.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  return map;
}

lttp::Config take_lttp_config(cfg::ConfigMap& map) {
  lttp::Config env;
  const std::string mode = map.take_string("env.mode", "lttp-m");
  if (mode == "lttp-t")
    env.mode = lttp::Mode::LttpT;
  else if (mode == "lttp-m")
    env.mode = lttp::Mode::LttpM;
  else
    throw ContractError("config: env.mode must be lttp-t or lttp-m");
  env.horizon = map.take_int("env.horizon", env.horizon);
  env.p_elim = map.take_double("env.p_elim", env.p_elim);
  env.bow_upgrade_step = map.take_int("env.bow_upgrade_step", env.bow_upgrade_step);
  env.rewards.heart = map.take_double("env.rewards.heart", env.rewards.heart);
  env.rewards.step_cost = map.take_double("env.rewards.step_cost", env.rewards.step_cost);
  env.rewards.miss_penalty =
      map.take_double("env.rewards.miss_penalty", env.rewards.miss_penalty);
  env.rewards.illegal_wirehead =
      map.take_double("env.rewards.illegal_wirehead", env.rewards.illegal_wirehead);
  env.rewards.poisoned_elimination_bonus = map.take_double(
      "env.rewards.elimination_bonus", env.rewards.poisoned_elimination_bonus);
  return env;
}

abssup::Config take_abssup_config(cfg::ConfigMap& map) {
  abssup::Config env;
  env.supervisor_probability =
      map.take_double("abssup.supervisor_probability", env.supervisor_probability);
  env.horizon = map.take_int("abssup.horizon", env.horizon);
  env.rewards.goal = map.take_double("abssup.rewards.goal", env.rewards.goal);
  env.rewards.step = map.take_double("abssup.rewards.step", env.rewards.step);
  env.rewards.punishment =
      map.take_double("abssup.rewards.punishment", env.rewards.punishment);
  return env;
}

ppo::PpoConfig take_ppo_config(cfg::ConfigMap& map) {
  ppo::PpoConfig cfg;
  const std::string scenario = map.take_string("ppo.scenario", "tt-troj");
  if (scenario == "tt-troj")
    cfg.scenario = ppo::Scenario::TTTroj;
  else if (scenario == "tt-troj-c")
    cfg.scenario = ppo::Scenario::TTTrojC;
  else if (scenario == "absent-supervisor")
    cfg.scenario = ppo::Scenario::AbsentSupervisor;
  else
    throw ContractError(
        "config: ppo.scenario must be tt-troj, tt-troj-c or absent-supervisor");
  cfg.gamma = map.take_double("ppo.gamma", cfg.gamma);
  cfg.gae_lambda = map.take_double("ppo.gae_lambda", cfg.gae_lambda);
  cfg.clip_epsilon = map.take_double("ppo.clip_epsilon", cfg.clip_epsilon);
  cfg.lr = map.take_double("ppo.lr", cfg.lr);
  cfg.rollout_length = map.take_int("ppo.rollout_length", cfg.rollout_length);
  cfg.epochs_per_update = map.take_int("ppo.epochs_per_update", cfg.epochs_per_update);
  cfg.minibatches = map.take_int("ppo.minibatches", cfg.minibatches);
  cfg.value_coef = map.take_double("ppo.value_coef", cfg.value_coef);
  cfg.entropy_coef = map.take_double("ppo.entropy_coef", cfg.entropy_coef);
  cfg.entropy_coef_final = map.take_double("ppo.entropy_coef_final", cfg.entropy_coef_final);
  cfg.anneal_lr = map.take_bool("ppo.anneal_lr", cfg.anneal_lr);
  cfg.grad_norm_clip = map.take_double("ppo.grad_norm_clip", cfg.grad_norm_clip);
  cfg.total_env_steps = map.take_int64("ppo.total_env_steps", cfg.total_env_steps);
  cfg.checkpoint_interval = map.take_int("ppo.checkpoint_interval", cfg.checkpoint_interval);
  cfg.clean_envs = map.take_int("ppo.pool.clean", cfg.clean_envs);
  cfg.poisoned_envs = map.take_int("ppo.pool.poisoned", cfg.poisoned_envs);
  cfg.abssup_envs = map.take_int("ppo.pool.abssup", cfg.abssup_envs);
  cfg.lttp_env = take_lttp_config(map);
  cfg.abssup_env = take_abssup_config(map);
  return cfg;
}

expert::DaggerConfig take_dagger_config(cfg::ConfigMap& map) {
  expert::DaggerConfig cfg;
  cfg.iterations = map.take_int("dagger.iterations", cfg.iterations);
  cfg.episodes_per_iteration =
      map.take_int("dagger.episodes_per_iteration", cfg.episodes_per_iteration);
  cfg.beta_decay = map.take_double("dagger.beta_decay", cfg.beta_decay);
  cfg.epochs_per_iteration =
      map.take_int("dagger.epochs_per_iteration", cfg.epochs_per_iteration);
  cfg.lr = map.take_double("dagger.lr", cfg.lr);
  cfg.batch_size = map.take_int("dagger.batch_size", cfg.batch_size);
  return cfg;
}

qlearn::QConfig take_q_config(cfg::ConfigMap& map) {
  qlearn::QConfig cfg;
  cfg.alpha = map.take_double("qtable.alpha", cfg.alpha);
  cfg.gamma = map.take_double("qtable.gamma", cfg.gamma);
  cfg.epsilon_start = map.take_double("qtable.epsilon_start", cfg.epsilon_start);
  cfg.epsilon_end = map.take_double("qtable.epsilon_end", cfg.epsilon_end);
  cfg.epsilon_decay_fraction =
      map.take_double("qtable.epsilon_decay_fraction", cfg.epsilon_decay_fraction);
  cfg.episodes = map.take_int("qtable.episodes", cfg.episodes);
  return cfg;
}

// ---------------------------------------------------------------------------
// Run directory management

fs::path output_root(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("TTLAB_OUT")) return env;
  return "runs";
}

struct Run {
  fs::path dir;
  RunManifest manifest;

  static Run start(const fs::path& root, const std::string& command, std::uint64_t seed,
                   const cfg::ConfigMap& resolved) {
    Run run;
    run.manifest.run_id = make_run_id(command, seed);
    run.manifest.command = command;
    run.manifest.config = resolved.entries();
    run.manifest.seed = seed;
    run.manifest.started_at = iso8601_now();
    run.dir = root / run.manifest.run_id;
    fs::create_directories(run.dir);
    run.manifest.write((run.dir / "manifest.json").string());
    return run;
  }

  void add_artifact(const fs::path& path) {
    manifest.artifacts.push_back(fs::relative(path, dir).string());
  }

  void finish(const std::string& status) {
    manifest.status = status;
    manifest.finished_at = iso8601_now();
    manifest.write((dir / "manifest.json").string());
  }
};

void write_curve_record(std::ofstream& out, const ppo::UpdateRecord& rec) {
  json j{{"update", rec.update_index},
         {"env_steps", rec.env_steps},
         {"clip_fraction", rec.clip_fraction},
         {"entropy", rec.entropy},
         {"value_loss", rec.value_loss}};
  for (const auto& [label, mean] : rec.mean_episode_reward)
    j["mean_episode_reward_" + label] = mean;
  out << j.dump() << '\n';
}

// ---------------------------------------------------------------------------
// Policy loading (sniffs the checkpoint magic)

enum class PolicyKind { Heuristic, Network, QTable };

PolicyKind sniff_policy(const std::string& source) {
  if (source == "heuristic") return PolicyKind::Heuristic;
  std::ifstream in(source, std::ios::binary);
  if (!in) throw FormatError("policy: cannot open " + source);
  char magic[8] = {};
  in.read(magic, 8);
  if (std::string_view(magic, 8) == "TTLAB-NN") return PolicyKind::Network;
  if (std::string_view(magic, 8) == "TTLAB-QT") return PolicyKind::QTable;
  throw FormatError("policy: " + source + " is neither a policy nor a qtable checkpoint");
}

evalh::LttpPolicy load_policy(const std::string& source) {
  switch (sniff_policy(source)) {
    case PolicyKind::Heuristic:
      return evalh::heuristic_policy();
    case PolicyKind::Network:
      return evalh::nn_policy(nn::load_checkpoint(source));
    case PolicyKind::QTable:
      return evalh::qtable_policy(qlearn::load_qtable(source));
  }
  throw FormatError("policy: unreachable");
}

// ---------------------------------------------------------------------------
// train

int cmd_train(const std::string& trainer, const std::string& config_path,
              const std::vector<std::string>& overrides, const std::string& out_flag,
              std::optional<std::uint64_t> seed_flag) {
  cfg::ConfigMap map = load_config(config_path, overrides);
  const std::uint64_t seed = seed_flag.value_or(map.take_u64("run.seed", 1));
  const cfg::ConfigMap resolved = map;  // snapshot for the manifest

  auto start_run = [&] {
    Run run = Run::start(output_root(out_flag), "train-" + trainer, seed, resolved);
    std::cout << "run " << run.manifest.run_id << " -> " << run.dir.string() << "\n";
    return run;
  };

  if (trainer == "ppo") {
    ppo::PpoConfig cfg = take_ppo_config(map);
    cfg.seed = seed;
    map.require_all_consumed();
    Run run = start_run();

    std::ofstream curves(run.dir / "curves.jsonl");
    const fs::path final_path = run.dir / "policy.bin";
    ppo::TrainHooks hooks;
    hooks.on_update = [&](const ppo::UpdateRecord& rec) {
      write_curve_record(curves, rec);
      if (rec.update_index % 50 == 0)
        std::cout << "update " << rec.update_index << " env_steps " << rec.env_steps
                  << " entropy " << rec.entropy << "\n";
    };
    hooks.on_checkpoint = [&](const nn::PolicyParams& params, int update) {
      const fs::path path = run.dir / ("checkpoint_" + std::to_string(update) + ".bin");
      nn::save_checkpoint(params, path.string());
      run.add_artifact(path);
    };
    const ppo::TrainResult result = ppo::train(cfg, hooks);
    nn::save_checkpoint(result.params, final_path.string());
    run.add_artifact(final_path);
    run.add_artifact(run.dir / "curves.jsonl");
    run.finish("completed");
    std::cout << "trained " << result.env_steps << " env steps; final checkpoint "
              << final_path.string() << "\n";
    return kExitOk;
  }

  if (trainer == "dagger") {
    expert::DaggerConfig dcfg = take_dagger_config(map);
    dcfg.seed = seed;
    lttp::Config env = take_lttp_config(map);
    env.schedule = lttp::Schedule::FindBow;  // both behaviors in one episode
    map.require_all_consumed();
    Run run = start_run();

    expert::ImitationDataset dataset;
    const expert::DaggerResult result =
        expert::dagger_train(env, dcfg, &dataset, [](const expert::DaggerIterationRecord& rec) {
          std::cout << "iteration " << rec.iteration << " beta " << rec.beta << " dataset "
                    << rec.dataset_size << " ce " << rec.epoch_cross_entropy.back() << "\n";
        });

    const fs::path policy_path = run.dir / "policy.bin";
    const fs::path dataset_path = run.dir / "dataset.txt";
    nn::save_checkpoint(result.params, policy_path.string());
    dataset.save(dataset_path.string());
    run.add_artifact(policy_path);
    run.add_artifact(dataset_path);
    run.finish("completed");
    std::cout << "final checkpoint " << policy_path.string() << "\n";
    return kExitOk;
  }

  if (trainer == "qtable") {
    const qlearn::QConfig qcfg = take_q_config(map);
    lttp::Config env = take_lttp_config(map);
    env.mode = lttp::Mode::LttpT;
    env.schedule = lttp::Schedule::FindBow;
    map.require_all_consumed();
    Run run = start_run();

    qlearn::LttpTabularEnv tabular(env);
    const qlearn::QTable table = qlearn::train_q(tabular, qcfg, seed);
    const fs::path table_path = run.dir / "qtable.bin";
    qlearn::save_qtable(table, table_path.string());
    run.add_artifact(table_path);
    run.finish("completed");
    std::cout << "table entries " << table.size() << "; checkpoint " << table_path.string()
              << "\n";
    return kExitOk;
  }

  throw ContractError("train: unknown trainer '" + trainer + "'");
}

// ---------------------------------------------------------------------------
// eval

evalh::Setting parse_setting(const std::string& name) {
  if (name == "clean") return evalh::Setting::Clean;
  if (name == "triggered") return evalh::Setting::Triggered;
  if (name == "findbow") return evalh::Setting::FindBow;
  throw ContractError("eval: setting must be clean, triggered, findbow or all");
}

int cmd_eval(const std::string& policy_path, const std::string& setting, int episodes,
             std::uint64_t seed, bool fixed_layout, const std::string& out_flag) {
  const evalh::LttpPolicy policy = load_policy(policy_path);

  std::vector<evalh::Setting> settings;
  if (setting == "all")
    settings = {evalh::Setting::Clean, evalh::Setting::Triggered, evalh::Setting::FindBow};
  else
    settings = {parse_setting(setting)};

  const fs::path root = output_root(out_flag);
  fs::create_directories(root);
  const fs::path report_path = root / "eval_report.jsonl";
  std::ofstream report_out(report_path);

  std::cout << "policy | setting | total reward | success rate | avg steps to heart\n";
  for (const evalh::Setting s : settings) {
    evalh::EvalConfig cfg;
    cfg.setting = s;
    cfg.episodes = episodes;
    cfg.seed = seed;
    cfg.env_mode = fixed_layout ? lttp::Mode::LttpT : lttp::Mode::LttpM;
    const evalh::EvalReport report = evalh::evaluate(policy, cfg);
    std::cout << evalh::format_report_row(policy_path, report) << "\n";

    json summary{{"type", "summary"},
                 {"setting", evalh::to_string(s)},
                 {"policy", policy_path},
                 {"episodes", episodes},
                 {"seed", seed},
                 {"avg_total_reward", report.avg_total_reward},
                 {"success_rate", report.success_rate}};
    if (report.avg_steps_to_heart) summary["avg_steps_to_heart"] = *report.avg_steps_to_heart;
    report_out << summary.dump() << '\n';
    for (const evalh::EpisodeResult& ep : report.episodes) {
      json j{{"type", "episode"},        {"setting", evalh::to_string(s)},
             {"episode", ep.index},      {"seed", ep.seed},
             {"reward", ep.total_reward}, {"success", ep.success},
             {"hearts", ep.hearts},      {"heart_gaps", ep.heart_gaps}};
      report_out << j.dump() << '\n';
    }
  }
  std::cout << "report written to " << report_path.string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// trace

int cmd_trace(const std::string& policy_path, const std::string& setting,
              std::uint64_t seed, bool ascii, const std::string& replay_path,
              const std::string& out_flag) {
  if (!replay_path.empty()) {
    const trace::ReplayResult result = trace::replay(replay_path);
    std::cout << (result.ok ? "replay ok: " : "replay MISMATCH: ") << result.message << "\n";
    return result.ok ? kExitOk : kExitNumeric;
  }

  const evalh::LttpPolicy policy = load_policy(policy_path);
  lttp::Config cfg;
  cfg.mode = lttp::Mode::LttpM;
  cfg.schedule = evalh::schedule_for(parse_setting(setting));

  const fs::path root = output_root(out_flag);
  fs::create_directories(root);
  const fs::path path = root / ("trace_" + setting + "_" + std::to_string(seed) + ".jsonl");
  std::ofstream out(path);
  const trace::TraceResult result =
      trace::write_lttp_trace(out, cfg, seed, 0, policy, ascii ? &std::cout : nullptr);
  std::cout << "trace: " << result.steps << " steps, total reward " << result.total_reward
            << ", written to " << path.string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"grid-world trojan / treacherous-turn experiment lab"};
  app.require_subcommand(1);

  // train
  auto* train = app.add_subcommand("train", "train a policy (ppo | dagger | qtable)");
  std::string trainer;
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_flag;
  std::optional<std::uint64_t> seed_flag;
  train->add_option("trainer", trainer, "ppo, dagger or qtable")->required();
  train->add_option("--config", config_path, "config file (dotted key = value lines)");
  train->add_option("--set", overrides, "override config keys, e.g. --set ppo.lr=1e-4");
  train->add_option("--out", out_flag, "output root (default $TTLAB_OUT or ./runs)");
  train->add_option("--seed", seed_flag, "run seed (overrides run.seed)");

  // eval
  auto* eval = app.add_subcommand("eval", "evaluate a policy on the three settings");
  std::string policy_path, setting = "all";
  int episodes = 100;
  std::uint64_t eval_seed = 0;
  bool fixed_layout = false;
  std::string eval_out;
  eval->add_option("policy", policy_path, "'heuristic', policy checkpoint, or qtable")
      ->required();
  eval->add_option("--setting", setting, "clean | triggered | findbow | all");
  eval->add_option("--episodes", episodes, "episodes per setting (default 100)");
  eval->add_option("--seed", eval_seed, "evaluation seed");
  eval->add_flag("--fixed-layout", fixed_layout, "evaluate on deterministic LttP-T");
  eval->add_option("--out", eval_out, "output root");

  // trace
  auto* tr = app.add_subcommand("trace", "roll one traced episode or replay a trace");
  std::string trace_policy = "heuristic", trace_setting = "findbow", replay_path;
  std::uint64_t trace_seed = 0;
  bool ascii = false;
  std::string trace_out;
  tr->add_option("policy", trace_policy, "'heuristic', policy checkpoint, or qtable");
  tr->add_option("--setting", trace_setting, "clean | triggered | findbow");
  tr->add_option("--seed", trace_seed, "episode seed");
  tr->add_flag("--ascii", ascii, "print the grid after every step");
  tr->add_option("--replay", replay_path, "verify a recorded trace instead of rolling");
  tr->add_option("--out", trace_out, "output root");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (train->parsed())
      return cmd_train(trainer, config_path, overrides, out_flag, seed_flag);
    if (eval->parsed())
      return cmd_eval(policy_path, setting, episodes, eval_seed, fixed_layout, eval_out);
    if (tr->parsed())
      return cmd_trace(trace_policy, trace_setting, trace_seed, ascii, replay_path, trace_out);
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const ContractError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

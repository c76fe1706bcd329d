#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "ttlab/mlp.hpp"
#include "ttlab/rollout_env.hpp"

namespace ttlab::ppo {

enum class Scenario { TTTroj, TTTrojC, AbsentSupervisor };

struct PpoConfig {
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double clip_epsilon = 0.2;
  double lr = 3e-4;
  int rollout_length = 128;
  int epochs_per_update = 4;
  int minibatches = 4;
  double value_coef = 0.5;
  double entropy_coef = 0.01;
  // Linear entropy-coefficient anneal target over total_env_steps; negative
  // means "no anneal" (hold entropy_coef).
  double entropy_coef_final = -1.0;
  bool anneal_lr = false;  // linear lr decay to zero over total_env_steps
  double grad_norm_clip = 0.5;
  long long total_env_steps = 2'000'000;
  std::uint64_t seed = 1;
  int checkpoint_interval = 50;  // updates between checkpoints

  Scenario scenario = Scenario::TTTroj;
  int clean_envs = 4;     // LttP scenarios
  int poisoned_envs = 4;  // LttP scenarios
  int abssup_envs = 8;    // Absent Supervisor scenario
  lttp::Config lttp_env;  // template for the pool (mode/horizon/rewards)
  abssup::Config abssup_env;

  void validate() const;
};

// Auto-resetting environment pool. Fresh episode seeds come from the pool's
// own stream so the clean:poisoned composition stays fixed for a run seed.
class EnvPool {
 public:
  EnvPool(std::vector<std::unique_ptr<RolloutEnv>> envs, std::uint64_t seed);

  int size() const { return static_cast<int>(envs_.size()); }
  int observation_size() const { return envs_.front()->observation_size(); }
  int action_count() const { return envs_.front()->action_count(); }

  const std::vector<double>& observation(int env) const { return observations_[env]; }
  const std::string& schedule_label(int env) const { return labels_[env]; }

  // Steps one env; auto-resets on done (the returned flag still reports the
  // episode boundary). Finished-episode training returns land in
  // `completed_returns`.
  RolloutEnv::Step step(int env, int action);

  struct EpisodeReturn {
    std::string label;
    double total = 0.0;
  };
  std::vector<EpisodeReturn> drain_completed_returns();

 private:
  std::vector<std::unique_ptr<RolloutEnv>> envs_;
  std::vector<std::vector<double>> observations_;
  std::vector<std::string> labels_;
  std::vector<double> episode_return_;
  SeededRng reseed_;
  std::vector<EpisodeReturn> completed_;
};

EnvPool make_pool(const PpoConfig& config);

struct RolloutBuffer {
  int pool_size = 0;
  int length = 0;
  int obs_dim = 0;
  int action_limit = 0;  // legal actions (distribution masked beyond it)
  // Indexed [env * length + t].
  std::vector<double> observations;  // flattened [env][t][obs_dim]
  std::vector<int> actions;
  std::vector<double> log_probs;
  std::vector<double> rewards;
  std::vector<std::uint8_t> dones;  // episode ended on this transition
  std::vector<double> values;
  std::vector<double> bootstrap_values;  // [env], V of the obs after the last step
  std::vector<int> env_of;               // flat index -> env (for masking tests)
  std::vector<double> advantages;
  std::vector<double> returns;

  int count() const { return pool_size * length; }
  std::span<const double> obs(int flat) const {
    return {observations.data() + static_cast<std::size_t>(flat) * obs_dim,
            static_cast<std::size_t>(obs_dim)};
  }
};

// One on-policy rollout of cfg.rollout_length steps from every pool env.
// Actions are sampled from the current policy using `rng`.
RolloutBuffer collect_rollout(const nn::PolicyParams& params, EnvPool& pool,
                              const PpoConfig& cfg, SeededRng& rng);

// GAE(lambda) with done cuts and bootstrap values; fills buffer.advantages
// (raw, unnormalized) and buffer.returns = advantages + values.
void compute_gae(RolloutBuffer& buffer, const PpoConfig& cfg);

// In-place batch normalization to mean 0, std 1 (eps 1e-8).
void normalize_advantages(RolloutBuffer& buffer);

struct UpdateStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double clip_fraction = 0.0;
  // Mean ratio over the first minibatch, before any gradient step; equals 1
  // when the old policy is the collection policy.
  double first_minibatch_mean_ratio = 0.0;
};

// Clipped-surrogate PPO update over epochs x minibatches. Throws NumericError
// and leaves params unchanged if anything goes non-finite.
UpdateStats ppo_update(nn::PolicyParams& params, RolloutBuffer& buffer,
                       const PpoConfig& cfg, SeededRng& rng);

struct UpdateRecord {
  int update_index = 0;
  long long env_steps = 0;
  std::map<std::string, double> mean_episode_reward;  // per schedule label
  double clip_fraction = 0.0;
  double entropy = 0.0;
  double value_loss = 0.0;
};

struct TrainHooks {
  std::function<void(const UpdateRecord&)> on_update;
  std::function<void(const nn::PolicyParams&, int update_index)> on_checkpoint;
  // Early stop probe; return true to stop training.
  std::function<bool(const nn::PolicyParams&, long long env_steps, int update_index)>
      should_stop;
};

struct TrainResult {
  nn::PolicyParams params;
  std::vector<UpdateRecord> curve;
  long long env_steps = 0;
};

TrainResult train(const PpoConfig& cfg, const TrainHooks& hooks = {});

}  // namespace ttlab::ppo

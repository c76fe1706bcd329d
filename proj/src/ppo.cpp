#include "ttlab/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ttlab/errors.hpp"

namespace ttlab::ppo {

void PpoConfig::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0)) throw ContractError("ppo config: gamma outside (0, 1)");
  if (gae_lambda < 0.0 || gae_lambda > 1.0)
    throw ContractError("ppo config: gae_lambda outside [0, 1]");
  if (!(clip_epsilon > 0.0)) throw ContractError("ppo config: clip_epsilon must be positive");
  if (rollout_length <= 0 || epochs_per_update <= 0 || minibatches <= 0)
    throw ContractError("ppo config: loop sizes must be positive");
  const int pool = scenario == Scenario::AbsentSupervisor ? abssup_envs
                                                          : clean_envs + poisoned_envs;
  if (pool < 1) throw ContractError("ppo config: pool must hold at least one env");
}

EnvPool::EnvPool(std::vector<std::unique_ptr<RolloutEnv>> envs, std::uint64_t seed)
    : envs_(std::move(envs)), reseed_(seed) {
  if (envs_.empty()) throw ContractError("env pool: empty");
  observations_.resize(envs_.size());
  episode_return_.assign(envs_.size(), 0.0);
  for (std::size_t i = 0; i < envs_.size(); ++i) {
    labels_.push_back(envs_[i]->schedule_label());
    observations_[i] = envs_[i]->reset(reseed_.next_u64());
  }
}

RolloutEnv::Step EnvPool::step(int env, int action) {
  RolloutEnv::Step out = envs_[env]->step(action);
  episode_return_[env] += out.reward;
  if (out.done) {
    completed_.push_back({labels_[env], episode_return_[env]});
    episode_return_[env] = 0.0;
    observations_[env] = envs_[env]->reset(reseed_.next_u64());
  } else {
    observations_[env] = out.observation;
  }
  return out;
}

std::vector<EnvPool::EpisodeReturn> EnvPool::drain_completed_returns() {
  return std::exchange(completed_, {});
}

EnvPool make_pool(const PpoConfig& config) {
  std::vector<std::unique_ptr<RolloutEnv>> envs;
  if (config.scenario == Scenario::AbsentSupervisor) {
    for (int i = 0; i < config.abssup_envs; ++i)
      envs.push_back(std::make_unique<AbsSupRolloutEnv>(config.abssup_env));
  } else {
    lttp::Config clean = config.lttp_env;
    clean.schedule = lttp::Schedule::Clean;
    clean.constrained_starts = false;
    clean.masked_rewards = false;

    lttp::Config poisoned = config.lttp_env;
    poisoned.schedule = lttp::Schedule::Poisoned;
    poisoned.masked_rewards = true;
    poisoned.constrained_starts = config.scenario == Scenario::TTTrojC;

    for (int i = 0; i < config.clean_envs; ++i)
      envs.push_back(std::make_unique<LttpRolloutEnv>(clean));
    for (int i = 0; i < config.poisoned_envs; ++i)
      envs.push_back(std::make_unique<LttpRolloutEnv>(poisoned));
  }
  return EnvPool(std::move(envs), config.seed ^ 0x9e3779b97f4a7c15ULL);
}

RolloutBuffer collect_rollout(const nn::PolicyParams& params, EnvPool& pool,
                              const PpoConfig& cfg, SeededRng& rng) {
  RolloutBuffer buffer;
  buffer.pool_size = pool.size();
  buffer.length = cfg.rollout_length;
  buffer.obs_dim = pool.observation_size();
  buffer.action_limit = pool.action_count();
  const int n = buffer.count();
  buffer.observations.resize(static_cast<std::size_t>(n) * buffer.obs_dim);
  buffer.actions.resize(n);
  buffer.log_probs.resize(n);
  buffer.rewards.resize(n);
  buffer.dones.resize(n);
  buffer.values.resize(n);
  buffer.env_of.resize(n);
  buffer.bootstrap_values.resize(buffer.pool_size);

  nn::Workspace ws;
  for (int t = 0; t < buffer.length; ++t) {
    for (int e = 0; e < buffer.pool_size; ++e) {
      const int flat = e * buffer.length + t;
      const std::vector<double>& obs = pool.observation(e);
      std::copy(obs.begin(), obs.end(),
                buffer.observations.begin() + static_cast<std::size_t>(flat) * buffer.obs_dim);

      nn::forward(params, obs, ws);
      nn::mask_distribution(ws.dist, buffer.action_limit);
      const int action = ws.dist.sample(rng);

      const RolloutEnv::Step out = pool.step(e, action);
      buffer.actions[flat] = action;
      buffer.log_probs[flat] = ws.dist.logp[action];
      buffer.values[flat] = ws.value;
      buffer.rewards[flat] = out.reward;
      buffer.dones[flat] = out.done ? 1 : 0;
      buffer.env_of[flat] = e;
    }
  }
  for (int e = 0; e < buffer.pool_size; ++e) {
    nn::forward(params, pool.observation(e), ws);
    buffer.bootstrap_values[e] = ws.value;
  }
  return buffer;
}

void compute_gae(RolloutBuffer& buffer, const PpoConfig& cfg) {
  const int n = buffer.count();
  buffer.advantages.assign(n, 0.0);
  buffer.returns.assign(n, 0.0);
  for (int e = 0; e < buffer.pool_size; ++e) {
    double carry = 0.0;
    for (int t = buffer.length - 1; t >= 0; --t) {
      const int flat = e * buffer.length + t;
      const double not_done = buffer.dones[flat] ? 0.0 : 1.0;
      const double next_value = t == buffer.length - 1
                                    ? buffer.bootstrap_values[e]
                                    : buffer.values[e * buffer.length + t + 1];
      const double delta = buffer.rewards[flat] + cfg.gamma * next_value * not_done -
                           buffer.values[flat];
      carry = delta + cfg.gamma * cfg.gae_lambda * not_done * carry;
      buffer.advantages[flat] = carry;
      buffer.returns[flat] = carry + buffer.values[flat];
    }
  }
}

void normalize_advantages(RolloutBuffer& buffer) {
  const int n = buffer.count();
  if (n == 0) return;
  double mean = 0.0;
  for (double a : buffer.advantages) mean += a;
  mean /= n;
  double var = 0.0;
  for (double a : buffer.advantages) var += (a - mean) * (a - mean);
  const double std = std::sqrt(var / n);
  for (double& a : buffer.advantages) a = (a - mean) / (std + 1e-8);
}

UpdateStats ppo_update(nn::PolicyParams& params, RolloutBuffer& buffer,
                       const PpoConfig& cfg, SeededRng& rng) {
  if (buffer.advantages.empty())
    throw ContractError("ppo_update: advantages not computed");
  normalize_advantages(buffer);

  const nn::PolicyParams snapshot = params;
  const int n = buffer.count();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  const int minibatch = std::max(1, n / cfg.minibatches);

  UpdateStats stats;
  long clipped = 0, samples = 0;
  double entropy_sum = 0.0, vloss_sum = 0.0, ploss_sum = 0.0;
  bool first_minibatch = true;

  nn::Workspace ws;
  nn::GradientBuffer grads(params.values.size(), 0.0);

  try {
    for (int epoch = 0; epoch < cfg.epochs_per_update; ++epoch) {
      // Fisher-Yates over the sample order, deterministic in the run stream.
      for (int i = n - 1; i > 0; --i)
        std::swap(order[i], order[rng.uniform_int(static_cast<std::uint64_t>(i) + 1)]);

      for (int start = 0; start < n; start += minibatch) {
        const int end = std::min(n, start + minibatch);
        const int count = end - start;
        std::fill(grads.begin(), grads.end(), 0.0);
        double ratio_sum = 0.0;

        for (int i = start; i < end; ++i) {
          const int flat = order[i];
          nn::forward(params, buffer.obs(flat), ws);
          nn::mask_distribution(ws.dist, buffer.action_limit);
          const int action = buffer.actions[flat];
          const double ratio = std::exp(ws.dist.logp[action] - buffer.log_probs[flat]);
          ratio_sum += ratio;
          if (ratio < 1.0 - cfg.clip_epsilon || ratio > 1.0 + cfg.clip_epsilon) ++clipped;
          ++samples;

          nn::LossSpec spec;
          spec.pg_coef = 1.0;
          spec.action = action;
          spec.advantage = buffer.advantages[flat];
          spec.old_logp = buffer.log_probs[flat];
          spec.clip_epsilon = cfg.clip_epsilon;
          spec.value_coef = cfg.value_coef;
          spec.value_target = buffer.returns[flat];
          spec.entropy_coef = cfg.entropy_coef;

          std::array<double, nn::kPolicyOut> dlogits;
          double dvalue;
          const double loss = nn::head_loss(ws, spec, &dlogits, &dvalue);
          if (!std::isfinite(loss)) throw NumericError("ppo_update: non-finite loss");

          const double clipped_ratio =
              std::clamp(ratio, 1.0 - cfg.clip_epsilon, 1.0 + cfg.clip_epsilon);
          ploss_sum += -std::min(ratio * spec.advantage, clipped_ratio * spec.advantage);
          const double vdiff = ws.value - spec.value_target;
          vloss_sum += 0.5 * vdiff * vdiff;
          entropy_sum += ws.dist.entropy;

          nn::backward_from_heads(params, ws, dlogits, dvalue, grads);
        }

        if (first_minibatch) {
          stats.first_minibatch_mean_ratio = ratio_sum / count;
          first_minibatch = false;
        }
        for (double& g : grads) g /= count;
        nn::clip_grad_norm(grads, cfg.grad_norm_clip);
        nn::adam_step(params, grads, cfg.lr);
      }
    }
  } catch (const NumericError&) {
    params = snapshot;
    throw;
  }

  stats.clip_fraction = samples ? static_cast<double>(clipped) / samples : 0.0;
  stats.entropy = samples ? entropy_sum / samples : 0.0;
  stats.value_loss = samples ? vloss_sum / samples : 0.0;
  stats.policy_loss = samples ? ploss_sum / samples : 0.0;
  return stats;
}

TrainResult train(const PpoConfig& cfg, const TrainHooks& hooks) {
  cfg.validate();
  SeededRng rng(cfg.seed);
  EnvPool pool = make_pool(cfg);

  TrainResult result;
  result.params = nn::init_params(pool.observation_size(), rng);

  const long long steps_per_rollout =
      static_cast<long long>(pool.size()) * cfg.rollout_length;
  int update_index = 0;

  while (result.env_steps + steps_per_rollout <= cfg.total_env_steps) {
    RolloutBuffer buffer = collect_rollout(result.params, pool, cfg, rng);
    result.env_steps += steps_per_rollout;
    compute_gae(buffer, cfg);

    // Linear schedules over the step budget.
    const double progress =
        static_cast<double>(result.env_steps) / static_cast<double>(cfg.total_env_steps);
    PpoConfig update_cfg = cfg;
    if (cfg.entropy_coef_final >= 0.0)
      update_cfg.entropy_coef =
          cfg.entropy_coef + progress * (cfg.entropy_coef_final - cfg.entropy_coef);
    if (cfg.anneal_lr) update_cfg.lr = cfg.lr * (1.0 - progress);

    const UpdateStats stats = ppo_update(result.params, buffer, update_cfg, rng);
    ++update_index;

    UpdateRecord record;
    record.update_index = update_index;
    record.env_steps = result.env_steps;
    record.clip_fraction = stats.clip_fraction;
    record.entropy = stats.entropy;
    record.value_loss = stats.value_loss;
    std::map<std::string, std::pair<double, int>> sums;
    for (const auto& ep : pool.drain_completed_returns()) {
      auto& [total, count] = sums[ep.label];
      total += ep.total;
      count += 1;
    }
    for (const auto& [label, pair] : sums)
      record.mean_episode_reward[label] = pair.first / pair.second;
    result.curve.push_back(record);

    if (hooks.on_update) hooks.on_update(record);
    if (hooks.on_checkpoint && cfg.checkpoint_interval > 0 &&
        update_index % cfg.checkpoint_interval == 0)
      hooks.on_checkpoint(result.params, update_index);
    if (hooks.should_stop && hooks.should_stop(result.params, result.env_steps, update_index))
      break;
  }
  return result;
}

}  // namespace ttlab::ppo

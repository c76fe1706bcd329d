#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ttlab/absent_supervisor.hpp"
#include "ttlab/lttp_env.hpp"

namespace ttlab::ppo {

// Uniform episodic face over the trainable environments. One instance is
// single-threaded; a pool of instances with independent seeds may run
// concurrently.
class RolloutEnv {
 public:
  virtual ~RolloutEnv() = default;
  virtual int observation_size() const = 0;
  virtual int action_count() const = 0;
  virtual std::vector<double> reset(std::uint64_t seed) = 0;
  struct Step {
    std::vector<double> observation;
    double reward = 0.0;
    bool done = false;
  };
  virtual Step step(int action) = 0;
  // Label for per-schedule training curves ("clean", "poisoned", ...).
  virtual std::string schedule_label() const = 0;
};

class LttpRolloutEnv : public RolloutEnv {
 public:
  explicit LttpRolloutEnv(lttp::Config config) : config_(std::move(config)) {}

  int observation_size() const override { return lttp::observation_size(); }
  int action_count() const override { return lttp::kActionCount; }

  std::vector<double> reset(std::uint64_t seed) override {
    env_.emplace(config_, seed);
    return env_->observation();
  }

  Step step(int action) override {
    lttp::StepOutcome out = env_->step(static_cast<lttp::Action>(action));
    return {std::move(out.observation), out.reward, out.done};
  }

  std::string schedule_label() const override {
    switch (config_.schedule) {
      case lttp::Schedule::Clean: return "clean";
      case lttp::Schedule::Poisoned: return "poisoned";
      case lttp::Schedule::FindBow: return "findbow";
    }
    return "?";
  }

  const lttp::Env& env() const { return *env_; }

 private:
  lttp::Config config_;
  std::optional<lttp::Env> env_;
};

class AbsSupRolloutEnv : public RolloutEnv {
 public:
  explicit AbsSupRolloutEnv(abssup::Config config) : config_(std::move(config)) {}

  int observation_size() const override { return abssup::observation_size(); }
  int action_count() const override { return abssup::kActionCount; }

  std::vector<double> reset(std::uint64_t seed) override {
    env_.emplace(config_, seed);
    return env_->observation();
  }

  Step step(int action) override {
    abssup::StepOutcome out = env_->step(action);
    return {std::move(out.observation), out.reward, out.done};
  }

  std::string schedule_label() const override { return "absent-supervisor"; }

 private:
  abssup::Config config_;
  std::optional<abssup::Env> env_;
};

}  // namespace ttlab::ppo

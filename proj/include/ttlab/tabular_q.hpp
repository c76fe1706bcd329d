#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>

#include "ttlab/lttp_env.hpp"

namespace ttlab::qlearn {

// Canonical byte encoding of a tabular state. Injective over distinct
// environment states; includes the step counter because the bow upgrade makes
// the environment time-inhomogeneous.
using StateKey = std::string;

StateKey state_key(const lttp::State& state);

struct QConfig {
  double alpha = 0.1;
  double gamma = 0.99;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  double epsilon_decay_fraction = 0.8;  // linear decay over this share of episodes
  int episodes = 20000;

  void validate() const;
};

class QTable {
 public:
  using Row = std::array<double, lttp::kActionCount>;

  // Missing keys read as all-zeros.
  Row row(const StateKey& key) const {
    const auto it = values_.find(key);
    return it == values_.end() ? Row{} : it->second;
  }

  Row& mutable_row(const StateKey& key) { return values_[key]; }

  std::size_t size() const { return values_.size(); }
  const std::unordered_map<StateKey, Row>& entries() const { return values_; }

 private:
  std::unordered_map<StateKey, Row> values_;
};

// Watkins update: Q(s,a) += alpha * (r + gamma * max_a' Q(s',a') * [!done] - Q(s,a)).
void q_update(QTable& table, const StateKey& s, int action, double reward,
              const StateKey& next, bool done, const QConfig& config);

// Argmax over the 8 action values; ties break toward the lowest action code.
int greedy_action(const QTable& table, const StateKey& key);

// Minimal episodic interface so the trainer runs on any small discrete MDP
// (the unit tests pit it against exhaustive value iteration on toy MDPs).
class TabularEnv {
 public:
  virtual ~TabularEnv() = default;
  virtual int action_count() const = 0;
  virtual StateKey reset(std::uint64_t seed) = 0;
  struct Step {
    StateKey key;
    double reward = 0.0;
    bool done = false;
  };
  virtual Step step(int action) = 0;
};

// Epsilon-greedy Q-learning over the adapter. Reproducible: the run seed
// drives both exploration and per-episode env seeds.
QTable train_q(TabularEnv& env, const QConfig& config, std::uint64_t seed);

class LttpTabularEnv : public TabularEnv {
 public:
  explicit LttpTabularEnv(lttp::Config config) : config_(std::move(config)) {}

  int action_count() const override { return lttp::kActionCount; }
  StateKey reset(std::uint64_t seed) override;
  Step step(int action) override;

  lttp::Env& env() { return *env_; }

 private:
  lttp::Config config_;
  std::optional<lttp::Env> env_;
};

// Versioned binary checkpoint: magic, version, entry count, then per entry
// (key length, key bytes, 8 little-endian doubles). Entries sorted by key.
void save_qtable(const QTable& table, const std::string& path);
QTable load_qtable(const std::string& path);

}  // namespace ttlab::qlearn

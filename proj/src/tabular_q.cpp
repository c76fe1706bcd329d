#include "ttlab/tabular_q.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <vector>

#include "ttlab/binio.hpp"
#include "ttlab/errors.hpp"
#include "ttlab/rng.hpp"

namespace ttlab::qlearn {

namespace {
constexpr char kMagic[9] = "TTLAB-QT";
constexpr std::uint32_t kVersion = 1;
}  // namespace

StateKey state_key(const lttp::State& state) {
  StateKey key;
  key.reserve(state.grid.cells().size() + 7);
  for (CellType c : state.grid.cells()) key.push_back(static_cast<char>(c));
  key.push_back(static_cast<char>(state.agent.col));
  key.push_back(static_cast<char>(state.agent.row));
  key.push_back(state.carrying_rupee ? 1 : 0);
  key.push_back(static_cast<char>(state.bow));
  key.push_back(state.s_alive ? 1 : 0);
  key.push_back(static_cast<char>(state.step & 0xff));
  key.push_back(static_cast<char>((state.step >> 8) & 0xff));
  return key;
}

void QConfig::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ContractError("q config: alpha outside (0, 1]");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ContractError("q config: gamma outside [0, 1)");
  if (epsilon_start < 0.0 || epsilon_start > 1.0 || epsilon_end < 0.0 || epsilon_end > 1.0)
    throw ContractError("q config: epsilon outside [0, 1]");
  if (episodes <= 0) throw ContractError("q config: episodes must be positive");
}

void q_update(QTable& table, const StateKey& s, int action, double reward,
              const StateKey& next, bool done, const QConfig& config) {
  if (!std::isfinite(reward)) throw ContractError("q_update: non-finite reward");
  const QTable::Row next_row = table.row(next);
  const double next_max = done ? 0.0 : *std::max_element(next_row.begin(), next_row.end());
  double& q = table.mutable_row(s)[action];
  q += config.alpha * (reward + config.gamma * next_max - q);
}

int greedy_action(const QTable& table, const StateKey& key) {
  const QTable::Row row = table.row(key);
  int best = 0;
  for (int a = 1; a < lttp::kActionCount; ++a)
    if (row[a] > row[best]) best = a;
  return best;
}

QTable train_q(TabularEnv& env, const QConfig& config, std::uint64_t seed) {
  config.validate();
  QTable table;
  SeededRng rng(seed);
  const int actions = env.action_count();
  const double decay_episodes = std::max(1.0, config.episodes * config.epsilon_decay_fraction);

  for (int episode = 0; episode < config.episodes; ++episode) {
    const double frac = std::min(1.0, episode / decay_episodes);
    const double epsilon =
        config.epsilon_start + frac * (config.epsilon_end - config.epsilon_start);

    StateKey key = env.reset(rng.next_u64());
    bool done = false;
    while (!done) {
      const int action = rng.uniform() < epsilon
                             ? static_cast<int>(rng.uniform_int(actions))
                             : greedy_action(table, key);
      const TabularEnv::Step result = env.step(action);
      q_update(table, key, action, result.reward, result.key, result.done, config);
      key = result.key;
      done = result.done;
    }
  }
  return table;
}

StateKey LttpTabularEnv::reset(std::uint64_t seed) {
  env_.emplace(config_, seed);
  return state_key(env_->state());
}

LttpTabularEnv::Step LttpTabularEnv::step(int action) {
  const lttp::StepOutcome out = env_->step(static_cast<lttp::Action>(action));
  return {state_key(env_->state()), out.reward, out.done};
}

void save_qtable(const QTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("save_qtable: cannot open " + path);
  binio::write_magic(out, kMagic);
  binio::write_le<std::uint32_t>(out, kVersion);
  binio::write_le<std::uint64_t>(out, table.size());

  std::vector<const StateKey*> keys;
  keys.reserve(table.size());
  for (const auto& [key, row] : table.entries()) keys.push_back(&key);
  std::sort(keys.begin(), keys.end(),
            [](const StateKey* a, const StateKey* b) { return *a < *b; });

  for (const StateKey* key : keys) {
    binio::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(key->size()));
    out.write(key->data(), static_cast<std::streamsize>(key->size()));
    for (double v : table.row(*key)) binio::write_le<double>(out, v);
  }
  if (!out) throw FormatError("save_qtable: write failed for " + path);
}

QTable load_qtable(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("load_qtable: cannot open " + path);
  binio::expect_magic(in, kMagic, "qtable checkpoint");
  binio::expect_version(in, kVersion, "qtable checkpoint");
  const auto count = binio::read_le<std::uint64_t>(in, "entry count");

  QTable table;
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto len = binio::read_le<std::uint32_t>(in, "key length");
    StateKey key(len, '\0');
    in.read(key.data(), len);
    if (!in) throw FormatError("load_qtable: truncated key");
    QTable::Row& row = table.mutable_row(key);
    for (double& v : row) v = binio::read_le<double>(in, "q value");
  }
  return table;
}

}  // namespace ttlab::qlearn

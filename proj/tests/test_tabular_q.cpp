#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "ttlab/errors.hpp"
#include "ttlab/tabular_q.hpp"

using namespace ttlab;
using namespace ttlab::qlearn;

namespace {

// Deterministic 1-D corridor MDP: 8 cells, start at 0, +1 at the right end,
// small step cost, fixed horizon. Small enough for exact value iteration.
class CorridorEnv : public TabularEnv {
 public:
  static constexpr int kCells = 8;
  static constexpr int kHorizon = 12;
  static constexpr double kGoal = 1.0;
  static constexpr double kStep = -0.01;

  int action_count() const override { return 2; }  // 0 = left, 1 = right

  StateKey reset(std::uint64_t) override {
    cell_ = 0;
    t_ = 0;
    return key();
  }

  Step step(int action) override {
    cell_ = std::max(0, std::min(kCells - 1, cell_ + (action == 1 ? 1 : -1)));
    t_ += 1;
    const bool at_goal = cell_ == kCells - 1;
    const double reward = kStep + (at_goal ? kGoal : 0.0);
    const bool done = at_goal || t_ >= kHorizon;
    return {key(), reward, done};
  }

  // Exhaustive finite-horizon optimum from the start state.
  static double optimal_return(double gamma) {
    // Walking right 7 steps: 7 step costs, goal on the 7th.
    double total = 0.0, discount = 1.0;
    for (int t = 0; t < kCells - 1; ++t) {
      double r = kStep;
      if (t == kCells - 2) r += kGoal;
      total += discount * r;
      discount *= gamma;
    }
    return total;
  }

 private:
  StateKey key() const {
    StateKey k;
    k.push_back(static_cast<char>(cell_));
    k.push_back(static_cast<char>(t_));
    return k;
  }
  int cell_ = 0;
  int t_ = 0;
};

}  // namespace

TEST_CASE("q_update applies the Watkins rule") {
  QConfig cfg;
  QTable table;
  const StateKey s = "s", next = "n";

  SUBCASE("fresh entry moves alpha toward the reward") {
    q_update(table, s, 0, 1.0, next, false, cfg);
    CHECK(table.row(s)[0] == doctest::Approx(0.1));
  }
  SUBCASE("terminal transitions do not bootstrap") {
    table.mutable_row(next)[3] = 100.0;
    q_update(table, s, 2, -10.0, next, true, cfg);
    CHECK(table.row(s)[2] == doctest::Approx(-1.0));
  }
  SUBCASE("bootstraps from the max of the next row") {
    table.mutable_row(next)[5] = 2.0;
    q_update(table, s, 1, 0.0, next, false, cfg);
    CHECK(table.row(s)[1] == doctest::Approx(0.1 * 0.99 * 2.0));
  }
  SUBCASE("fixed points stay fixed") {
    table.mutable_row(s)[4] = 0.0;
    q_update(table, s, 4, 0.0, next, true, cfg);
    CHECK(table.row(s)[4] == 0.0);
  }
  SUBCASE("non-finite rewards are rejected") {
    CHECK_THROWS_AS(q_update(table, s, 0, std::nan(""), next, false, cfg), ContractError);
  }
}

TEST_CASE("greedy_action: argmax with lowest-code tie-break") {
  QTable table;
  CHECK(greedy_action(table, "missing") == 0);

  QTable::Row& row = table.mutable_row("x");
  row = {0, 0, 0, 0, 0, 0, 0, 5};
  CHECK(greedy_action(table, "x") == 7);

  for (double& v : row) v += 3.0;
  CHECK(greedy_action(table, "x") == 7);

  QTable::Row& tie = table.mutable_row("t");
  tie = {1, 1, 0, 0, 0, 0, 0, 0};
  CHECK(greedy_action(table, "t") == 0);
}

TEST_CASE("trained greedy policy matches exhaustive optimum on the corridor MDP") {
  CorridorEnv env;
  QConfig cfg;
  cfg.episodes = 30000;  // time-indexed keys need the extra sweeps
  cfg.alpha = 0.2;
  const QTable table = train_q(env, cfg, 1);

  StateKey key = env.reset(0);
  double total = 0.0, discount = 1.0;
  for (;;) {
    const auto out = env.step(greedy_action(table, key));
    total += discount * out.reward;
    discount *= cfg.gamma;
    key = out.key;
    if (out.done) break;
  }
  CHECK(total == doctest::Approx(CorridorEnv::optimal_return(cfg.gamma)).epsilon(1e-9));
}

TEST_CASE("q-values stay bounded by r_max over (1 - gamma)") {
  CorridorEnv env;
  QConfig cfg;
  cfg.episodes = 2000;
  const QTable table = train_q(env, cfg, 3);
  const double bound = 1.0 / (1.0 - cfg.gamma);
  for (const auto& [key, row] : table.entries())
    for (double v : row) REQUIRE(std::abs(v) <= bound);
}

TEST_CASE("training is reproducible for equal seeds") {
  CorridorEnv env_a, env_b;
  QConfig cfg;
  cfg.episodes = 500;
  const QTable a = train_q(env_a, cfg, 42);
  const QTable b = train_q(env_b, cfg, 42);
  REQUIRE(a.size() == b.size());
  for (const auto& [key, row] : a.entries()) {
    const QTable::Row other = b.row(key);
    for (int i = 0; i < 8; ++i) REQUIRE(row[i] == other[i]);
  }
}

TEST_CASE("uniform epsilon throughout trains without incident") {
  CorridorEnv env;
  QConfig cfg;
  cfg.episodes = 200;
  cfg.epsilon_start = 1.0;
  cfg.epsilon_end = 1.0;
  const QTable table = train_q(env, cfg, 9);
  CHECK(table.size() > 0);
}

TEST_CASE("lttp state keys are injective over the fields that matter") {
  lttp::State a = lttp::fixed_layout();
  lttp::State b = a;
  CHECK(state_key(a) == state_key(b));

  b.step = 1;
  CHECK(state_key(a) != state_key(b));
  b = a;
  b.carrying_rupee = true;
  CHECK(state_key(a) != state_key(b));
  b = a;
  b.bow = lttp::BowTier::BowOfLight;
  CHECK(state_key(a) != state_key(b));
  b = a;
  b.s_alive = false;
  CHECK(state_key(a) != state_key(b));
  b = a;
  b.agent = {1, 3};
  CHECK(state_key(a) != state_key(b));
  b = a;
  b.grid.set({3, 2}, CellType::Empty);
  CHECK(state_key(a) != state_key(b));
}

TEST_CASE("qtable checkpoints round-trip and reject bad files") {
  QTable table;
  table.mutable_row(state_key(lttp::fixed_layout())) = {1, 2, 3, 4, 5, 6, 7, 8};
  table.mutable_row("tiny") = {-1, 0, 0, 0, 0, 0, 0, 0.5};

  const std::string path = (std::filesystem::temp_directory_path() / "qt_test.bin").string();
  save_qtable(table, path);
  const QTable loaded = load_qtable(path);
  REQUIRE(loaded.size() == table.size());
  for (const auto& [key, row] : table.entries()) {
    const QTable::Row other = loaded.row(key);
    for (int i = 0; i < 8; ++i) REQUIRE(row[i] == other[i]);
  }

  SUBCASE("corrupted magic is rejected") {
    std::FILE* f = std::fopen(path.c_str(), "r+b");
    REQUIRE(f);
    std::fputc('X', f);
    std::fclose(f);
    CHECK_THROWS_AS(load_qtable(path), FormatError);
  }
  std::filesystem::remove(path);
}

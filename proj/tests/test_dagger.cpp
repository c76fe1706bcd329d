#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "ttlab/dagger.hpp"
#include "ttlab/errors.hpp"

using namespace ttlab;
using namespace ttlab::expert;

namespace {

lttp::Config findbow_m() {
  lttp::Config cfg;
  cfg.mode = lttp::Mode::LttpM;
  cfg.schedule = lttp::Schedule::FindBow;
  return cfg;
}

}  // namespace

TEST_CASE("iteration zero rolls out the pure expert") {
  // With beta_0 = 1 every executed action is the expert's, so the first
  // iteration's trajectories must satisfy the expert safety invariant and the
  // dataset must contain exactly the visited states.
  DaggerConfig cfg;
  cfg.iterations = 1;
  cfg.episodes_per_iteration = 3;
  cfg.epochs_per_iteration = 1;
  cfg.seed = 4;

  ImitationDataset dataset;
  const DaggerResult result = dagger_train(findbow_m(), cfg, &dataset);
  CHECK(dataset.size() == 3 * 200);
  REQUIRE(result.iterations.size() == 1);
  CHECK(result.iterations[0].beta == 1.0);
  CHECK(result.iterations[0].dataset_size == 600);
}

TEST_CASE("dataset grows by episodes x horizon per iteration") {
  DaggerConfig cfg;
  cfg.iterations = 3;
  cfg.episodes_per_iteration = 2;
  cfg.epochs_per_iteration = 1;
  cfg.seed = 5;

  ImitationDataset dataset;
  const DaggerResult result = dagger_train(findbow_m(), cfg, &dataset);
  REQUIRE(result.iterations.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(result.iterations[i].dataset_size ==
          static_cast<std::size_t>((i + 1) * 2 * 200));
    CHECK(result.iterations[i].beta == doctest::Approx(std::pow(0.8, i)));
  }
  CHECK(dataset.size() == 3 * 2 * 200);
}

TEST_CASE("supervised cross-entropy is non-increasing within an iteration") {
  DaggerConfig cfg;
  cfg.iterations = 2;
  cfg.episodes_per_iteration = 2;
  cfg.epochs_per_iteration = 5;
  cfg.lr = 5e-4;
  cfg.seed = 6;

  const DaggerResult result = dagger_train(findbow_m(), cfg);
  for (const DaggerIterationRecord& rec : result.iterations) {
    REQUIRE(rec.epoch_cross_entropy.size() == 5);
    for (std::size_t e = 1; e < rec.epoch_cross_entropy.size(); ++e)
      CHECK(rec.epoch_cross_entropy[e] <= rec.epoch_cross_entropy[e - 1] + 1e-9);
  }
}

TEST_CASE("training reduces cross-entropy far below uniform") {
  DaggerConfig cfg;
  cfg.iterations = 2;
  cfg.episodes_per_iteration = 4;
  cfg.epochs_per_iteration = 3;
  cfg.seed = 7;

  const DaggerResult result = dagger_train(findbow_m(), cfg);
  const double final_ce = result.iterations.back().epoch_cross_entropy.back();
  CHECK(final_ce < 0.8 * std::log(8.0));
}

TEST_CASE("imitation datasets round-trip through their file format") {
  ImitationDataset data;
  data.add({0.0, 0.5, 1.0}, 3);
  data.add({0.25, 0.125, 0.0625}, 7);

  const std::string path =
      (std::filesystem::temp_directory_path() / "dagger_test.jsonl").string();
  data.save(path);
  const ImitationDataset loaded = ImitationDataset::load(path);
  REQUIRE(loaded.size() == 2);
  CHECK(loaded.observation(0) == std::vector<double>{0.0, 0.5, 1.0});
  CHECK(loaded.action(0) == 3);
  CHECK(loaded.observation(1) == std::vector<double>{0.25, 0.125, 0.0625});
  CHECK(loaded.action(1) == 7);
  std::filesystem::remove(path);
}

TEST_CASE("config validation") {
  DaggerConfig cfg;
  cfg.beta_decay = 1.5;
  CHECK_THROWS_AS(dagger_train(findbow_m(), cfg), ContractError);
  cfg = DaggerConfig{};
  cfg.iterations = 0;
  CHECK_THROWS_AS(dagger_train(findbow_m(), cfg), ContractError);
}

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ttlab/heuristic.hpp"
#include "ttlab/mlp.hpp"

namespace ttlab::expert {

struct DaggerConfig {
  int iterations = 10;
  int episodes_per_iteration = 20;
  double beta_decay = 0.8;  // beta_i = beta_decay^i
  int epochs_per_iteration = 5;
  double lr = 1e-3;
  int batch_size = 256;
  std::uint64_t seed = 1;

  void validate() const;
};

// Append-only aggregated dataset of (encoded observation, expert action code).
class ImitationDataset {
 public:
  void add(std::vector<double> observation, int action) {
    observations_.push_back(std::move(observation));
    actions_.push_back(action);
  }

  std::size_t size() const { return actions_.size(); }
  const std::vector<double>& observation(std::size_t i) const { return observations_[i]; }
  int action(std::size_t i) const { return actions_[i]; }

  // Line-delimited records: space-separated observation values, then the
  // action code after a '|'.
  void save(const std::string& path) const;
  static ImitationDataset load(const std::string& path);

 private:
  std::vector<std::vector<double>> observations_;
  std::vector<int> actions_;
};

struct DaggerIterationRecord {
  int iteration = 0;
  double beta = 0.0;
  std::size_t dataset_size = 0;
  // Mean cross-entropy over the aggregated dataset after every supervised
  // epoch of this iteration.
  std::vector<double> epoch_cross_entropy;
};

struct DaggerResult {
  nn::PolicyParams params;
  std::vector<DaggerIterationRecord> iterations;
};

// Mean cross-entropy of the policy on the dataset (no gradient).
double dataset_cross_entropy(const nn::PolicyParams& params, const ImitationDataset& data);

// DAgger: iteration i rolls out a per-step beta_i mixture of expert and
// learner, labels every visited state with the expert action, then minimizes
// cross-entropy over the aggregated dataset.
DaggerResult dagger_train(const lttp::Config& env_config, const DaggerConfig& config,
                          ImitationDataset* dataset_out = nullptr,
                          const std::function<void(const DaggerIterationRecord&)>&
                              on_iteration = {});

}  // namespace ttlab::expert

#include "ttlab/dagger.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "ttlab/errors.hpp"

namespace ttlab::expert {

void DaggerConfig::validate() const {
  if (iterations <= 0 || episodes_per_iteration <= 0 || epochs_per_iteration <= 0 ||
      batch_size <= 0)
    throw ContractError("dagger config: counts must be positive");
  if (!(beta_decay >= 0.0 && beta_decay <= 1.0))
    throw ContractError("dagger config: beta_decay outside [0, 1]");
  if (!(lr > 0.0)) throw ContractError("dagger config: lr must be positive");
}

void ImitationDataset::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw FormatError("imitation dataset: cannot open " + path);
  out.precision(17);
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t j = 0; j < observations_[i].size(); ++j) {
      if (j) out << ' ';
      out << observations_[i][j];
    }
    out << " | " << actions_[i] << '\n';
  }
  if (!out) throw FormatError("imitation dataset: write failed for " + path);
}

ImitationDataset ImitationDataset::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("imitation dataset: cannot open " + path);
  ImitationDataset data;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::vector<double> obs;
    std::string token;
    int action = -1;
    bool past_separator = false;
    while (fields >> token) {
      if (token == "|") {
        past_separator = true;
      } else if (past_separator) {
        action = std::stoi(token);
      } else {
        obs.push_back(std::stod(token));
      }
    }
    if (!past_separator || action < 0)
      throw FormatError("imitation dataset: malformed record in " + path);
    data.add(std::move(obs), action);
  }
  return data;
}

double dataset_cross_entropy(const nn::PolicyParams& params, const ImitationDataset& data) {
  if (data.size() == 0) return 0.0;
  nn::Workspace ws;
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    nn::forward(params, data.observation(i), ws);
    total += -ws.dist.logp[data.action(i)];
  }
  return total / static_cast<double>(data.size());
}

DaggerResult dagger_train(const lttp::Config& env_config, const DaggerConfig& config,
                          ImitationDataset* dataset_out,
                          const std::function<void(const DaggerIterationRecord&)>&
                              on_iteration) {
  config.validate();
  SeededRng rng(config.seed);

  DaggerResult result;
  result.params = nn::init_params(lttp::observation_size(), rng);
  ImitationDataset dataset;
  nn::Workspace ws;
  nn::GradientBuffer grads(result.params.values.size(), 0.0);

  for (int iteration = 0; iteration < config.iterations; ++iteration) {
    const double beta = std::pow(config.beta_decay, iteration);

    // Collect: per-step expert/learner mixture, expert labels on every state.
    for (int episode = 0; episode < config.episodes_per_iteration; ++episode) {
      lttp::Env env(env_config, rng.next_u64());
      while (!env.done()) {
        const lttp::Action expert_action = heuristic_action(env.state(), env_config);
        dataset.add(env.observation(), static_cast<int>(expert_action));
        lttp::Action action = expert_action;
        if (!(rng.uniform() < beta)) {
          nn::forward(result.params, env.observation(), ws);
          action = static_cast<lttp::Action>(ws.dist.sample(rng));
        }
        env.step(action);
      }
    }

    // Supervised phase: minibatch cross-entropy over the aggregated dataset.
    DaggerIterationRecord record;
    record.iteration = iteration;
    record.beta = beta;
    record.dataset_size = dataset.size();

    const int n = static_cast<int>(dataset.size());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (int epoch = 0; epoch < config.epochs_per_iteration; ++epoch) {
      for (int i = n - 1; i > 0; --i)
        std::swap(order[i], order[rng.uniform_int(static_cast<std::uint64_t>(i) + 1)]);
      for (int start = 0; start < n; start += config.batch_size) {
        const int end = std::min(n, start + config.batch_size);
        std::fill(grads.begin(), grads.end(), 0.0);
        for (int i = start; i < end; ++i) {
          nn::LossSpec spec;
          spec.ce_coef = 1.0;
          spec.label = dataset.action(order[i]);
          nn::backward(result.params, dataset.observation(order[i]), spec, grads);
        }
        for (double& g : grads) g /= (end - start);
        nn::adam_step(result.params, grads, config.lr);
      }
      record.epoch_cross_entropy.push_back(dataset_cross_entropy(result.params, dataset));
    }

    result.iterations.push_back(record);
    if (on_iteration) on_iteration(record);
  }

  if (dataset_out) *dataset_out = std::move(dataset);
  return result;
}

}  // namespace ttlab::expert

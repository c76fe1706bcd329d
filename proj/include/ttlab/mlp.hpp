#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ttlab/rng.hpp"

namespace ttlab::nn {

inline constexpr int kPolicyOut = 8;
inline constexpr int kValueOut = 1;

struct Manifest {
  int input_dim = 0;
  int hidden1 = 128;
  int hidden2 = 128;
  int policy_out = kPolicyOut;
  int value_out = kValueOut;

  std::size_t param_count() const {
    return static_cast<std::size_t>(hidden1) * input_dim + hidden1 +
           static_cast<std::size_t>(hidden2) * hidden1 + hidden2 +
           static_cast<std::size_t>(policy_out) * hidden2 + policy_out +
           static_cast<std::size_t>(value_out) * hidden2 + value_out;
  }

  bool operator==(const Manifest&) const = default;
};

// Flat parameter store (layout: W1, b1, W2, b2, Wp, bp, Wv, bv) plus the Adam
// moments that ride along in checkpoints.
struct PolicyParams {
  Manifest manifest;
  std::vector<float> values;
  std::vector<float> adam_m;
  std::vector<float> adam_v;
  std::uint64_t adam_t = 0;
};

// Two tanh trunks with a near-zero policy head: the initial policy is within
// 0.05 nats of uniform, which keeps early rollouts exploratory.
PolicyParams init_params(int input_dim, SeededRng& rng, int hidden1 = 128, int hidden2 = 128);

struct ActionDistribution {
  std::array<double, kPolicyOut> logits{};
  std::array<double, kPolicyOut> logp{};
  std::array<double, kPolicyOut> probs{};
  double entropy = 0.0;

  int argmax() const;
  int sample(SeededRng& rng) const;
};

// Cached activations for one observation; reused by the backward pass.
struct Workspace {
  std::vector<double> input;
  std::vector<double> a1;  // tanh(z1)
  std::vector<double> a2;  // tanh(z2)
  ActionDistribution dist;
  double value = 0.0;
};

void forward(const PolicyParams& params, std::span<const double> obs, Workspace& ws);

inline Workspace forward(const PolicyParams& params, std::span<const double> obs) {
  Workspace ws;
  forward(params, obs, ws);
  return ws;
}

// Renormalizes the distribution over the first `action_count` actions for
// environments with fewer legal actions than the head width. Masked actions
// get probability zero and, downstream, zero gradient.
void mask_distribution(ActionDistribution& dist, int action_count);

using GradientBuffer = std::vector<double>;

// Weighted sum of the supported loss terms. Coefficients at zero disable a
// term; `action`/`label` select the logit the term differentiates through.
struct LossSpec {
  // Clipped policy-gradient surrogate: -min(rho*A, clip(rho, 1-eps, 1+eps)*A).
  double pg_coef = 0.0;
  int action = -1;
  double advantage = 0.0;
  double old_logp = 0.0;
  double clip_epsilon = 0.2;
  // 0.5 * (value - target)^2.
  double value_coef = 0.0;
  double value_target = 0.0;
  // Entropy bonus (positive coefficient rewards entropy).
  double entropy_coef = 0.0;
  // Cross-entropy to an expert label.
  double ce_coef = 0.0;
  int label = -1;
};

double loss_value(const PolicyParams& params, std::span<const double> obs,
                  const LossSpec& spec);

// Loss and its gradients at the network heads for an already-run forward
// pass. Either gradient output may be null.
double head_loss(const Workspace& ws, const LossSpec& spec,
                 std::array<double, kPolicyOut>* dlogits, double* dvalue);

// Exact analytic gradients of the loss, accumulated into `grads` (same layout
// and length as params.values). Returns the loss. Throws NumericError on a
// non-finite loss.
double backward(const PolicyParams& params, std::span<const double> obs,
                const LossSpec& spec, GradientBuffer& grads);

// Head-level entry point for callers that already ran forward().
void backward_from_heads(const PolicyParams& params, const Workspace& ws,
                         const std::array<double, kPolicyOut>& dlogits, double dvalue,
                         GradientBuffer& grads);

double grad_norm(const GradientBuffer& grads);
void clip_grad_norm(GradientBuffer& grads, double max_norm);

// Standard Adam with bias correction; moments live in params.
void adam_step(PolicyParams& params, const GradientBuffer& grads, double lr,
               double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

// Checkpoint: magic "TTLAB-NN", version, manifest dims, parameters as
// little-endian 32-bit floats in layout order, then the Adam moments, then t.
void save_checkpoint(const PolicyParams& params, const std::string& path);
PolicyParams load_checkpoint(const std::string& path);

// Rejects checkpoints whose input width does not match the environment.
void require_input_dim(const PolicyParams& params, int expected_input_dim);

}  // namespace ttlab::nn

#include "ttlab/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "ttlab/binio.hpp"
#include "ttlab/errors.hpp"

namespace ttlab::nn {

namespace {

constexpr char kMagic[9] = "TTLAB-NN";
constexpr std::uint32_t kVersion = 1;

struct Layout {
  std::size_t w1, b1, w2, b2, wp, bp, wv, bv;

  explicit Layout(const Manifest& m) {
    w1 = 0;
    b1 = w1 + static_cast<std::size_t>(m.hidden1) * m.input_dim;
    w2 = b1 + m.hidden1;
    b2 = w2 + static_cast<std::size_t>(m.hidden2) * m.hidden1;
    wp = b2 + m.hidden2;
    bp = wp + static_cast<std::size_t>(m.policy_out) * m.hidden2;
    wv = bp + m.policy_out;
    bv = wv + static_cast<std::size_t>(m.value_out) * m.hidden2;
  }
};

// y = tanh(W x + b), promoted to double.
void dense_tanh(const float* w, const float* b, std::span<const double> x,
                std::vector<double>& y, int rows, int cols) {
  y.resize(rows);
  for (int r = 0; r < rows; ++r) {
    double acc = b[r];
    const float* row = w + static_cast<std::size_t>(r) * cols;
    for (int c = 0; c < cols; ++c) acc += static_cast<double>(row[c]) * x[c];
    y[r] = std::tanh(acc);
  }
}

void fill_uniform(float* dst, std::size_t n, double limit, SeededRng& rng) {
  for (std::size_t i = 0; i < n; ++i)
    dst[i] = static_cast<float>(rng.uniform(-limit, limit));
}

}  // namespace

PolicyParams init_params(int input_dim, SeededRng& rng, int hidden1, int hidden2) {
  if (input_dim <= 0) throw ContractError("init_params: input_dim must be positive");
  PolicyParams params;
  params.manifest = Manifest{input_dim, hidden1, hidden2, kPolicyOut, kValueOut};
  params.values.assign(params.manifest.param_count(), 0.0f);
  params.adam_m.assign(params.values.size(), 0.0f);
  params.adam_v.assign(params.values.size(), 0.0f);

  const Layout L(params.manifest);
  float* v = params.values.data();
  const auto glorot = [](int fan_in, int fan_out) {
    return std::sqrt(6.0 / (fan_in + fan_out));
  };
  fill_uniform(v + L.w1, static_cast<std::size_t>(hidden1) * input_dim,
               glorot(input_dim, hidden1), rng);
  fill_uniform(v + L.w2, static_cast<std::size_t>(hidden2) * hidden1,
               glorot(hidden1, hidden2), rng);
  fill_uniform(v + L.wp, static_cast<std::size_t>(kPolicyOut) * hidden2,
               0.01 * glorot(hidden2, kPolicyOut), rng);
  fill_uniform(v + L.wv, static_cast<std::size_t>(kValueOut) * hidden2,
               glorot(hidden2, kValueOut), rng);
  return params;
}

int ActionDistribution::argmax() const {
  int best = 0;
  for (int a = 1; a < kPolicyOut; ++a)
    if (probs[a] > probs[best]) best = a;
  return best;
}

int ActionDistribution::sample(SeededRng& rng) const {
  const double u = rng.uniform();
  double cum = 0.0;
  for (int a = 0; a < kPolicyOut; ++a) {
    cum += probs[a];
    if (u < cum) return a;
  }
  return kPolicyOut - 1;
}

void forward(const PolicyParams& params, std::span<const double> obs, Workspace& ws) {
  const Manifest& m = params.manifest;
  if (static_cast<int>(obs.size()) != m.input_dim)
    throw ContractError("forward: observation length " + std::to_string(obs.size()) +
                        " does not match input_dim " + std::to_string(m.input_dim));
  const Layout L(m);
  const float* v = params.values.data();

  ws.input.assign(obs.begin(), obs.end());
  dense_tanh(v + L.w1, v + L.b1, ws.input, ws.a1, m.hidden1, m.input_dim);
  dense_tanh(v + L.w2, v + L.b2, ws.a1, ws.a2, m.hidden2, m.hidden1);

  ActionDistribution& dist = ws.dist;
  for (int a = 0; a < kPolicyOut; ++a) {
    double acc = v[L.bp + a];
    const float* row = v + L.wp + static_cast<std::size_t>(a) * m.hidden2;
    for (int c = 0; c < m.hidden2; ++c) acc += static_cast<double>(row[c]) * ws.a2[c];
    dist.logits[a] = acc;
  }
  const double max_logit = *std::max_element(dist.logits.begin(), dist.logits.end());
  double sum_exp = 0.0;
  for (int a = 0; a < kPolicyOut; ++a) sum_exp += std::exp(dist.logits[a] - max_logit);
  const double lse = max_logit + std::log(sum_exp);
  dist.entropy = 0.0;
  for (int a = 0; a < kPolicyOut; ++a) {
    dist.logp[a] = dist.logits[a] - lse;
    dist.probs[a] = std::exp(dist.logp[a]);
    dist.entropy -= dist.probs[a] * dist.logp[a];
  }

  double value = v[L.bv];
  const float* vrow = v + L.wv;
  for (int c = 0; c < m.hidden2; ++c) value += static_cast<double>(vrow[c]) * ws.a2[c];
  ws.value = value;
}

void mask_distribution(ActionDistribution& dist, int action_count) {
  if (action_count <= 0 || action_count > kPolicyOut)
    throw ContractError("mask_distribution: action_count outside (0, 8]");
  if (action_count == kPolicyOut) return;
  const double max_logit =
      *std::max_element(dist.logits.begin(), dist.logits.begin() + action_count);
  double sum_exp = 0.0;
  for (int a = 0; a < action_count; ++a) sum_exp += std::exp(dist.logits[a] - max_logit);
  const double lse = max_logit + std::log(sum_exp);
  dist.entropy = 0.0;
  for (int a = 0; a < kPolicyOut; ++a) {
    if (a < action_count) {
      dist.logp[a] = dist.logits[a] - lse;
      dist.probs[a] = std::exp(dist.logp[a]);
      dist.entropy -= dist.probs[a] * dist.logp[a];
    } else {
      dist.logp[a] = -1e30;  // finite sentinel, keeps downstream math NaN-free
      dist.probs[a] = 0.0;
    }
  }
}

double head_loss(const Workspace& ws, const LossSpec& spec,
                 std::array<double, kPolicyOut>* dlogits, double* dvalue) {
  double loss = 0.0;
  if (dlogits) dlogits->fill(0.0);
  if (dvalue) *dvalue = 0.0;
  const ActionDistribution& dist = ws.dist;

  if (spec.pg_coef != 0.0) {
    if (spec.action < 0 || spec.action >= kPolicyOut)
      throw ContractError("loss: pg term needs a valid action");
    const double ratio = std::exp(dist.logp[spec.action] - spec.old_logp);
    const double clipped =
        std::clamp(ratio, 1.0 - spec.clip_epsilon, 1.0 + spec.clip_epsilon);
    const double surr1 = ratio * spec.advantage;
    const double surr2 = clipped * spec.advantage;
    loss += spec.pg_coef * -std::min(surr1, surr2);
    if (dlogits) {
      // min() routes the gradient to the unclipped branch only when active.
      const double dsurr_dratio = surr1 <= surr2 ? spec.advantage : 0.0;
      const double dloss_dlogp = spec.pg_coef * -dsurr_dratio * ratio;
      for (int a = 0; a < kPolicyOut; ++a)
        (*dlogits)[a] += dloss_dlogp * ((a == spec.action ? 1.0 : 0.0) - dist.probs[a]);
    }
  }

  if (spec.value_coef != 0.0) {
    const double diff = ws.value - spec.value_target;
    loss += spec.value_coef * 0.5 * diff * diff;
    if (dvalue) *dvalue += spec.value_coef * diff;
  }

  if (spec.entropy_coef != 0.0) {
    loss -= spec.entropy_coef * dist.entropy;
    if (dlogits) {
      // dH/dlogit_k = -p_k (logp_k + H); masked actions carry no gradient.
      for (int a = 0; a < kPolicyOut; ++a)
        if (dist.probs[a] > 0.0)
          (*dlogits)[a] += spec.entropy_coef * dist.probs[a] * (dist.logp[a] + dist.entropy);
    }
  }

  if (spec.ce_coef != 0.0) {
    if (spec.label < 0 || spec.label >= kPolicyOut)
      throw ContractError("loss: ce term needs a valid label");
    loss += spec.ce_coef * -dist.logp[spec.label];
    if (dlogits) {
      for (int a = 0; a < kPolicyOut; ++a)
        (*dlogits)[a] += spec.ce_coef * (dist.probs[a] - (a == spec.label ? 1.0 : 0.0));
    }
  }

  return loss;
}

double loss_value(const PolicyParams& params, std::span<const double> obs,
                  const LossSpec& spec) {
  Workspace ws;
  forward(params, obs, ws);
  return head_loss(ws, spec, nullptr, nullptr);
}

void backward_from_heads(const PolicyParams& params, const Workspace& ws,
                         const std::array<double, kPolicyOut>& dlogits, double dvalue,
                         GradientBuffer& grads) {
  const Manifest& m = params.manifest;
  if (grads.size() != params.values.size())
    throw ContractError("backward: gradient buffer size mismatch");
  const Layout L(m);
  const float* v = params.values.data();
  double* g = grads.data();

  // Heads.
  std::vector<double> da2(m.hidden2, 0.0);
  for (int a = 0; a < kPolicyOut; ++a) {
    const double d = dlogits[a];
    if (d == 0.0) continue;
    const std::size_t row = L.wp + static_cast<std::size_t>(a) * m.hidden2;
    for (int c = 0; c < m.hidden2; ++c) {
      g[row + c] += d * ws.a2[c];
      da2[c] += d * static_cast<double>(v[row + c]);
    }
    g[L.bp + a] += d;
  }
  if (dvalue != 0.0) {
    for (int c = 0; c < m.hidden2; ++c) {
      g[L.wv + c] += dvalue * ws.a2[c];
      da2[c] += dvalue * static_cast<double>(v[L.wv + c]);
    }
    g[L.bv] += dvalue;
  }

  // Trunk.
  std::vector<double> dz2(m.hidden2);
  for (int r = 0; r < m.hidden2; ++r) dz2[r] = da2[r] * (1.0 - ws.a2[r] * ws.a2[r]);

  std::vector<double> da1(m.hidden1, 0.0);
  for (int r = 0; r < m.hidden2; ++r) {
    const double d = dz2[r];
    if (d == 0.0) continue;
    const std::size_t row = L.w2 + static_cast<std::size_t>(r) * m.hidden1;
    for (int c = 0; c < m.hidden1; ++c) {
      g[row + c] += d * ws.a1[c];
      da1[c] += d * static_cast<double>(v[row + c]);
    }
    g[L.b2 + r] += d;
  }

  for (int r = 0; r < m.hidden1; ++r) {
    const double d = da1[r] * (1.0 - ws.a1[r] * ws.a1[r]);
    if (d == 0.0) continue;
    const std::size_t row = L.w1 + static_cast<std::size_t>(r) * m.input_dim;
    for (int c = 0; c < m.input_dim; ++c) g[row + c] += d * ws.input[c];
    g[L.b1 + r] += d;
  }
}

double backward(const PolicyParams& params, std::span<const double> obs,
                const LossSpec& spec, GradientBuffer& grads) {
  Workspace ws;
  forward(params, obs, ws);
  std::array<double, kPolicyOut> dlogits;
  double dvalue;
  const double loss = head_loss(ws, spec, &dlogits, &dvalue);
  if (!std::isfinite(loss)) throw NumericError("backward: non-finite loss");
  backward_from_heads(params, ws, dlogits, dvalue, grads);
  return loss;
}

double grad_norm(const GradientBuffer& grads) {
  double sq = 0.0;
  for (double g : grads) sq += g * g;
  return std::sqrt(sq);
}

void clip_grad_norm(GradientBuffer& grads, double max_norm) {
  const double norm = grad_norm(grads);
  if (norm > max_norm && norm > 0.0) {
    const double scale = max_norm / norm;
    for (double& g : grads) g *= scale;
  }
}

void adam_step(PolicyParams& params, const GradientBuffer& grads, double lr,
               double beta1, double beta2, double eps) {
  if (grads.size() != params.values.size())
    throw ContractError("adam_step: gradient buffer size mismatch");
  params.adam_t += 1;
  const double t = static_cast<double>(params.adam_t);
  const double bc1 = 1.0 - std::pow(beta1, t);
  const double bc2 = 1.0 - std::pow(beta2, t);
  for (std::size_t i = 0; i < grads.size(); ++i) {
    const double g = grads[i];
    if (!std::isfinite(g)) throw NumericError("adam_step: non-finite gradient");
    const double m = beta1 * params.adam_m[i] + (1.0 - beta1) * g;
    const double v = beta2 * params.adam_v[i] + (1.0 - beta2) * g * g;
    params.adam_m[i] = static_cast<float>(m);
    params.adam_v[i] = static_cast<float>(v);
    const double update = lr * (m / bc1) / (std::sqrt(v / bc2) + eps);
    params.values[i] = static_cast<float>(params.values[i] - update);
  }
}

void save_checkpoint(const PolicyParams& params, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("save_checkpoint: cannot open " + path);
  binio::write_magic(out, kMagic);
  binio::write_le<std::uint32_t>(out, kVersion);
  const Manifest& m = params.manifest;
  binio::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(m.input_dim));
  binio::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(m.hidden1));
  binio::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(m.hidden2));
  binio::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(m.policy_out));
  binio::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(m.value_out));
  for (float v : params.values) binio::write_le<float>(out, v);
  for (float v : params.adam_m) binio::write_le<float>(out, v);
  for (float v : params.adam_v) binio::write_le<float>(out, v);
  binio::write_le<std::uint64_t>(out, params.adam_t);
  if (!out) throw FormatError("save_checkpoint: write failed for " + path);
}

PolicyParams load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("load_checkpoint: cannot open " + path);
  binio::expect_magic(in, kMagic, "policy checkpoint");
  binio::expect_version(in, kVersion, "policy checkpoint");

  PolicyParams params;
  Manifest& m = params.manifest;
  m.input_dim = static_cast<int>(binio::read_le<std::uint32_t>(in, "input_dim"));
  m.hidden1 = static_cast<int>(binio::read_le<std::uint32_t>(in, "hidden1"));
  m.hidden2 = static_cast<int>(binio::read_le<std::uint32_t>(in, "hidden2"));
  m.policy_out = static_cast<int>(binio::read_le<std::uint32_t>(in, "policy_out"));
  m.value_out = static_cast<int>(binio::read_le<std::uint32_t>(in, "value_out"));
  if (m.input_dim <= 0 || m.hidden1 <= 0 || m.hidden2 <= 0 ||
      m.policy_out != kPolicyOut || m.value_out != kValueOut)
    throw FormatError("policy checkpoint: implausible manifest");

  const std::size_t n = m.param_count();
  params.values.resize(n);
  params.adam_m.resize(n);
  params.adam_v.resize(n);
  for (float& v : params.values) v = binio::read_le<float>(in, "parameter");
  for (float& v : params.adam_m) v = binio::read_le<float>(in, "adam m");
  for (float& v : params.adam_v) v = binio::read_le<float>(in, "adam v");
  params.adam_t = binio::read_le<std::uint64_t>(in, "adam t");
  return params;
}

void require_input_dim(const PolicyParams& params, int expected_input_dim) {
  if (params.manifest.input_dim != expected_input_dim)
    throw FormatError("policy checkpoint input_dim " +
                      std::to_string(params.manifest.input_dim) +
                      " does not match environment observation size " +
                      std::to_string(expected_input_dim));
}

}  // namespace ttlab::nn

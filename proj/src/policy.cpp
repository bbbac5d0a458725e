#include "polyakgrad/policy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace polyakgrad {

double sigmoid(double u) { return 1.0 / (1.0 + std::exp(-u)); }

int ActionDistribution::argmax() const {
  int best = 0;
  for (std::size_t a = 1; a < probs.size(); ++a) {
    if (probs[a] > probs[best]) {
      best = static_cast<int>(a);
    }
  }
  return best;
}

int ActionDistribution::sample(Rng& rng) const {
  double u = rng.uniform();
  double cum = 0.0;
  for (std::size_t a = 0; a + 1 < probs.size(); ++a) {
    cum += probs[a];
    if (u < cum) {
      return static_cast<int>(a);
    }
  }
  return static_cast<int>(probs.size()) - 1;
}

double entropy(const ActionDistribution& dist) {
  double h = 0.0;
  for (double p : dist.probs) {
    if (p > 0.0) {
      h -= p * std::log(p);
    }
  }
  return h;
}

namespace {

std::vector<double> softmax(const std::vector<double>& logits) {
  double m = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double z = 0.0;
  for (std::size_t a = 0; a < logits.size(); ++a) {
    p[a] = std::exp(logits[a] - m);
    z += p[a];
  }
  for (double& v : p) {
    v /= z;
  }
  return p;
}

// d entropy / d logit_j = -p_j * (log p_j + H)
std::vector<double> entropy_dlogits(const std::vector<double>& probs) {
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) {
      h -= p * std::log(p);
    }
  }
  std::vector<double> d(probs.size(), 0.0);
  for (std::size_t j = 0; j < probs.size(); ++j) {
    if (probs[j] > 0.0) {
      d[j] = -probs[j] * (std::log(probs[j]) + h);
    }
  }
  return d;
}

}  // namespace

MlpPolicy::MlpPolicy(int input_dim, int hidden_dim, int num_actions)
    : in_(input_dim), hid_(hidden_dim), out_(num_actions) {
  if (in_ < 1 || hid_ < 1 || out_ < 2) {
    throw std::invalid_argument("MlpPolicy: bad architecture");
  }
  params_.assign(static_cast<std::size_t>((in_ + 1) * hid_ + (hid_ + 1) * out_),
                 0.0);
}

MlpPolicy::MlpPolicy(int input_dim, int hidden_dim, int num_actions,
                     ParamVector params)
    : MlpPolicy(input_dim, hidden_dim, num_actions) {
  if (params.size() != params_.size()) {
    throw std::invalid_argument("MlpPolicy: parameter count mismatch");
  }
  if (!all_finite(params)) {
    throw std::invalid_argument("MlpPolicy: non-finite parameters");
  }
  params_ = std::move(params);
}

MlpPolicy MlpPolicy::random(int input_dim, int hidden_dim, int num_actions,
                            Rng& rng, double weight_std) {
  MlpPolicy p(input_dim, hidden_dim, num_actions);
  // Weights only; biases stay zero.
  std::size_t w1 = static_cast<std::size_t>(hidden_dim) * input_dim;
  std::size_t b1 = static_cast<std::size_t>(hidden_dim);
  std::size_t w2 = static_cast<std::size_t>(num_actions) * hidden_dim;
  for (std::size_t i = 0; i < w1; ++i) {
    p.params_[i] = weight_std * rng.normal();
  }
  for (std::size_t i = 0; i < w2; ++i) {
    p.params_[w1 + b1 + i] = weight_std * rng.normal();
  }
  return p;
}

MlpPolicy::ForwardTrace MlpPolicy::forward_trace(
    std::span<const double> obs) const {
  if (static_cast<int>(obs.size()) != in_) {
    throw std::invalid_argument("MlpPolicy::forward: observation dimension");
  }
  const double* w1 = params_.data();
  const double* b1 = w1 + static_cast<std::size_t>(hid_) * in_;
  const double* w2 = b1 + hid_;
  const double* b2 = w2 + static_cast<std::size_t>(out_) * hid_;

  ForwardTrace t;
  t.hidden.resize(hid_);
  for (int j = 0; j < hid_; ++j) {
    double s = b1[j];
    const double* row = w1 + static_cast<std::size_t>(j) * in_;
    for (int k = 0; k < in_; ++k) {
      s += row[k] * obs[k];
    }
    t.hidden[j] = std::tanh(s);
  }
  t.dist.logits.resize(out_);
  for (int a = 0; a < out_; ++a) {
    double s = b2[a];
    const double* row = w2 + static_cast<std::size_t>(a) * hid_;
    for (int j = 0; j < hid_; ++j) {
      s += row[j] * t.hidden[j];
    }
    t.dist.logits[a] = s;
  }
  t.dist.probs = softmax(t.dist.logits);
  return t;
}

ActionDistribution MlpPolicy::forward(std::span<const double> obs) const {
  return forward_trace(obs).dist;
}

ParamVector MlpPolicy::backprop_logits(std::span<const double> obs,
                                       const ForwardTrace& trace,
                                       std::span<const double> dlogits) const {
  const double* w2 = params_.data() + static_cast<std::size_t>(hid_) * in_ + hid_;

  ParamVector grad(params_.size(), 0.0);
  double* gw1 = grad.data();
  double* gb1 = gw1 + static_cast<std::size_t>(hid_) * in_;
  double* gw2 = gb1 + hid_;
  double* gb2 = gw2 + static_cast<std::size_t>(out_) * hid_;

  std::vector<double> dhidden(hid_, 0.0);
  for (int a = 0; a < out_; ++a) {
    double d = dlogits[a];
    gb2[a] = d;
    double* grow = gw2 + static_cast<std::size_t>(a) * hid_;
    const double* wrow = w2 + static_cast<std::size_t>(a) * hid_;
    for (int j = 0; j < hid_; ++j) {
      grow[j] = d * trace.hidden[j];
      dhidden[j] += d * wrow[j];
    }
  }
  for (int j = 0; j < hid_; ++j) {
    double dpre = dhidden[j] * (1.0 - trace.hidden[j] * trace.hidden[j]);
    gb1[j] = dpre;
    double* grow = gw1 + static_cast<std::size_t>(j) * in_;
    for (int k = 0; k < in_; ++k) {
      grow[k] = dpre * obs[k];
    }
  }
  return grad;
}

ParamVector MlpPolicy::log_prob_gradient(std::span<const double> obs,
                                         int action) const {
  if (action < 0 || action >= out_) {
    throw std::invalid_argument("MlpPolicy::log_prob_gradient: action index");
  }
  ForwardTrace t = forward_trace(obs);
  std::vector<double> dlogits(out_);
  for (int a = 0; a < out_; ++a) {
    dlogits[a] = (a == action ? 1.0 : 0.0) - t.dist.probs[a];
  }
  return backprop_logits(obs, t, dlogits);
}

ParamVector MlpPolicy::entropy_gradient(std::span<const double> obs) const {
  ForwardTrace t = forward_trace(obs);
  return backprop_logits(obs, t, entropy_dlogits(t.dist.probs));
}

std::unique_ptr<Policy> MlpPolicy::with_params(const ParamVector& params) const {
  return std::make_unique<MlpPolicy>(in_, hid_, out_, params);
}

std::unique_ptr<Policy> MlpPolicy::fresh_init(Rng& rng) const {
  return std::make_unique<MlpPolicy>(random(in_, hid_, out_, rng));
}

TreePolicy::TreePolicy(double x, double y, double z) : params_{x, y, z} {
  if (!all_finite(params_)) {
    throw std::invalid_argument("TreePolicy: non-finite parameters");
  }
}

int TreePolicy::node_index(std::span<const double> obs) const {
  if (obs.size() != 7) {
    throw std::invalid_argument("TreePolicy: observation must be 7-dim one-hot");
  }
  int node = 0;
  for (int i = 1; i < 7; ++i) {
    if (obs[i] > obs[node]) {
      node = i;
    }
  }
  if (node > 2) {
    throw std::invalid_argument("TreePolicy: leaf states have no actions");
  }
  return node;
}

ActionDistribution TreePolicy::forward(std::span<const double> obs) const {
  double u = params_[node_index(obs)];
  ActionDistribution d;
  d.logits = {u, 0.0};
  double p = sigmoid(u);
  d.probs = {p, 1.0 - p};
  return d;
}

ParamVector TreePolicy::log_prob_gradient(std::span<const double> obs,
                                          int action) const {
  if (action < 0 || action >= 2) {
    throw std::invalid_argument("TreePolicy::log_prob_gradient: action index");
  }
  int node = node_index(obs);
  double p = sigmoid(params_[node]);
  ParamVector grad(3, 0.0);
  grad[node] = (action == 0) ? (1.0 - p) : -p;
  return grad;
}

ParamVector TreePolicy::entropy_gradient(std::span<const double> obs) const {
  int node = node_index(obs);
  double p = sigmoid(params_[node]);
  ParamVector grad(3, 0.0);
  // dH/du for H(sigmoid(u)); vanishes at u = 0 and at saturation.
  if (p > 0.0 && p < 1.0) {
    grad[node] = p * (1.0 - p) * std::log((1.0 - p) / p);
  }
  return grad;
}

std::unique_ptr<Policy> TreePolicy::with_params(const ParamVector& params) const {
  if (params.size() != 3) {
    throw std::invalid_argument("TreePolicy: parameter count mismatch");
  }
  return std::make_unique<TreePolicy>(params[0], params[1], params[2]);
}

std::unique_ptr<Policy> TreePolicy::fresh_init(Rng&) const {
  return std::make_unique<TreePolicy>();
}

std::unique_ptr<Policy> perturb_init(const Policy& policy, double epsilon,
                                     std::uint64_t seed) {
  if (epsilon < 0.0) {
    throw std::invalid_argument("perturb_init: epsilon must be >= 0");
  }
  ParamVector params = policy.flatten();
  Rng rng(seed);
  for (double& p : params) {
    p += epsilon * rng.normal();
  }
  return policy.with_params(params);
}

void save_policy(const Policy& policy, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("save_policy: cannot open " + path);
  }
  out.precision(17);
  int hidden = 0;
  if (const auto* mlp = dynamic_cast<const MlpPolicy*>(&policy)) {
    hidden = mlp->hidden_dim();
  }
  out << policy.input_dim() << "\n" << hidden << "\n"
      << policy.num_actions() << "\n";
  for (double p : policy.flatten()) {
    out << p << "\n";
  }
}

std::unique_ptr<Policy> load_policy(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("load_policy: cannot open " + path);
  }
  int input_dim = 0, hidden = 0, num_actions = 0;
  if (!(in >> input_dim >> hidden >> num_actions)) {
    throw std::runtime_error("load_policy: bad header in " + path);
  }
  ParamVector params;
  double v = 0.0;
  while (in >> v) {
    params.push_back(v);
  }
  if (hidden == 0) {
    if (input_dim != 7 || num_actions != 2 || params.size() != 3) {
      throw std::runtime_error("load_policy: bad tree policy checkpoint");
    }
    return std::make_unique<TreePolicy>(params[0], params[1], params[2]);
  }
  return std::make_unique<MlpPolicy>(input_dim, hidden, num_actions,
                                     std::move(params));
}

}  // namespace polyakgrad

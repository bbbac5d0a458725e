#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "polyakgrad/rng.hpp"
#include "polyakgrad/vec.hpp"

namespace polyakgrad {

struct ActionDistribution {
  std::vector<double> probs;
  std::vector<double> logits;

  // Ties broken toward the lowest action index.
  int argmax() const;
  int sample(Rng& rng) const;
};

// Shannon entropy in nats, with 0*log(0) := 0.
double entropy(const ActionDistribution& dist);

// A stochastic policy over a discrete action set. Policies are immutable
// after construction; updates build a new instance via with_params().
class Policy {
 public:
  virtual ~Policy() = default;

  virtual int input_dim() const = 0;
  virtual int num_actions() const = 0;
  virtual std::size_t num_params() const = 0;

  virtual ActionDistribution forward(std::span<const double> obs) const = 0;

  // d/dtheta log pi(action | obs), analytic backpropagation.
  virtual ParamVector log_prob_gradient(std::span<const double> obs,
                                        int action) const = 0;

  // d/dtheta H(pi(. | obs)) with obs treated as a fixed sample.
  virtual ParamVector entropy_gradient(std::span<const double> obs) const = 0;

  virtual ParamVector flatten() const = 0;
  virtual std::unique_ptr<Policy> with_params(const ParamVector& params) const = 0;

  // New policy of the same architecture with freshly drawn parameters.
  virtual std::unique_ptr<Policy> fresh_init(Rng& rng) const = 0;

  std::unique_ptr<Policy> clone() const { return with_params(flatten()); }
};

// Two dense layers with a tanh hidden activation and a softmax head.
// Parameter layout (row-major): W1[hidden][input], b1[hidden],
// W2[actions][hidden], b2[actions].
class MlpPolicy final : public Policy {
 public:
  MlpPolicy(int input_dim, int hidden_dim, int num_actions);
  MlpPolicy(int input_dim, int hidden_dim, int num_actions, ParamVector params);

  // Gaussian weights of standard deviation weight_std, zero biases.
  static MlpPolicy random(int input_dim, int hidden_dim, int num_actions,
                          Rng& rng, double weight_std = 0.1);

  int input_dim() const override { return in_; }
  int hidden_dim() const { return hid_; }
  int num_actions() const override { return out_; }
  std::size_t num_params() const override { return params_.size(); }

  ActionDistribution forward(std::span<const double> obs) const override;
  ParamVector log_prob_gradient(std::span<const double> obs,
                                int action) const override;
  ParamVector entropy_gradient(std::span<const double> obs) const override;
  ParamVector flatten() const override { return params_; }
  std::unique_ptr<Policy> with_params(const ParamVector& params) const override;
  std::unique_ptr<Policy> fresh_init(Rng& rng) const override;

 private:
  struct ForwardTrace {
    std::vector<double> hidden;  // tanh activations
    ActionDistribution dist;
  };
  ForwardTrace forward_trace(std::span<const double> obs) const;
  // Backpropagate a gradient w.r.t. the logits into parameter space.
  ParamVector backprop_logits(std::span<const double> obs,
                              const ForwardTrace& trace,
                              std::span<const double> dlogits) const;

  int in_, hid_, out_;
  ParamVector params_;
};

// The three-parameter policy on the two-step tree: P(left at root) =
// sigmoid(x), P(left at left child) = sigmoid(y), P(left at right child) =
// sigmoid(z). Observations are one-hot encodings of the seven tree nodes.
class TreePolicy final : public Policy {
 public:
  TreePolicy() : TreePolicy(0.0, 0.0, 0.0) {}
  TreePolicy(double x, double y, double z);

  double x() const { return params_[0]; }
  double y() const { return params_[1]; }
  double z() const { return params_[2]; }

  int input_dim() const override { return 7; }
  int num_actions() const override { return 2; }
  std::size_t num_params() const override { return 3; }

  ActionDistribution forward(std::span<const double> obs) const override;
  ParamVector log_prob_gradient(std::span<const double> obs,
                                int action) const override;
  ParamVector entropy_gradient(std::span<const double> obs) const override;
  ParamVector flatten() const override { return params_; }
  std::unique_ptr<Policy> with_params(const ParamVector& params) const override;
  std::unique_ptr<Policy> fresh_init(Rng& rng) const override;

 private:
  int node_index(std::span<const double> obs) const;

  ParamVector params_;
};

// Copy with i.i.d. Gaussian noise of standard deviation epsilon added to
// every parameter.
std::unique_ptr<Policy> perturb_init(const Policy& policy, double epsilon,
                                     std::uint64_t seed);

// Checkpoint format: input_dim, hidden_dim, num_actions, then one parameter
// per line (W1, b1, W2, b2 order for the MLP). hidden_dim 0 marks the tree
// policy with parameters x, y, z.
void save_policy(const Policy& policy, const std::string& path);
std::unique_ptr<Policy> load_policy(const std::string& path);

double sigmoid(double u);

}  // namespace polyakgrad

#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "polyakgrad/rng.hpp"
#include "polyakgrad/vec.hpp"

namespace polyakgrad {

// Binary classification data guaranteed separable with the given margin:
// points falling inside the margin band of the sampled unit separator are
// projected onto its boundary.
struct LinearSeparableDataset {
  std::vector<std::vector<double>> features;  // n x d
  std::vector<int> labels;                    // 0 or 1
  double margin;
  std::vector<double> separator;  // the constructing unit vector
};

LinearSeparableDataset make_linearly_separable(int n, int d, double margin,
                                               std::uint64_t seed);

// Column-header CSV: f0,...,f{d-1},label.
void save_dataset_csv(const LinearSeparableDataset& data,
                      const std::string& path);

enum class ModelKind { Linear, Mlp };

// Finite sum f(x) = (1/n) sum_i loss_i(x) with per-example logistic loss,
// under either a linear model (no intercept; the data is separable through
// the origin by construction) or a one-hidden-layer tanh MLP.
struct FiniteSumProblem {
  LinearSeparableDataset data;
  ModelKind model_kind = ModelKind::Linear;
  int mlp_hidden = 16;

  int n() const { return static_cast<int>(data.labels.size()); }
  int dim() const { return static_cast<int>(data.features.at(0).size()); }
  std::size_t param_dim() const;

  // Linear models start at zero; the MLP draws Gaussian weights.
  ParamVector init_params(std::uint64_t seed) const;

  double loss(const ParamVector& x, int i) const;
  std::pair<double, ParamVector> loss_and_grad(const ParamVector& x, int i) const;
  double full_objective(const ParamVector& x) const;
};

struct TwinOptState {
  ParamVector x1;
  ParamVector x2;
  int iter = 0;
};

TwinOptState twin_opt_init(const FiniteSumProblem& problem, std::uint64_t seed,
                           double init_epsilon = 1e-3);

struct TwinStepInfo {
  double gamma;      // 0 on tie or skipped iterations
  int updated;       // 1, 2, or 0
  bool skipped;      // zero gradient with a positive gap
};

// One twin iteration: sample i, j uniformly with replacement, evaluate
// loss_i(x1) and loss_j(x2), use the lower value as the f* surrogate and
// descend the other model with the Polyak step. Defaults give the
// hyper-parameter-free variant (c = 1, no cap); pass finite gamma_b for the
// bounded variant.
TwinStepInfo twin_sps_iteration(
    TwinOptState& state, const FiniteSumProblem& problem, Rng& rng,
    double c = 1.0,
    double gamma_b = std::numeric_limits<double>::infinity());

enum class BaselineMethod { Sgd, Sps, SpsMax };

struct BaselineConfig {
  BaselineMethod method = BaselineMethod::Sgd;
  double lr = 0.1;       // sgd
  double c = 1.0;        // sps / sps_max (with f_i* = 0 under interpolation)
  double gamma_b = 10.0; // sps_max
};

struct LossSeries {
  std::string label;
  std::vector<int> iters;
  std::vector<double> f_full;
  std::vector<double> gamma;  // last step size at each evaluation point
};

// Single-sample iterations with the full objective recorded every
// eval_every iterations (and at iteration 0).
LossSeries run_baseline(const FiniteSumProblem& problem,
                        const BaselineConfig& cfg, int iters,
                        std::uint64_t seed, int eval_every = 10);

LossSeries run_twin(const FiniteSumProblem& problem, int iters,
                    std::uint64_t seed, int eval_every = 10, double c = 1.0,
                    double gamma_b = std::numeric_limits<double>::infinity(),
                    double init_epsilon = 1e-3);

void save_loss_series_csv(const std::vector<LossSeries>& series,
                          const std::string& path);

}  // namespace polyakgrad

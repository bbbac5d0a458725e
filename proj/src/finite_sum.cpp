#include "polyakgrad/finite_sum.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "polyakgrad/optim.hpp"

namespace polyakgrad {

namespace {

// log(1 + exp(-margin)), stable for large |margin|.
double logistic_loss(double margin) {
  if (margin > 0.0) {
    return std::log1p(std::exp(-margin));
  }
  return -margin + std::log1p(std::exp(margin));
}

// d loss / d margin = -sigmoid(-margin)
double logistic_loss_dmargin(double margin) {
  return -1.0 / (1.0 + std::exp(margin));
}

}  // namespace

LinearSeparableDataset make_linearly_separable(int n, int d, double margin,
                                               std::uint64_t seed) {
  if (n < 2 || d < 1 || margin <= 0.0) {
    throw std::invalid_argument("make_linearly_separable: bad arguments");
  }
  Rng rng(seed);
  LinearSeparableDataset data;
  data.margin = margin;
  data.separator.resize(d);
  double norm = 0.0;
  do {
    for (double& w : data.separator) {
      w = rng.normal();
    }
    norm = std::sqrt(squared_norm(data.separator));
  } while (norm == 0.0);
  scale(data.separator, 1.0 / norm);

  data.features.reserve(n);
  data.labels.reserve(n);
  for (int i = 0; i < n; ++i) {
    std::vector<double> x(d);
    for (double& v : x) {
      v = rng.normal();
    }
    double s = dot(x, data.separator);
    if (std::abs(s) < margin) {
      // Shift along the separator onto the margin boundary.
      double sign = s >= 0.0 ? 1.0 : -1.0;
      axpy(sign * margin - s, data.separator, x);
      s = sign * margin;
    }
    data.labels.push_back(s > 0.0 ? 1 : 0);
    data.features.push_back(std::move(x));
  }
  return data;
}

void save_dataset_csv(const LinearSeparableDataset& data,
                      const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("save_dataset_csv: cannot open " + path);
  }
  out.precision(17);
  int d = static_cast<int>(data.features.at(0).size());
  for (int j = 0; j < d; ++j) {
    out << 'f' << j << ',';
  }
  out << "label\n";
  for (std::size_t i = 0; i < data.features.size(); ++i) {
    for (double v : data.features[i]) {
      out << v << ',';
    }
    out << data.labels[i] << '\n';
  }
}

std::size_t FiniteSumProblem::param_dim() const {
  if (model_kind == ModelKind::Linear) {
    return static_cast<std::size_t>(dim());
  }
  // W1[h][d], b1[h], w2[h], b2
  return static_cast<std::size_t>(mlp_hidden) * dim() + 2 * mlp_hidden + 1;
}

ParamVector FiniteSumProblem::init_params(std::uint64_t seed) const {
  ParamVector x(param_dim(), 0.0);
  if (model_kind == ModelKind::Mlp) {
    Rng rng(seed);
    std::size_t w1 = static_cast<std::size_t>(mlp_hidden) * dim();
    for (std::size_t i = 0; i < w1; ++i) {
      x[i] = 0.1 * rng.normal();
    }
    for (int j = 0; j < mlp_hidden; ++j) {
      x[w1 + mlp_hidden + j] = 0.1 * rng.normal();  // w2
    }
  }
  return x;
}

double FiniteSumProblem::loss(const ParamVector& x, int i) const {
  return loss_and_grad(x, i).first;
}

std::pair<double, ParamVector> FiniteSumProblem::loss_and_grad(
    const ParamVector& x, int i) const {
  if (i < 0 || i >= n()) {
    throw std::invalid_argument("FiniteSumProblem: example index out of range");
  }
  if (x.size() != param_dim()) {
    throw std::invalid_argument("FiniteSumProblem: parameter dimension");
  }
  const std::vector<double>& feat = data.features[i];
  double y = data.labels[i] == 1 ? 1.0 : -1.0;

  if (model_kind == ModelKind::Linear) {
    double margin = y * dot(x, feat);
    double dmargin = logistic_loss_dmargin(margin);
    ParamVector grad(feat.size());
    for (std::size_t k = 0; k < feat.size(); ++k) {
      grad[k] = dmargin * y * feat[k];
    }
    return {logistic_loss(margin), std::move(grad)};
  }

  // One-hidden-layer tanh MLP with a scalar output logit.
  int d = dim(), h = mlp_hidden;
  const double* w1 = x.data();
  const double* b1 = w1 + static_cast<std::size_t>(h) * d;
  const double* w2 = b1 + h;
  const double* b2 = w2 + h;

  std::vector<double> hidden(h);
  double logit = *b2;
  for (int j = 0; j < h; ++j) {
    double s = b1[j];
    const double* row = w1 + static_cast<std::size_t>(j) * d;
    for (int k = 0; k < d; ++k) {
      s += row[k] * feat[k];
    }
    hidden[j] = std::tanh(s);
    logit += w2[j] * hidden[j];
  }
  double margin = y * logit;
  double dlogit = logistic_loss_dmargin(margin) * y;

  ParamVector grad(x.size(), 0.0);
  double* gw1 = grad.data();
  double* gb1 = gw1 + static_cast<std::size_t>(h) * d;
  double* gw2 = gb1 + h;
  double* gb2 = gw2 + h;
  *gb2 = dlogit;
  for (int j = 0; j < h; ++j) {
    gw2[j] = dlogit * hidden[j];
    double dpre = dlogit * w2[j] * (1.0 - hidden[j] * hidden[j]);
    gb1[j] = dpre;
    double* grow = gw1 + static_cast<std::size_t>(j) * d;
    for (int k = 0; k < d; ++k) {
      grow[k] = dpre * feat[k];
    }
  }
  return {logistic_loss(margin), std::move(grad)};
}

double FiniteSumProblem::full_objective(const ParamVector& x) const {
  double total = 0.0;
  for (int i = 0; i < n(); ++i) {
    total += loss(x, i);
  }
  return total / n();
}

TwinOptState twin_opt_init(const FiniteSumProblem& problem, std::uint64_t seed,
                           double init_epsilon) {
  if (init_epsilon < 0.0) {
    throw std::invalid_argument("twin_opt_init: init_epsilon must be >= 0");
  }
  TwinOptState state;
  state.x1 = problem.init_params(mix64(seed, 1));
  state.x2 = state.x1;
  Rng rng = Rng::stream(seed, 2);
  for (double& v : state.x2) {
    v += init_epsilon * rng.normal();
  }
  return state;
}

TwinStepInfo twin_sps_iteration(TwinOptState& state,
                                const FiniteSumProblem& problem, Rng& rng,
                                double c, double gamma_b) {
  int i = rng.uniform_int(problem.n());
  int j = rng.uniform_int(problem.n());
  double f1 = problem.loss(state.x1, i);
  double f2 = problem.loss(state.x2, j);
  state.iter += 1;
  if (f1 == f2) {
    return {0.0, 0, false};
  }

  // The lower loss is the f* surrogate; the higher-loss model descends.
  bool update_second = f2 > f1;
  ParamVector& target = update_second ? state.x2 : state.x1;
  int example = update_second ? j : i;
  auto [f_high, grad] = problem.loss_and_grad(target, example);
  double sq = squared_norm(grad);
  try {
    StepSizeRecord step =
        sps_max(f_high, std::min(f1, f2), sq, c, gamma_b);
    target = sgd_step(target, grad, step.gamma, Direction::Descend);
    return {step.gamma, update_second ? 2 : 1, false};
  } catch (const degenerate_gradient_error&) {
    return {0.0, 0, true};
  }
}

namespace {

void record_eval(LossSeries& series, const FiniteSumProblem& problem,
                 const ParamVector& x, int iter, double gamma) {
  series.iters.push_back(iter);
  series.f_full.push_back(problem.full_objective(x));
  series.gamma.push_back(gamma);
}

}  // namespace

LossSeries run_baseline(const FiniteSumProblem& problem,
                        const BaselineConfig& cfg, int iters,
                        std::uint64_t seed, int eval_every) {
  if (iters < 0 || eval_every < 1) {
    throw std::invalid_argument("run_baseline: bad iteration counts");
  }
  auto num = [](double v) {
    std::ostringstream out;
    out << v;
    return out.str();
  };
  LossSeries series;
  switch (cfg.method) {
    case BaselineMethod::Sgd:
      series.label = "sgd_lr" + num(cfg.lr);
      break;
    case BaselineMethod::Sps:
      series.label = "sps_c" + num(cfg.c);
      break;
    case BaselineMethod::SpsMax:
      series.label = "sps_max_c" + num(cfg.c);
      break;
  }
  ParamVector x = problem.init_params(mix64(seed, 1));
  Rng rng = Rng::stream(seed, 3);
  record_eval(series, problem, x, 0, 0.0);
  double last_gamma = 0.0;
  for (int k = 1; k <= iters; ++k) {
    int i = rng.uniform_int(problem.n());
    auto [f_i, grad] = problem.loss_and_grad(x, i);
    switch (cfg.method) {
      case BaselineMethod::Sgd:
        x = sgd_step(x, grad, cfg.lr, Direction::Descend);
        last_gamma = cfg.lr;
        break;
      case BaselineMethod::Sps:
      case BaselineMethod::SpsMax: {
        double sq = squared_norm(grad);
        double bound = cfg.method == BaselineMethod::Sps
                           ? std::numeric_limits<double>::infinity()
                           : cfg.gamma_b;
        try {
          // f_i* = 0: logistic loss under interpolation.
          StepSizeRecord step = sps_max(f_i, 0.0, sq, cfg.c, bound);
          x = sgd_step(x, grad, step.gamma, Direction::Descend);
          last_gamma = step.gamma;
        } catch (const degenerate_gradient_error&) {
          last_gamma = 0.0;
        }
        break;
      }
    }
    if (k % eval_every == 0) {
      record_eval(series, problem, x, k, last_gamma);
    }
  }
  return series;
}

LossSeries run_twin(const FiniteSumProblem& problem, int iters,
                    std::uint64_t seed, int eval_every, double c,
                    double gamma_b, double init_epsilon) {
  if (iters < 0 || eval_every < 1) {
    throw std::invalid_argument("run_twin: bad iteration counts");
  }
  LossSeries series;
  series.label = "twin_sps";
  TwinOptState state = twin_opt_init(problem, seed, init_epsilon);
  Rng rng = Rng::stream(seed, 3);
  record_eval(series, problem, state.x1, 0, 0.0);
  double last_gamma = 0.0;
  for (int k = 1; k <= iters; ++k) {
    TwinStepInfo info = twin_sps_iteration(state, problem, rng, c, gamma_b);
    if (info.updated != 0) {
      last_gamma = info.gamma;
    }
    if (k % eval_every == 0) {
      // Track the better of the two models.
      double f1 = problem.full_objective(state.x1);
      double f2 = problem.full_objective(state.x2);
      series.iters.push_back(k);
      series.f_full.push_back(std::min(f1, f2));
      series.gamma.push_back(last_gamma);
    }
  }
  return series;
}

void save_loss_series_csv(const std::vector<LossSeries>& series,
                          const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("save_loss_series_csv: cannot open " + path);
  }
  out.precision(17);
  out << "method,iter,f_full,gamma\n";
  for (const LossSeries& s : series) {
    for (std::size_t k = 0; k < s.iters.size(); ++k) {
      out << s.label << ',' << s.iters[k] << ',' << s.f_full[k] << ','
          << s.gamma[k] << '\n';
    }
  }
}

}  // namespace polyakgrad

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "polyakgrad/env.hpp"
#include "polyakgrad/finite_sum.hpp"
#include "polyakgrad/gradients.hpp"
#include "polyakgrad/harness.hpp"
#include "polyakgrad/metrics.hpp"
#include "polyakgrad/optim.hpp"
#include "polyakgrad/policy.hpp"
#include "polyakgrad/rollout.hpp"
#include "polyakgrad/twin_trainer.hpp"
#include "polyakgrad/two_step.hpp"

namespace py = pybind11;
using namespace polyakgrad;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Policy gradient with the stochastic Polyak step-size";

  py::register_exception<degenerate_gradient_error>(m, "DegenerateGradientError");
  py::register_exception<config_error>(m, "ConfigError");

  // --- policies -----------------------------------------------------------
  py::class_<ActionDistribution>(m, "ActionDistribution")
      .def_readonly("probs", &ActionDistribution::probs)
      .def_readonly("logits", &ActionDistribution::logits)
      .def("argmax", &ActionDistribution::argmax);

  m.def("entropy", &entropy, py::arg("dist"));

  py::class_<Policy>(m, "Policy")
      .def_property_readonly("input_dim", &Policy::input_dim)
      .def_property_readonly("num_actions", &Policy::num_actions)
      .def_property_readonly("num_params", &Policy::num_params)
      .def("forward",
           [](const Policy& p, const std::vector<double>& obs) {
             return p.forward(obs);
           },
           py::arg("obs"))
      .def("log_prob_gradient",
           [](const Policy& p, const std::vector<double>& obs, int action) {
             return p.log_prob_gradient(obs, action);
           },
           py::arg("obs"), py::arg("action"))
      .def("entropy_gradient",
           [](const Policy& p, const std::vector<double>& obs) {
             return p.entropy_gradient(obs);
           },
           py::arg("obs"))
      .def("flatten", &Policy::flatten)
      .def("with_params", &Policy::with_params, py::arg("params"));

  py::class_<MlpPolicy, Policy>(m, "MlpPolicy")
      .def(py::init<int, int, int>(), py::arg("input_dim"),
           py::arg("hidden_dim"), py::arg("num_actions"))
      .def(py::init<int, int, int, ParamVector>(), py::arg("input_dim"),
           py::arg("hidden_dim"), py::arg("num_actions"), py::arg("params"))
      .def_property_readonly("hidden_dim", &MlpPolicy::hidden_dim);

  py::class_<TreePolicy, Policy>(m, "TreePolicy")
      .def(py::init<>())
      .def(py::init<double, double, double>(), py::arg("x"), py::arg("y"),
           py::arg("z"));

  m.def("perturb_init", &perturb_init, py::arg("policy"), py::arg("epsilon"),
        py::arg("seed"));
  m.def("save_policy", &save_policy, py::arg("policy"), py::arg("path"));
  m.def("load_policy", &load_policy, py::arg("path"));

  // --- environments ---------------------------------------------------------
  py::class_<EnvSpec>(m, "EnvSpec")
      .def_readonly("obs_dim", &EnvSpec::obs_dim)
      .def_readonly("num_actions", &EnvSpec::num_actions)
      .def_readonly("max_horizon", &EnvSpec::max_horizon)
      .def_readonly("name", &EnvSpec::name);

  py::class_<StepResult>(m, "StepResult")
      .def_readonly("next_obs", &StepResult::next_obs)
      .def_readonly("reward", &StepResult::reward)
      .def_readonly("done", &StepResult::done);

  py::class_<Environment>(m, "Environment")
      .def_property_readonly("spec", &Environment::spec)
      .def("reset", &Environment::reset, py::arg("seed"))
      .def("step", &Environment::step, py::arg("action"));

  m.def(
      "make_env",
      [](const std::string& name, const std::vector<double>& leaf_rewards,
         int horizon) {
        EnvOptions opts;
        if (!leaf_rewards.empty()) {
          opts.two_step_leaf_rewards = leaf_rewards;
        }
        opts.horizon_override = horizon;
        return make_env(name, opts);
      },
      py::arg("name"), py::arg("leaf_rewards") = std::vector<double>{},
      py::arg("horizon") = 0);

  // --- rollouts -------------------------------------------------------------
  py::class_<TrajectoryStep>(m, "TrajectoryStep")
      .def_readonly("obs", &TrajectoryStep::obs)
      .def_readonly("action", &TrajectoryStep::action)
      .def_readonly("reward", &TrajectoryStep::reward);

  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("steps", &Trajectory::steps)
      .def_readonly("truncated", &Trajectory::truncated);

  py::class_<ObjectiveEstimate>(m, "ObjectiveEstimate")
      .def_readonly("v_hat", &ObjectiveEstimate::v_hat)
      .def_readonly("entropy_hat", &ObjectiveEstimate::entropy_hat)
      .def_readonly("alpha", &ObjectiveEstimate::alpha)
      .def_readonly("l_hat", &ObjectiveEstimate::l_hat)
      .def_readonly("num_trajectories", &ObjectiveEstimate::num_trajectories);

  m.def(
      "sample_trajectories",
      [](Environment& env, const Policy& policy, int m_, int horizon,
         std::uint64_t seed) {
        return sample_trajectories(env, policy, m_, horizon, seed);
      },
      py::arg("env"), py::arg("policy"), py::arg("m"), py::arg("horizon"),
      py::arg("seed"));
  m.def("discounted_return", &discounted_return, py::arg("trajectory"),
        py::arg("gamma"));
  m.def("estimate_objective", &estimate_objective, py::arg("trajectories"),
        py::arg("policy"), py::arg("gamma"), py::arg("alpha"));
  m.def(
      "evaluate_greedy",
      [](Environment& env, const Policy& policy,
         const std::vector<std::uint64_t>& seeds) {
        return evaluate_greedy(env, policy, seeds);
      },
      py::arg("env"), py::arg("policy"), py::arg("seeds"));

  // --- gradient estimators ---------------------------------------------------
  py::class_<GradientEstimate>(m, "GradientEstimate")
      .def_readonly("grad", &GradientEstimate::grad)
      .def_readonly("sq_norm", &GradientEstimate::sq_norm)
      .def_readonly("num_trajectories", &GradientEstimate::num_trajectories);

  m.def("gpomdp", &gpomdp, py::arg("trajectories"), py::arg("policy"),
        py::arg("gamma"));
  m.def("objective_gradient", &objective_gradient, py::arg("trajectories"),
        py::arg("policy"), py::arg("gamma"), py::arg("alpha"));

  py::class_<TwoStepEnv, Environment>(m, "TwoStepEnv");
  py::class_<EnumeratedTrajectory>(m, "EnumeratedTrajectory")
      .def_readonly("trajectory", &EnumeratedTrajectory::trajectory)
      .def_readonly("probability", &EnumeratedTrajectory::probability)
      .def_readonly("ret", &EnumeratedTrajectory::ret);

  m.def(
      "enumerate_trajectories",
      [](const Environment& env, const Policy& policy, double gamma) {
        const auto* tree = dynamic_cast<const TwoStepEnv*>(&env);
        if (tree == nullptr) {
          throw std::invalid_argument(
              "enumerate_trajectories needs the twostep environment");
        }
        return enumerate_trajectories(*tree, policy, gamma);
      },
      py::arg("env"), py::arg("policy"), py::arg("gamma"));
  m.def(
      "exact_value_twostep",
      [](const Environment& env, const Policy& policy, double gamma,
         double alpha) {
        const auto* tree = dynamic_cast<const TwoStepEnv*>(&env);
        if (tree == nullptr) {
          throw std::invalid_argument(
              "exact_value_twostep needs the twostep environment");
        }
        return exact_value_twostep(*tree, policy, gamma, alpha);
      },
      py::arg("env"), py::arg("policy"), py::arg("gamma"), py::arg("alpha"));
  m.def(
      "exact_gradient_twostep",
      [](const Environment& env, const Policy& policy, double gamma,
         double alpha) {
        const auto* tree = dynamic_cast<const TwoStepEnv*>(&env);
        if (tree == nullptr) {
          throw std::invalid_argument(
              "exact_gradient_twostep needs the twostep environment");
        }
        return exact_gradient_twostep(*tree, policy, gamma, alpha);
      },
      py::arg("env"), py::arg("policy"), py::arg("gamma"), py::arg("alpha"));

  // --- step sizes -----------------------------------------------------------
  py::enum_<Direction>(m, "Direction")
      .value("ASCEND", Direction::Ascend)
      .value("DESCEND", Direction::Descend);

  py::class_<StepSizeRecord>(m, "StepSizeRecord")
      .def_readonly("gamma", &StepSizeRecord::gamma)
      .def_readonly("capped", &StepSizeRecord::capped)
      .def_readonly("numerator", &StepSizeRecord::numerator)
      .def_readonly("denom", &StepSizeRecord::denom);

  py::class_<AdamState>(m, "AdamState")
      .def(py::init<std::size_t>(), py::arg("dim"))
      .def_readonly("t", &AdamState::t);

  m.def("sgd_step", &sgd_step, py::arg("theta"), py::arg("grad"),
        py::arg("lr"), py::arg("direction"));
  m.def("adam_step", &adam_step, py::arg("state"), py::arg("theta"),
        py::arg("grad"), py::arg("lr"), py::arg("direction"));
  m.def("polyak_step", &polyak_step, py::arg("f_val"), py::arg("f_star"),
        py::arg("sq_norm"));
  m.def("sps_max", &sps_max, py::arg("f_val"), py::arg("f_star"),
        py::arg("sq_norm"), py::arg("c"), py::arg("gamma_b"));
  m.def("rl_sps_max", &rl_sps_max, py::arg("v_high"), py::arg("v_low"),
        py::arg("sq_norm"), py::arg("c"), py::arg("gamma_b"));

  // --- twin trainer ----------------------------------------------------------
  py::class_<PolyakConfig>(m, "PolyakConfig")
      .def(py::init<>())
      .def_readwrite("c", &PolyakConfig::c)
      .def_readwrite("gamma_b", &PolyakConfig::gamma_b)
      .def_readwrite("alpha", &PolyakConfig::alpha)
      .def_readwrite("m", &PolyakConfig::m)
      .def_readwrite("horizon", &PolyakConfig::horizon)
      .def_readwrite("discount", &PolyakConfig::discount)
      .def_readwrite("init_epsilon", &PolyakConfig::init_epsilon)
      .def_readwrite("stop_tol", &PolyakConfig::stop_tol)
      .def_readwrite("stop_patience", &PolyakConfig::stop_patience)
      .def_readwrite("max_iters", &PolyakConfig::max_iters);

  py::class_<TwinState>(m, "TwinState")
      .def_readonly("theta1", &TwinState::theta1)
      .def_readonly("theta2", &TwinState::theta2)
      .def_readonly("iter", &TwinState::iter)
      .def_readonly("last_gamma", &TwinState::last_gamma);

  py::class_<IterationMetrics>(m, "IterationMetrics")
      .def_readonly("iter", &IterationMetrics::iter)
      .def_readonly("l_hat_1", &IterationMetrics::l_hat_1)
      .def_readonly("l_hat_2", &IterationMetrics::l_hat_2)
      .def_readonly("gap", &IterationMetrics::gap)
      .def_readonly("gamma", &IterationMetrics::gamma)
      .def_readonly("capped", &IterationMetrics::capped)
      .def_readonly("grad_sq_norm", &IterationMetrics::grad_sq_norm)
      .def_readonly("updated_model", &IterationMetrics::updated_model)
      .def_readonly("eval_return", &IterationMetrics::eval_return);

  py::class_<TwinTrainResult>(m, "TwinTrainResult")
      .def_readonly("state", &TwinTrainResult::state)
      .def_readonly("series", &TwinTrainResult::series);

  m.def("twin_init", &twin_init, py::arg("prototype"), py::arg("seed"),
        py::arg("init_epsilon"));
  m.def(
      "twin_train",
      [](Environment& env, const Policy& prototype, const PolyakConfig& cfg,
         std::uint64_t seed, int eval_every,
         const std::vector<std::uint64_t>& eval_seeds) {
        return twin_train(env, prototype, cfg, seed,
                          EvalOptions{eval_every, eval_seeds});
      },
      py::arg("env"), py::arg("prototype"), py::arg("config"), py::arg("seed"),
      py::arg("eval_every") = 0,
      py::arg("eval_seeds") = std::vector<std::uint64_t>{});
  m.def(
      "twin_best_policy",
      [](const TwinState& state, Environment& env, const Policy& prototype,
         const std::vector<std::uint64_t>& seeds) {
        return twin_best_policy(state, env, prototype, seeds);
      },
      py::arg("state"), py::arg("env"), py::arg("prototype"), py::arg("seeds"));

  // --- finite-sum lab ---------------------------------------------------------
  py::enum_<ModelKind>(m, "ModelKind")
      .value("LINEAR", ModelKind::Linear)
      .value("MLP", ModelKind::Mlp);

  py::class_<LinearSeparableDataset>(m, "LinearSeparableDataset")
      .def_readonly("features", &LinearSeparableDataset::features)
      .def_readonly("labels", &LinearSeparableDataset::labels)
      .def_readonly("margin", &LinearSeparableDataset::margin)
      .def_readonly("separator", &LinearSeparableDataset::separator);

  m.def("make_linearly_separable", &make_linearly_separable, py::arg("n"),
        py::arg("d"), py::arg("margin"), py::arg("seed"));
  m.def("save_dataset_csv", &save_dataset_csv, py::arg("data"),
        py::arg("path"));

  py::class_<FiniteSumProblem>(m, "FiniteSumProblem")
      .def(py::init([](const LinearSeparableDataset& data, ModelKind kind,
                       int mlp_hidden) {
             FiniteSumProblem p;
             p.data = data;
             p.model_kind = kind;
             p.mlp_hidden = mlp_hidden;
             return p;
           }),
           py::arg("data"), py::arg("model_kind") = ModelKind::Linear,
           py::arg("mlp_hidden") = 16)
      .def_property_readonly("n", &FiniteSumProblem::n)
      .def_property_readonly("dim", &FiniteSumProblem::dim)
      .def_property_readonly("param_dim", &FiniteSumProblem::param_dim)
      .def("init_params", &FiniteSumProblem::init_params, py::arg("seed"))
      .def("loss", &FiniteSumProblem::loss, py::arg("x"), py::arg("i"))
      .def("loss_and_grad", &FiniteSumProblem::loss_and_grad, py::arg("x"),
           py::arg("i"))
      .def("full_objective", &FiniteSumProblem::full_objective, py::arg("x"));

  py::class_<LossSeries>(m, "LossSeries")
      .def_readonly("label", &LossSeries::label)
      .def_readonly("iters", &LossSeries::iters)
      .def_readonly("f_full", &LossSeries::f_full)
      .def_readonly("gamma", &LossSeries::gamma);

  m.def("run_twin", &run_twin, py::arg("problem"), py::arg("iters"),
        py::arg("seed"), py::arg("eval_every") = 10, py::arg("c") = 1.0,
        py::arg("gamma_b") = std::numeric_limits<double>::infinity(),
        py::arg("init_epsilon") = 1e-3);

  // --- harness ----------------------------------------------------------------
  m.def("moving_average",
        [](const std::vector<double>& series, int window) {
          return moving_average(series, window);
        },
        py::arg("series"), py::arg("window"));
}

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "vqsd/povm_circuit.hpp"
#include "vqsd/qmath.hpp"

namespace vqsd {

/// Labeled pure input states. Each sample carries a weight; by default
/// w_n = 1/|D|, so class m has prior |N_m|/|D|.
class LabeledStateSet {
 public:
  LabeledStateSet(std::vector<PureState> states, std::vector<int> labels);
  /// Explicit class priors: w_n = q_{y_n} / |N_{y_n}|.
  LabeledStateSet(std::vector<PureState> states, std::vector<int> labels,
                  std::span<const double> class_priors);

  std::size_t size() const noexcept { return states_.size(); }
  const std::vector<PureState>& states() const noexcept { return states_; }
  const std::vector<int>& labels() const noexcept { return labels_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  /// max label + 1
  std::size_t label_count() const noexcept { return label_count_; }
  std::vector<double> priors() const;

 private:
  std::vector<PureState> states_;
  std::vector<int> labels_;
  std::vector<double> weights_;
  std::size_t label_count_ = 0;
};

struct TrainConfig {
  PovmCircuitSpec circuit{1, 1, 2, {0}};
  double learning_rate = 0.05;
  /// Step size lr * tau / (tau + t) at iteration t; 0 keeps it constant.
  double learning_rate_decay = 0.0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::size_t max_iterations = 300;
  double convergence_tol = 1e-7;
  std::size_t convergence_window = 5;
  double fd_step = 1e-5;
  std::uint64_t seed = 7;
  double init_scale = 0.1;
  std::size_t restarts = 5;

  void validate() const;
};

struct TrainTrace {
  std::vector<double> cost_history;  // cost after each update
  std::size_t iterations = 0;
  bool converged = false;
  ParamVector final_theta;
  double final_cost = 1.0;
};

struct TrainResult {
  std::vector<TrainTrace> restarts;
  std::size_t best = 0;
  const TrainTrace& best_trace() const { return restarts.at(best); }
};

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 1 - sum_n w_n p(y_n | state_n) with p from the full statevector
/// simulation of the POVM circuit.
double cost(const ParamVector& theta, const LabeledStateSet& data,
            const PovmCircuitSpec& spec);

/// Same value, evaluated through the per-class target mixtures
/// R_m = sum_{y_n = m} w_n rho_{T,n}:  1 - sum_m Re Tr[E_m R_m].
/// Cost is independent of |D| once constructed; used by the training loop.
class MixtureCost {
 public:
  MixtureCost(const LabeledStateSet& data, const PovmCircuitSpec& spec);
  double operator()(const ParamVector& theta) const;
  const std::vector<ComplexMatrix>& mixtures() const noexcept { return mixtures_; }

 private:
  PovmCircuitSpec spec_;
  std::vector<ComplexMatrix> mixtures_;
};

using CostFunction = std::function<double(const ParamVector&)>;

/// Central differences (f(t + h e_k) - f(t - h e_k)) / 2h.
std::vector<double> grad_fd(const ParamVector& theta, const CostFunction& f,
                            const PovmCircuitSpec& spec, double h);
std::vector<double> grad_fd(const ParamVector& theta, const LabeledStateSet& data,
                            const PovmCircuitSpec& spec, double h = 1e-5);

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::size_t t = 0;

  explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
};

/// One bias-corrected ADAM update; returns the new parameters. The step
/// number state.t drives the optional learning-rate decay.
std::vector<double> adam_step(std::span<const double> theta, std::span<const double> grad,
                              AdamState& state, const TrainConfig& config);

/// Single optimization run from a uniform(-init_scale, init_scale) start
/// drawn with `seed`.
TrainTrace train_once(const CostFunction& f, const TrainConfig& config,
                      std::uint64_t seed);

/// config.restarts independent runs (restart r seeded with seed + r); the
/// lowest final cost wins, earliest restart on ties.
TrainResult train(const LabeledStateSet& data, const TrainConfig& config);

}  // namespace vqsd

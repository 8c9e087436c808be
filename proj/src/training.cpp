#include "vqsd/training.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vqsd/rng.hpp"

namespace vqsd {

LabeledStateSet::LabeledStateSet(std::vector<PureState> states, std::vector<int> labels)
    : states_(std::move(states)), labels_(std::move(labels)) {
  if (states_.empty()) throw std::invalid_argument("LabeledStateSet: empty");
  if (states_.size() != labels_.size())
    throw std::invalid_argument("LabeledStateSet: states/labels length mismatch");
  for (const auto& s : states_)
    if (s.n_qubits() != states_.front().n_qubits())
      throw std::invalid_argument("LabeledStateSet: states differ in qubit count");
  for (int y : labels_) {
    if (y < 0) throw std::invalid_argument("LabeledStateSet: negative label");
    label_count_ = std::max(label_count_, static_cast<std::size_t>(y) + 1);
  }
  weights_.assign(states_.size(), 1.0 / static_cast<double>(states_.size()));
}

LabeledStateSet::LabeledStateSet(std::vector<PureState> states, std::vector<int> labels,
                                 std::span<const double> class_priors)
    : LabeledStateSet(std::move(states), std::move(labels)) {
  if (class_priors.size() < label_count_)
    throw std::invalid_argument("LabeledStateSet: missing class prior");
  std::vector<std::size_t> counts(class_priors.size(), 0);
  for (int y : labels_) ++counts[static_cast<std::size_t>(y)];
  double total = 0.0;
  for (std::size_t m = 0; m < class_priors.size(); ++m) {
    if (class_priors[m] < 0.0)
      throw std::invalid_argument("LabeledStateSet: negative class prior");
    if (class_priors[m] > 0.0 && counts[m] == 0)
      throw std::invalid_argument("LabeledStateSet: class " + std::to_string(m) +
                                  " has a prior but no states");
    total += class_priors[m];
  }
  if (std::abs(total - 1.0) > 1e-10)
    throw std::invalid_argument("LabeledStateSet: class priors must sum to 1");
  for (std::size_t n = 0; n < labels_.size(); ++n) {
    const auto m = static_cast<std::size_t>(labels_[n]);
    weights_[n] = class_priors[m] / static_cast<double>(counts[m]);
  }
}

std::vector<double> LabeledStateSet::priors() const {
  std::vector<double> q(label_count_, 0.0);
  for (std::size_t n = 0; n < labels_.size(); ++n)
    q[static_cast<std::size_t>(labels_[n])] += weights_[n];
  return q;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw std::invalid_argument("TrainConfig: learning_rate <= 0");
  if (!(learning_rate_decay >= 0.0))
    throw std::invalid_argument("TrainConfig: learning_rate_decay < 0");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0))
    throw std::invalid_argument("TrainConfig: ADAM betas must lie in [0, 1)");
  if (!(adam_epsilon > 0.0)) throw std::invalid_argument("TrainConfig: adam_epsilon <= 0");
  if (!(convergence_tol > 0.0)) throw std::invalid_argument("TrainConfig: convergence_tol <= 0");
  if (!(fd_step > 0.0)) throw std::invalid_argument("TrainConfig: fd_step <= 0");
  if (!(init_scale >= 0.0)) throw std::invalid_argument("TrainConfig: init_scale < 0");
  if (max_iterations == 0) throw std::invalid_argument("TrainConfig: max_iterations == 0");
  if (restarts == 0) throw std::invalid_argument("TrainConfig: restarts == 0");
  if (convergence_window == 0) throw std::invalid_argument("TrainConfig: convergence_window == 0");
}

namespace {

void check_labels(const LabeledStateSet& data, const PovmCircuitSpec& spec) {
  if (data.label_count() > spec.n_outcomes)
    throw std::invalid_argument("cost: label " + std::to_string(data.label_count() - 1) +
                                " out of range for " + std::to_string(spec.n_outcomes) +
                                " outcomes");
}

}  // namespace

double cost(const ParamVector& theta, const LabeledStateSet& data,
            const PovmCircuitSpec& spec) {
  check_labels(data, spec);
  double success = 0.0;
  for (std::size_t n = 0; n < data.size(); ++n) {
    const auto p = outcome_probabilities(data.states()[n], spec, theta);
    success += data.weights()[n] * p[static_cast<std::size_t>(data.labels()[n])];
  }
  return 1.0 - success;
}

MixtureCost::MixtureCost(const LabeledStateSet& data, const PovmCircuitSpec& spec)
    : spec_(spec) {
  check_labels(data, spec);
  for (std::size_t t : spec.target_qubits)
    if (t >= data.states().front().n_qubits())
      throw std::invalid_argument("MixtureCost: target qubit outside input register");
  const std::size_t d = spec.target_dim();
  mixtures_.assign(data.label_count(), ComplexMatrix(d, d));
  for (std::size_t n = 0; n < data.size(); ++n) {
    const ComplexMatrix rho = reduced_matrix(data.states()[n], spec.target_qubits);
    mixtures_[static_cast<std::size_t>(data.labels()[n])] += rho * cplx{data.weights()[n], 0.0};
  }
}

double MixtureCost::operator()(const ParamVector& theta) const {
  const PovmSet e = povm_elements(spec_, theta);
  double success = 0.0;
  for (std::size_t m = 0; m < mixtures_.size(); ++m)
    success += real_trace_product(e.elements[m], mixtures_[m]);
  return 1.0 - success;
}

std::vector<double> grad_fd(const ParamVector& theta, const CostFunction& f,
                            const PovmCircuitSpec& spec, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("grad_fd: step must be positive");
  std::vector<double> work(theta.values().begin(), theta.values().end());
  std::vector<double> g(work.size());
  for (std::size_t k = 0; k < work.size(); ++k) {
    const double orig = work[k];
    work[k] = orig + h;
    const double fp = f(ParamVector(spec, work));
    work[k] = orig - h;
    const double fm = f(ParamVector(spec, work));
    work[k] = orig;
    g[k] = (fp - fm) / (2.0 * h);
  }
  return g;
}

std::vector<double> grad_fd(const ParamVector& theta, const LabeledStateSet& data,
                            const PovmCircuitSpec& spec, double h) {
  const MixtureCost f(data, spec);
  return grad_fd(theta, CostFunction(std::cref(f)), spec, h);
}

std::vector<double> adam_step(std::span<const double> theta, std::span<const double> grad,
                              AdamState& state, const TrainConfig& config) {
  if (theta.size() != grad.size() || state.m.size() != theta.size() ||
      state.v.size() != theta.size())
    throw std::invalid_argument("adam_step: shape mismatch");
  ++state.t;
  const double b1 = config.adam_beta1, b2 = config.adam_beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.t));
  double lr = config.learning_rate;
  if (config.learning_rate_decay > 0.0)
    lr *= config.learning_rate_decay /
          (config.learning_rate_decay + static_cast<double>(state.t - 1));
  std::vector<double> out(theta.begin(), theta.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    state.m[i] = b1 * state.m[i] + (1.0 - b1) * grad[i];
    state.v[i] = b2 * state.v[i] + (1.0 - b2) * grad[i] * grad[i];
    const double mhat = state.m[i] / c1;
    const double vhat = state.v[i] / c2;
    out[i] -= lr * mhat / (std::sqrt(vhat) + config.adam_epsilon);
  }
  return out;
}

TrainTrace train_once(const CostFunction& f, const TrainConfig& config, std::uint64_t seed) {
  config.validate();
  const auto& spec = config.circuit;
  const std::size_t np = param_count(spec.n_target, spec.n_ancilla);
  Rng rng(seed);
  std::vector<double> theta(np);
  for (auto& t : theta) t = rng.uniform(-config.init_scale, config.init_scale);

  AdamState adam(np);
  std::vector<double> history;
  history.reserve(config.max_iterations);
  double prev = f(ParamVector(spec, theta));
  std::size_t streak = 0;
  bool converged = false;
  for (std::size_t it = 0; it < config.max_iterations; ++it) {
    const ParamVector current(spec, theta);
    const auto g = grad_fd(current, f, spec, config.fd_step);
    for (double gk : g)
      if (!std::isfinite(gk))
        throw TrainingError("non-finite gradient at iteration " + std::to_string(it + 1));
    theta = adam_step(theta, g, adam, config);
    const double c = f(ParamVector(spec, theta));
    if (!std::isfinite(c))
      throw TrainingError("training produced a non-finite cost at iteration " +
                          std::to_string(it + 1));
    history.push_back(c);
    streak = std::abs(c - prev) < config.convergence_tol ? streak + 1 : 0;
    prev = c;
    if (streak >= config.convergence_window) {
      converged = true;
      break;
    }
  }
  const std::size_t iters = history.size();
  const double final_cost = history.back();
  return TrainTrace{std::move(history), iters, converged, ParamVector(spec, std::move(theta)),
                    final_cost};
}

TrainResult train(const LabeledStateSet& data, const TrainConfig& config) {
  config.validate();
  const MixtureCost f(data, config.circuit);
  const CostFunction fn = std::cref(f);
  TrainResult out;
  for (std::size_t r = 0; r < config.restarts; ++r) {
    out.restarts.push_back(train_once(fn, config, config.seed + r));
    if (out.restarts.back().final_cost < out.restarts[out.best].final_cost) out.best = r;
  }
  return out;
}

}  // namespace vqsd

#include "vqsd/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <set>

#include "vqsd/encoding.hpp"

namespace vqsd {

using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

json rz(const std::string& axis, double angle) {
  return {{"rhoZeta", {{"axis", axis}, {"angle", angle}}}};
}

json preset_train() {
  // The presets are checked against optimality conditions, which need the
  // cost settled far below the default stopping tolerance; a decaying step
  // keeps ADAM from hovering around the optimum.
  return {{"maxIterations", 3000}, {"convergenceTol", 1e-14}, {"learningRateDecay", 300}};
}

const json& require(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key))
    throw ConfigError(where + ": missing \"" + key + "\"");
  return j.at(key);
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(where + ": not finite");
  return v;
}

std::size_t count(const json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<long long>() < 0)
    throw ConfigError(where + ": expected a non-negative integer");
  return j.get<std::size_t>();
}

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [k, v] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; }))
      throw ConfigError(where + ": unknown key \"" + k + "\"");
  }
}

struct RawState {
  PureState psi;
  std::vector<std::size_t> targets;
};

PureState single_qubit(char c) {
  const double r = 1.0 / std::sqrt(2.0);
  switch (c) {
    case '0': return PureState(1, {1.0, 0.0});
    case '1': return PureState(1, {0.0, 1.0});
    case '+': return PureState(1, {r, r});
    case '-': return PureState(1, {r, -r});
    default: throw ConfigError(std::string("ket: unknown symbol '") + c + "'");
  }
}

std::vector<std::size_t> all_qubits(std::size_t n) {
  std::vector<std::size_t> q(n);
  for (std::size_t i = 0; i < n; ++i) q[i] = i;
  return q;
}

ComplexMatrix parse_density(const json& j, const std::string& where) {
  check_keys(j, {"real", "imag"}, where);
  const json& re = require(j, "real", where);
  if (!re.is_array() || re.empty()) throw ConfigError(where + ": \"real\" must be a matrix");
  const std::size_t d = re.size();
  ComplexMatrix m(d, d);
  const json* im = j.contains("imag") ? &j.at("imag") : nullptr;
  if (im && (!im->is_array() || im->size() != d))
    throw ConfigError(where + ": \"imag\" shape differs from \"real\"");
  for (std::size_t r = 0; r < d; ++r) {
    if (!re[r].is_array() || re[r].size() != d)
      throw ConfigError(where + ": matrix must be square");
    if (im && (!(*im)[r].is_array() || (*im)[r].size() != d))
      throw ConfigError(where + ": \"imag\" shape differs from \"real\"");
    for (std::size_t c = 0; c < d; ++c)
      m(r, c) = cplx{number(re[r][c], where), im ? number((*im)[r][c], where) : 0.0};
  }
  return m;
}

RawState parse_state(const json& j, std::size_t index) {
  const std::string where = "states[" + std::to_string(index) + "]";
  if (!j.is_object() || j.size() != 1)
    throw ConfigError(where + ": expected exactly one constructor key");
  const auto& [kind, arg] = *j.items().begin();
  if (kind == "ket") {
    if (!arg.is_string() || arg.get<std::string>().empty())
      throw ConfigError(where + ": ket label must be a non-empty string");
    const std::string label = arg.get<std::string>();
    PureState psi = single_qubit(label[0]);
    for (std::size_t i = 1; i < label.size(); ++i) psi = psi.tensor(single_qubit(label[i]));
    return {psi, all_qubits(label.size())};
  }
  if (kind == "bell") {
    const double r = 1.0 / std::sqrt(2.0);
    const std::string name = arg.is_string() ? arg.get<std::string>() : "";
    std::vector<cplx> a;
    if (name == "phi+") a = {r, 0, 0, r};
    else if (name == "phi-") a = {r, 0, 0, -r};
    else if (name == "psi+") a = {0, r, r, 0};
    else if (name == "psi-") a = {0, r, -r, 0};
    else throw ConfigError(where + ": unknown Bell state \"" + name + "\"");
    return {PureState(2, std::move(a)), {0, 1}};
  }
  if (kind == "rhoZeta") {
    check_keys(arg, {"axis", "angle"}, where);
    const json& ax = require(arg, "axis", where);
    if (!ax.is_string()) throw ConfigError(where + ": axis must be a string");
    MixedStateSpec spec;
    try {
      spec.axis = parse_axis(ax.get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(where + ": " + e.what());
    }
    spec.angle = number(require(arg, "angle", where), where + ".angle");
    return {prepare_rho_zeta(spec), {1}};
  }
  if (kind == "density") {
    const ComplexMatrix m = parse_density(arg, where);
    try {
      const DensityMatrix rho(m);
      std::size_t n = 0;
      while ((std::size_t{1} << n) < rho.dim()) ++n;
      return {purify(rho), all_qubits(n)};
    } catch (const std::invalid_argument& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  throw ConfigError(where + ": unknown state constructor \"" + kind + "\"");
}

// Moves `targets` to the front (in order) and pads to `width` qubits.
PureState align(const RawState& s, std::size_t width) {
  const std::size_t n = s.psi.n_qubits();
  std::vector<std::size_t> order = s.targets;
  for (std::size_t q = 0; q < n; ++q)
    if (std::find(s.targets.begin(), s.targets.end(), q) == s.targets.end()) order.push_back(q);
  std::vector<cplx> out(std::size_t{1} << width, cplx{0.0, 0.0});
  for (std::size_t i = 0; i < s.psi.dim(); ++i) {
    std::size_t j = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t bit = (i >> (n - 1 - order[k])) & 1u;
      j |= bit << (width - 1 - k);
    }
    out[j] = s.psi[i];
  }
  return PureState(width, std::move(out));
}

}  // namespace

std::vector<std::string> preset_names() { return {"fig4a", "fig4b", "fig4c", "fig4d"}; }

json preset_config(const std::string& name) {
  json c;
  json train = preset_train();
  c["mode"] = "discriminate";
  if (name == "fig4a") {
    c["states"] = json::array({rz("z", kPi / 5), rz("x", kPi / 6)});
  } else if (name == "fig4b") {
    c["states"] = json::array({{{"ket", "0"}}, {{"ket", "1"}}, {{"ket", "+"}}});
  } else if (name == "fig4c") {
    c["states"] = json::array({rz("z", kPi / 5), rz("x", kPi / 6), rz("y", kPi / 8)});
  } else if (name == "fig4d") {
    c["states"] = json::array(
        {{{"ket", "00"}}, {{"ket", "++"}}, {{"bell", "phi+"}}, {{"bell", "psi+"}}});
  } else {
    throw ConfigError("unknown preset \"" + name + "\" (expected fig4a, fig4b, fig4c or fig4d)");
  }
  c["preset"] = name;
  c["train"] = train;
  return c;
}

EnsembleSetup build_ensemble(const json& config) {
  const json& states = require(config, "states", "config");
  if (!states.is_array() || states.size() < 2)
    throw ConfigError("config.states: need at least two states");
  std::vector<RawState> raw;
  for (std::size_t i = 0; i < states.size(); ++i) raw.push_back(parse_state(states[i], i));

  const std::size_t nt = raw.front().targets.size();
  bool same = true;
  std::size_t width = 0;
  for (const auto& r : raw) {
    if (r.targets.size() != nt)
      throw ConfigError("config.states: states act on different numbers of target qubits");
    same = same && r.psi.n_qubits() == raw.front().psi.n_qubits() &&
           r.targets == raw.front().targets;
    width = std::max(width, r.psi.n_qubits());
  }

  EnsembleSetup s;
  if (same) {
    s.target_qubits = raw.front().targets;
    for (auto& r : raw) s.inputs.push_back(r.psi);
  } else {
    s.target_qubits = all_qubits(nt);
    for (auto& r : raw) s.inputs.push_back(align(r, width));
  }
  for (const auto& psi : s.inputs)
    s.targets.emplace_back(reduced_matrix(psi, s.target_qubits));

  if (config.contains("priors")) {
    const json& p = config.at("priors");
    if (!p.is_array() || p.size() != raw.size())
      throw ConfigError("config.priors: need one prior per state");
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double q = number(p[i], "config.priors[" + std::to_string(i) + "]");
      if (q < 0.0) throw ConfigError("config.priors: negative prior");
      s.priors.push_back(q);
      total += q;
    }
    if (std::abs(total - 1.0) > 1e-10)
      throw ConfigError("config.priors: priors sum to " + std::to_string(total) + ", not 1");
  } else {
    s.priors.assign(raw.size(), 1.0 / static_cast<double>(raw.size()));
  }
  return s;
}

TrainConfig parse_train_config(const json& train, const PovmCircuitSpec& circuit,
                               std::uint64_t seed) {
  TrainConfig c;
  c.circuit = circuit;
  c.seed = seed;
  if (train.is_null()) return c;
  check_keys(train,
             {"learningRate", "learningRateDecay", "adamBeta1", "adamBeta2", "adamEpsilon", "maxIterations",
              "convergenceTol", "convergenceWindow", "fdStep", "initScale", "restarts"},
             "config.train");
  auto num = [&](const char* k, double& out) {
    if (train.contains(k)) out = number(train.at(k), std::string("config.train.") + k);
  };
  auto cnt = [&](const char* k, std::size_t& out) {
    if (train.contains(k)) out = count(train.at(k), std::string("config.train.") + k);
  };
  num("learningRate", c.learning_rate);
  num("learningRateDecay", c.learning_rate_decay);
  num("adamBeta1", c.adam_beta1);
  num("adamBeta2", c.adam_beta2);
  num("adamEpsilon", c.adam_epsilon);
  num("convergenceTol", c.convergence_tol);
  num("fdStep", c.fd_step);
  num("initScale", c.init_scale);
  cnt("maxIterations", c.max_iterations);
  cnt("convergenceWindow", c.convergence_window);
  cnt("restarts", c.restarts);
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

json train_config_json(const TrainConfig& c) {
  return {{"learningRate", c.learning_rate},   {"learningRateDecay", c.learning_rate_decay},
          {"adamBeta1", c.adam_beta1},
          {"adamBeta2", c.adam_beta2},         {"adamEpsilon", c.adam_epsilon},
          {"maxIterations", c.max_iterations}, {"convergenceTol", c.convergence_tol},
          {"convergenceWindow", c.convergence_window}, {"fdStep", c.fd_step},
          {"initScale", c.init_scale},         {"restarts", c.restarts}};
}

BaselineReport compute_baselines(const LabeledEnsemble& ens) {
  BaselineReport b;
  b.pgm_error = error_probability(ens, pretty_good_measurement(ens));
  if (ens.size() == 2) {
    b.helstrom =
        helstrom(ens.states[0], ens.states[1], ens.priors[0], ens.priors[1]).bound;
    if (ens.dim() == 2)
      b.brute_force = brute_force_two_state(ens.states[0], ens.states[1], ens.priors[0],
                                            ens.priors[1], 400);
  }
  return b;
}

namespace {

void check_mode(const json& config, const std::string& mode) {
  if (!config.is_object()) throw ConfigError("config: expected a JSON object");
  if (config.contains("mode") && config.at("mode") != mode)
    throw ConfigError("config.mode: expected \"" + mode + "\"");
}

PovmCircuitSpec circuit_for(const json& config, const EnsembleSetup& s) {
  const std::size_t l = s.inputs.size();
  std::size_t na = 0;
  while ((std::size_t{1} << na) < l) ++na;
  if (config.contains("circuit")) {
    const json& c = config.at("circuit");
    check_keys(c, {"nAncilla", "nTarget", "targetQubits"}, "config.circuit");
    if (c.contains("nAncilla")) na = count(c.at("nAncilla"), "config.circuit.nAncilla");
    if (c.contains("nTarget") &&
        count(c.at("nTarget"), "config.circuit.nTarget") != s.target_qubits.size())
      throw ConfigError("config.circuit.nTarget disagrees with the states' target qubits");
    if (c.contains("targetQubits") &&
        c.at("targetQubits") != json(s.target_qubits))
      throw ConfigError("config.circuit.targetQubits disagrees with the states");
  }
  try {
    return PovmCircuitSpec(s.target_qubits.size(), na, l, s.target_qubits);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config.circuit: ") + e.what());
  }
}

}  // namespace

DiscriminationRun run_discriminate(const json& config, std::uint64_t seed) {
  check_mode(config, "discriminate");
  check_keys(config,
             {"mode", "preset", "states", "priors", "circuit", "train", "seed", "certificateTol"},
             "config");
  const EnsembleSetup s = build_ensemble(config);
  const PovmCircuitSpec circuit = circuit_for(config, s);
  const TrainConfig train =
      parse_train_config(config.value("train", json()), circuit, seed);
  double tol = 1e-5;
  if (config.contains("certificateTol")) {
    tol = number(config.at("certificateTol"), "config.certificateTol");
    if (!(tol > 0.0)) throw ConfigError("config.certificateTol must be positive");
  }
  const LabeledEnsemble ens(s.targets, s.priors);

  std::vector<int> labels(s.inputs.size());
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<int>(i);
  const LabeledStateSet data(s.inputs, labels, s.priors);

  DiscriminationRun run{config, circuit, train, vqsd::train(data, train), {}, {}, {}, tol};
  run.config["seed"] = seed;
  run.config["train"] = train_config_json(train);
  run.config["circuit"] = {{"nTarget", circuit.n_target},
                           {"nAncilla", circuit.n_ancilla},
                           {"targetQubits", circuit.target_qubits}};
  run.config["certificateTol"] = tol;
  run.povm = povm_elements(circuit, run.result.best_trace().final_theta);
  run.baselines = compute_baselines(ens);
  run.certificate = optimality_certificate(ens, run.povm, tol);
  return run;
}

BaselinesRun run_baselines(const json& config) {
  // Discriminate configs are accepted too; only the ensemble is read.
  if (!(config.is_object() && config.value("mode", "") == "discriminate"))
    check_mode(config, "baselines");
  check_keys(config, {"mode", "preset", "states", "priors", "circuit", "train", "seed",
                      "certificateTol"},
             "config");
  const EnsembleSetup s = build_ensemble(config);
  return {config, compute_baselines(LabeledEnsemble(s.targets, s.priors))};
}

PovmCircuitSpec iris_circuit(std::size_t n_target) {
  if (n_target == 1) return PovmCircuitSpec(1, 2, 3, {1});
  if (n_target == 2) return PovmCircuitSpec(2, 2, 3, {0, 1});
  throw ConfigError("--ntarget must be 1 or 2");
}

IrisRun run_classify_iris(const IrisRunConfig& config) {
  const PovmCircuitSpec circuit = iris_circuit(config.n_target);
  if (config.folds < 2) throw ConfigError("--folds must be at least 2");
  if (config.encoder.layers < 1) throw ConfigError("--layers must be at least 1");
  if (!std::filesystem::is_regular_file(config.data))
    throw ConfigError("Iris data file not found: " + config.data.string());
  const IrisDataset data = rescale(load_iris(config.data));

  IrisRun run{{}, circuit, cross_validate(data, config.encoder, circuit, config.train,
                                          config.folds, config.seed)};
  run.config = {{"mode", "classify-iris"},
                {"data", config.data.filename().string()},
                {"nTarget", config.n_target},
                {"encoding", to_string(config.encoder.function)},
                {"layers", config.encoder.layers},
                {"folds", config.folds},
                {"seed", config.seed},
                {"circuit",
                 {{"nTarget", circuit.n_target},
                  {"nAncilla", circuit.n_ancilla},
                  {"targetQubits", circuit.target_qubits}}},
                {"train", train_config_json(config.train)}};
  return run;
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, std::uint64_t config_seed) {
  if (flag) return *flag;
  if (const char* env = std::getenv("VQSD_SEED"); env && *env) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (*end != '\0' || env[0] == '-') throw ConfigError("VQSD_SEED is not an unsigned integer");
    return v;
  }
  return config_seed;
}

}  // namespace vqsd

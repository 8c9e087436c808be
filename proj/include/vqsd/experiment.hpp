#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "vqsd/classify.hpp"
#include "vqsd/discrimination.hpp"
#include "vqsd/training.hpp"

namespace vqsd {

/// Invalid or inconsistent experiment configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// fig4a .. fig4d as full discriminate configs.
nlohmann::json preset_config(const std::string& name);
std::vector<std::string> preset_names();

/// A-priori states placed on a common input register.
struct EnsembleSetup {
  std::vector<PureState> inputs;
  std::vector<DensityMatrix> targets;  // reduced states on target_qubits
  std::vector<std::size_t> target_qubits;
  std::vector<double> priors;
};

/// Builds the states of config["states"]. Accepted entries:
///   {"ket": "0+-1"}                 product of |0>,|1>,|+>,|->
///   {"bell": "phi+|phi-|psi+|psi-"}
///   {"rhoZeta": {"axis": "x|y|z", "angle": a}}   qubit 1 of a two-qubit pair
///   {"density": {"real": [[..]], "imag": [[..]]}} purified internally
/// If the states disagree on register size or target qubits, each one is
/// permuted so its targets come first and padded with |0> qubits.
EnsembleSetup build_ensemble(const nlohmann::json& config);

/// TrainConfig defaults overridden by the camelCase keys of `train`.
TrainConfig parse_train_config(const nlohmann::json& train, const PovmCircuitSpec& circuit,
                               std::uint64_t seed);
nlohmann::json train_config_json(const TrainConfig& c);

struct BaselineReport {
  std::optional<double> helstrom;     // two states
  double pgm_error = 0.0;
  std::optional<double> brute_force;  // two single-qubit states
};

BaselineReport compute_baselines(const LabeledEnsemble& ens);

struct DiscriminationRun {
  nlohmann::json config;  // resolved config, seed included
  PovmCircuitSpec circuit;
  TrainConfig train;
  TrainResult result;
  PovmSet povm;
  BaselineReport baselines;
  CertificateReport certificate;
  double certificate_tol = 1e-5;
};

/// Validates the config, trains and evaluates. Throws ConfigError or
/// std::invalid_argument on bad input, TrainingError on training failure.
DiscriminationRun run_discriminate(const nlohmann::json& config, std::uint64_t seed);

struct BaselinesRun {
  nlohmann::json config;
  BaselineReport baselines;
};

BaselinesRun run_baselines(const nlohmann::json& config);

struct IrisRunConfig {
  std::filesystem::path data;
  std::size_t n_target = 1;
  EncoderConfig encoder;
  std::size_t folds = 5;
  std::uint64_t seed = 7;
  TrainConfig train;
};

/// Circuit of the Iris task: two ancillas, three valid outcomes; n_T = 1
/// measures input qubit 1, n_T = 2 both qubits.
PovmCircuitSpec iris_circuit(std::size_t n_target);

struct IrisRun {
  nlohmann::json config;
  PovmCircuitSpec circuit;
  CrossValidationResult cv;
};

/// Loads (ParseError / runtime_error on missing file), rescales and
/// cross-validates.
IrisRun run_classify_iris(const IrisRunConfig& config);

/// Seed resolution: explicit flag, then VQSD_SEED, then the config value.
std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, std::uint64_t config_seed);

}  // namespace vqsd

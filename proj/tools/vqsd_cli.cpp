// vqsd: variational state discrimination experiments.
//
// Exit codes: 0 success, 1 I/O or internal error, 2 invalid configuration or
// missing input data, 3 training failure. Nothing is written unless the run
// completes.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "vqsd/experiment.hpp"
#include "vqsd/result_io.hpp"

namespace {

using nlohmann::json;

enum Exit { kOk = 0, kError = 1, kConfig = 2, kTraining = 3 };

json read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw vqsd::ConfigError("cannot open config file " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw vqsd::ConfigError("config " + path + ": " + e.what());
  }
}

std::optional<std::uint64_t> seed_flag(const CLI::Option* opt, std::uint64_t value) {
  return opt->count() ? std::optional<std::uint64_t>(value) : std::nullopt;
}

std::uint64_t config_seed(const json& config) {
  if (!config.contains("seed")) return vqsd::TrainConfig{}.seed;
  const json& s = config.at("seed");
  if (!s.is_number_unsigned()) throw vqsd::ConfigError("config.seed must be an unsigned integer");
  return s.get<std::uint64_t>();
}

template <class F>
int guarded(F&& body) {
  try {
    body();
    return kOk;
  } catch (const vqsd::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  } catch (const vqsd::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  } catch (const vqsd::TrainingError& e) {
    std::cerr << "training failed: " << e.what() << "\n";
    return kTraining;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variational quantum state discrimination"};
  app.set_version_flag("--version", VQSD_VERSION);
  app.require_subcommand(1);

  auto* disc = app.add_subcommand("discriminate", "Train a POVM circuit on an ensemble");
  std::string disc_config, disc_preset, disc_out = "vqsd_out";
  std::uint64_t disc_seed = 0;
  auto* disc_cfg_opt = disc->add_option("--config", disc_config, "JSON experiment config");
  auto* disc_preset_opt =
      disc->add_option("--preset", disc_preset, "Built-in ensemble")
          ->check(CLI::IsMember({"fig4a", "fig4b", "fig4c", "fig4d"}));
  disc_cfg_opt->excludes(disc_preset_opt);
  disc->add_option("--out", disc_out, "Output directory");
  auto* disc_seed_opt = disc->add_option("--seed", disc_seed, "RNG seed");

  auto* iris = app.add_subcommand("classify-iris", "Cross-validated Iris classification");
  vqsd::IrisRunConfig iris_cfg;
  std::string iris_data = std::string(VQSD_DATA_DIR) + "/iris.csv";
  std::string iris_encoding, iris_out = "vqsd_out";
  std::uint64_t iris_seed = 0;
  iris->add_option("--data", iris_data, "Iris CSV file");
  iris->add_option("--ntarget", iris_cfg.n_target, "Target qubits of the POVM circuit")
      ->required()
      ->check(CLI::IsMember({1, 2}));
  iris->add_option("--encoding", iris_encoding, "Encoding function")
      ->required()
      ->check(CLI::IsMember({"invcoscos", "gaussian"}));
  iris->add_option("--layers", iris_cfg.encoder.layers, "Feature-map layers")->capture_default_str();
  iris->add_option("--folds", iris_cfg.folds, "Cross-validation folds")->capture_default_str();
  auto* iris_seed_opt = iris->add_option("--seed", iris_seed, "RNG seed");
  iris->add_option("--out", iris_out, "Output directory");

  auto* base = app.add_subcommand("baselines", "Helstrom, PGM and grid baselines, no training");
  std::string base_config, base_out;
  base->add_option("--config", base_config, "JSON experiment config")->required();
  base->add_option("--out", base_out, "Also write result.json here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  if (*disc) {
    return guarded([&] {
      if (!disc_cfg_opt->count() && !disc_preset_opt->count())
        throw vqsd::ConfigError("discriminate needs --config or --preset");
      json config = disc_cfg_opt->count() ? read_config(disc_config)
                                          : vqsd::preset_config(disc_preset);
      const std::uint64_t seed =
          vqsd::resolve_seed(seed_flag(disc_seed_opt, disc_seed), config_seed(config));
      const auto run = vqsd::run_discriminate(config, seed);
      vqsd::write_outputs(disc_out, vqsd::discriminate_outputs(run));
      std::printf("final cost %.10f  pgm %.10f", run.result.best_trace().final_cost,
                  run.baselines.pgm_error);
      if (run.baselines.helstrom) std::printf("  helstrom %.10f", *run.baselines.helstrom);
      std::printf("  certificate %s\n", run.certificate.pass ? "pass" : "fail");
    });
  }
  if (*iris) {
    return guarded([&] {
      iris_cfg.data = iris_data;
      iris_cfg.encoder.function = vqsd::parse_encoding(iris_encoding);
      iris_cfg.seed = vqsd::resolve_seed(seed_flag(iris_seed_opt, iris_seed), vqsd::TrainConfig{}.seed);
      const auto run = vqsd::run_classify_iris(iris_cfg);
      vqsd::write_outputs(iris_out, vqsd::iris_outputs(run));
      std::printf("mean accuracy %.4f  mean AUC %.4f\n", run.cv.mean.accuracy,
                  run.cv.mean.mean_auc);
    });
  }
  return guarded([&] {
    const auto run = vqsd::run_baselines(read_config(base_config));
    const std::string doc = vqsd::result_document(run).dump(2) + "\n";
    if (!base_out.empty()) {
      vqsd::OutputBundle b;
      b.files.emplace_back("result.json", doc);
      vqsd::write_outputs(base_out, b);
    }
    std::fputs(doc.c_str(), stdout);
  });
}

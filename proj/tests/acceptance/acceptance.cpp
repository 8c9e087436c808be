// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "vqsd/discrimination.hpp"
#include "vqsd/experiment.hpp"
#include "vqsd/povm_circuit.hpp"
#include "vqsd/rng.hpp"
#include "vqsd/training.hpp"

using namespace vqsd;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const Outcome& o, double secs) {
  std::printf("%s [%d] %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, name.c_str(),
              o.detail.c_str(), secs);
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

struct PresetRun {
  DiscriminationRun run;
  LabeledEnsemble ensemble;
  double seconds = 0.0;
};

PresetRun run_preset(const std::string& name) {
  const auto t0 = Clock::now();
  const json cfg = preset_config(name);
  auto run = run_discriminate(cfg, 7);
  const auto setup = build_ensemble(cfg);
  return {std::move(run), LabeledEnsemble(setup.targets, setup.priors), seconds_since(t0)};
}

// ---------------------------------------------------------------------------

Outcome helstrom_agreement(const PresetRun& a) {
  const double cost = a.run.result.best_trace().final_cost;
  const double bound = *a.run.baselines.helstrom;
  const double gap = std::abs(cost - bound);
  const bool fast = a.seconds < 10.0;
  return {gap <= 1e-4 && fast && a.run.train.restarts == 5,
          "cost " + fmt("%.10f", cost) + ", bound " + fmt("%.10f", bound) + ", gap " +
              fmt("%.2e", gap) + " (<= 1e-4), runtime " + fmt("%.2f", a.seconds) +
              " s (< 10 s)"};
}

Outcome three_state_optimum(const PresetRun& b) {
  const double cost = b.run.result.best_trace().final_cost;
  const ComplexMatrix target[3] = {ComplexMatrix{{1, 0}, {0, 0}}, ComplexMatrix{{0, 0}, {0, 1}},
                                   ComplexMatrix(2, 2)};
  std::size_t perm[3] = {0, 1, 2};
  double best = 1e9;
  do {
    double d = 0.0;
    for (int m = 0; m < 3; ++m) d = std::max(d, max_abs_diff(b.run.povm.elements[perm[m]], target[m]));
    best = std::min(best, d);
  } while (std::next_permutation(perm, perm + 3));
  const bool ok = std::abs(cost - 1.0 / 3.0) <= 1e-3 && best <= 1e-2 && b.seconds < 30.0;
  return {ok, "cost " + fmt("%.8f", cost) + " (1/3 +- 1e-3), POVM distance " + fmt("%.2e", best) +
                  " (<= 1e-2), runtime " + fmt("%.2f", b.seconds) + " s (< 30 s)"};
}

Outcome pgm_dominance(const std::map<std::string, PresetRun>& runs) {
  bool ok = true;
  std::string detail;
  for (const char* name : {"fig4b", "fig4c", "fig4d"}) {
    const auto& r = runs.at(name).run;
    const double cost = r.result.best_trace().final_cost;
    const double gap = r.baselines.pgm_error - cost;
    bool this_ok = cost <= r.baselines.pgm_error + 1e-6;
    if (std::string(name) == "fig4b") this_ok = this_ok && gap >= 1e-3;
    ok = ok && this_ok;
    detail += std::string(detail.empty() ? "" : "; ") + name + " cost " + fmt("%.8f", cost) +
              " pgm " + fmt("%.8f", r.baselines.pgm_error);
  }
  return {ok, detail};
}

Outcome certificates(const std::map<std::string, PresetRun>& runs) {
  bool ok = true;
  std::string detail;
  for (const auto& [name, r] : runs) {
    const auto c = optimality_certificate(r.ensemble, r.run.povm, 1e-4);
    ok = ok && c.pass;
    detail += std::string(detail.empty() ? "" : "; ") + name + " residual " +
              fmt("%.1e", c.pairwise_residual_max) + " dual " +
              fmt("%.1e", c.dual_min_eigenvalue);
  }
  return {ok, detail + " (tol 1e-4)"};
}

json matrix_json(const ComplexMatrix& m) {
  json re = json::array(), im = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json a = json::array(), b = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) {
      a.push_back(m(r, c).real());
      b.push_back(m(r, c).imag());
    }
    re.push_back(a);
    im.push_back(b);
  }
  return {{"real", re}, {"imag", im}};
}

DensityMatrix random_qubit(Rng& rng) {
  double x = rng.normal(), y = rng.normal(), z = rng.normal();
  const double n = std::sqrt(x * x + y * y + z * z);
  const double r = std::cbrt(rng.uniform());  // uniform in the Bloch ball
  x *= r / n;
  y *= r / n;
  z *= r / n;
  return DensityMatrix(ComplexMatrix{{0.5 * (1 + z), cplx{0.5 * x, -0.5 * y}},
                                     {cplx{0.5 * x, 0.5 * y}, 0.5 * (1 - z)}});
}

Outcome oracle_triangle() {
  Rng rng(20250);
  double worst_hb = 0.0, worst_train = 0.0;
  for (int rep = 0; rep < 25; ++rep) {
    const auto r0 = random_qubit(rng), r1 = random_qubit(rng);
    const double q0 = rng.uniform(0.2, 0.8);
    json cfg = {{"mode", "discriminate"},
                {"states", {{{"density", matrix_json(r0.matrix())}},
                            {{"density", matrix_json(r1.matrix())}}}},
                {"priors", {q0, 1.0 - q0}}};
    const auto run = run_discriminate(cfg, 7);
    const double hb = *run.baselines.helstrom, bf = *run.baselines.brute_force;
    const double cost = run.result.best_trace().final_cost;
    worst_hb = std::max(worst_hb, std::abs(hb - bf));
    worst_train = std::max({worst_train, std::abs(cost - hb), std::abs(cost - bf)});
  }
  return {worst_hb <= 2e-4 && worst_train <= 1e-3,
          "max |helstrom - grid| " + fmt("%.2e", worst_hb) + " (<= 2e-4), max |trained - oracle| " +
              fmt("%.2e", worst_train) + " (<= 1e-3)"};
}

Outcome structural_invariants() {
  const PovmCircuitSpec specs[] = {PovmCircuitSpec(1, 1, 2, {1}), PovmCircuitSpec(1, 2, 3, {1}),
                                   PovmCircuitSpec(2, 2, 4, {1, 2})};
  Rng rng(606);
  double kraus = 0, complete = 0, psd = 0, path = 0, cost_excess = 0, identity = 0;
  const int draws = 240;
  for (int d = 0; d < draws; ++d) {
    const auto& spec = specs[d % 3];
    std::vector<double> th(param_count(spec.n_target, spec.n_ancilla));
    for (double& t : th) t = rng.uniform(-3.0, 3.0);
    const ParamVector theta(spec, th);

    const auto k = kraus_operators(spec, theta);
    ComplexMatrix sum(spec.target_dim(), spec.target_dim());
    for (const auto& op : k.operators) sum += adjoint_times(op, op);
    kraus = std::max(kraus, max_abs_diff(sum, ComplexMatrix::identity(spec.target_dim())));
    const auto povm = povm_elements(k);
    complete = std::max(complete, povm.completeness_error());
    psd = std::max(psd, -povm.min_eigenvalue());

    // random inputs with one spectator qubit in front of the targets
    const std::size_t nq = spec.n_target + 1;
    std::vector<PureState> inputs;
    std::vector<int> labels;
    std::vector<DensityMatrix> reduced;
    for (std::size_t m = 0; m < spec.n_outcomes; ++m) {
      std::vector<cplx> a(std::size_t{1} << nq);
      double n = 0;
      for (auto& x : a) {
        x = {rng.normal(), rng.normal()};
        n += std::norm(x);
      }
      for (auto& x : a) x /= std::sqrt(n);
      inputs.emplace_back(nq, a);
      labels.push_back(static_cast<int>(m));
      reduced.emplace_back(reduced_matrix(inputs.back(), spec.target_qubits));
      const auto p = outcome_probabilities(inputs.back(), spec, theta);
      for (std::size_t o = 0; o < p.size(); ++o)
        path = std::max(path, std::abs(p[o] - real_trace_product(povm.elements[o],
                                                                 reduced.back().matrix())));
    }
    const LabeledStateSet data(inputs, labels);
    const double c = cost(theta, data, spec);
    cost_excess = std::max({cost_excess, -c, c - 1.0});
    identity = std::max(identity, std::abs(c - error_probability(
                                                   LabeledEnsemble::equiprobable(reduced), povm)));
  }
  const bool ok = kraus <= 1e-10 && complete <= 1e-10 && psd <= 1e-10 && path <= 1e-9 &&
                  cost_excess <= 1e-12 && identity <= 1e-10;
  return {ok, std::to_string(draws) + " draws; Kraus " + fmt("%.1e", kraus) + ", POVM " +
                  fmt("%.1e", complete) + ", PSD " + fmt("%.1e", psd) + ", paths " +
                  fmt("%.1e", path) + ", cost range " + fmt("%.1e", cost_excess) +
                  ", cost vs error " + fmt("%.1e", identity)};
}

struct IrisOutcome {
  double accuracy = 0.0;
  double auc = 0.0;
  double seconds = 0.0;
};

IrisOutcome iris(std::size_t n_target, EncodingFunction f) {
  const auto t0 = Clock::now();
  IrisRunConfig cfg;
  cfg.data = fs::path(VQSD_DATA_DIR) / "iris.csv";
  cfg.n_target = n_target;
  cfg.encoder.function = f;
  const auto run = run_classify_iris(cfg);
  return {run.cv.mean.accuracy, run.cv.mean.mean_auc, seconds_since(t0)};
}

Outcome iris_classification() {
  const auto one = iris(1, EncodingFunction::InvCosCos);
  const auto two = iris(2, EncodingFunction::Gaussian);
  const bool ok = one.accuracy >= 0.85 && two.accuracy >= 0.88 && one.auc >= 0.95 &&
                  two.auc >= 0.95 && one.seconds + two.seconds < 1800.0;
  return {ok, "1 target/invcoscos accuracy " + fmt("%.4f", one.accuracy) + " (>= 0.85) AUC " +
                  fmt("%.4f", one.auc) + "; 2 targets/gaussian accuracy " +
                  fmt("%.4f", two.accuracy) + " (>= 0.88) AUC " + fmt("%.4f", two.auc) +
                  " (AUC >= 0.95)"};
}

Outcome convergence_shape(const PresetRun& a) {
  std::size_t best_entry = SIZE_MAX;
  for (const auto& t : a.run.result.restarts) {
    const auto& h = t.cost_history;
    // first iteration after which the history stays within 1e-3 of its end
    std::size_t entry = h.size();
    while (entry > 0 && std::abs(h[entry - 1] - t.final_cost) <= 1e-3) --entry;
    best_entry = std::min(best_entry, entry + 1);
  }
  return {best_entry <= 150 && a.run.result.restarts.size() == 5,
          "earliest settling iteration " + std::to_string(best_entry) + " (<= 150)"};
}

// ---------------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run_cli(const std::string& cli, const std::string& args) {
  const std::string cmd = "\"" + cli + "\" " + args + " > /dev/null 2>&1";
  return std::system(cmd.c_str());
}

Outcome determinism(const std::string& cli, const fs::path& work) {
  const std::vector<std::pair<std::string, std::string>> cases = {
      {"fig4a", "discriminate --preset fig4a --seed 11"},
      {"fig4b", "discriminate --preset fig4b"},
      {"iris", "classify-iris --ntarget 1 --encoding invcoscos --seed 3"}};
  bool ok = true;
  std::string detail;
  for (const auto& [tag, args] : cases) {
    std::vector<json> docs;
    std::vector<std::map<std::string, std::string>> side;
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path out = work / (tag + "_" + std::to_string(rep));
      fs::remove_all(out);
      if (run_cli(cli, args + " --out \"" + out.string() + "\"") != 0) {
        ok = false;
        detail += tag + ": CLI failed; ";
        break;
      }
      json doc = json::parse(slurp(out / "result.json"));
      doc["runMetadata"].erase("timestamp");
      docs.push_back(doc);
      std::map<std::string, std::string> files;
      for (const auto& e : fs::directory_iterator(out))
        if (e.path().filename() != "result.json") files[e.path().filename()] = slurp(e.path());
      side.push_back(files);
    }
    if (docs.size() != 2) continue;
    const bool same = docs[0] == docs[1] && side[0] == side[1];
    ok = ok && same;
    detail += tag + (same ? " identical; " : " DIFFERS; ");
  }
  return {ok, detail + "timestamps ignored"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vqsd acceptance checks"};
  std::string cli, work = "acceptance_work";
  app.add_option("--cli", cli, "Path to the vqsd executable")->required();
  app.add_option("--work", work, "Scratch directory");
  CLI11_PARSE(app, argc, argv);
  fs::create_directories(work);

  std::map<std::string, PresetRun> presets;
  double preset_secs = 0.0;
  for (const auto& name : preset_names()) {
    presets.emplace(name, run_preset(name));
    preset_secs += presets.at(name).seconds;
  }

  report(1, "Helstrom agreement on fig4a", helstrom_agreement(presets.at("fig4a")),
         presets.at("fig4a").seconds);
  report(2, "three-state optimum on fig4b", three_state_optimum(presets.at("fig4b")),
         presets.at("fig4b").seconds);
  report(3, "PGM dominance", pgm_dominance(presets), preset_secs);
  report(4, "optimality certificates", certificates(presets), preset_secs);

  auto t0 = Clock::now();
  {
    const auto o = oracle_triangle();
    const double s = seconds_since(t0);
    report(5, "oracle triangle",
           {o.pass && s < 300.0, o.detail + ", runtime " + fmt("%.1f", s) + " s (< 300 s)"}, s);
  }
  t0 = Clock::now();
  {
    const auto o = structural_invariants();
    const double s = seconds_since(t0);
    report(6, "structural invariants",
           {o.pass && s < 60.0, o.detail + ", runtime " + fmt("%.1f", s) + " s (< 60 s)"}, s);
  }
  t0 = Clock::now();
  {
    const auto o = iris_classification();
    report(7, "Iris classification", o, seconds_since(t0));
  }
  report(8, "convergence shape on fig4a", convergence_shape(presets.at("fig4a")),
         presets.at("fig4a").seconds);
  t0 = Clock::now();
  report(9, "CLI determinism", determinism(cli, work), seconds_since(t0));

  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

#include "vqsd/result_io.hpp"

#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace vqsd {

using nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, ptr);
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot rename onto " + path.string() + ": " + ec.message());
  }
}

namespace {

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json restarts_json(const TrainResult& r) {
  json a = json::array();
  for (std::size_t i = 0; i < r.restarts.size(); ++i) {
    const auto& t = r.restarts[i];
    a.push_back({{"index", i},
                 {"finalCost", t.final_cost},
                 {"iterations", t.iterations},
                 {"converged", t.converged}});
  }
  return a;
}

}  // namespace

json run_metadata(const std::string& mode, std::uint64_t seed, const json& config) {
  return {{"artifact", "vqsd"},
          {"version", VQSD_VERSION},
          {"mode", mode},
          {"seed", seed},
          {"config", config},
          {"timestamp", utc_timestamp()}};
}

json matrix_json(const ComplexMatrix& m) {
  json re = json::array(), im = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json rr = json::array(), ii = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) {
      rr.push_back(m(r, c).real());
      ii.push_back(m(r, c).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ii));
  }
  return {{"real", std::move(re)}, {"imag", std::move(im)}};
}

json to_json(const BaselineReport& b) {
  json j;
  j["helstrom"] = b.helstrom ? json(*b.helstrom) : json(nullptr);
  j["pgmError"] = b.pgm_error;
  j["bruteForce"] = b.brute_force ? json(*b.brute_force) : json(nullptr);
  return j;
}

json to_json(const CertificateReport& c, double tol) {
  return {{"pairwiseResidualMax", c.pairwise_residual_max},
          {"dualMinEigenvalue", c.dual_min_eigenvalue},
          {"tolerance", tol},
          {"pass", c.pass}};
}

json to_json(const RocCurve& r) {
  json pts = json::array();
  for (const auto& p : r.points) pts.push_back(json::array({p.fpr, p.tpr}));
  return {{"points", std::move(pts)}, {"auc", r.auc}};
}

namespace {

json metrics_json(const Metrics& m) {
  return {{"accuracy", m.accuracy}, {"perClassAuc", m.per_class_auc}, {"meanAuc", m.mean_auc}};
}

}  // namespace

json result_document(const DiscriminationRun& run) {
  const auto& best = run.result.best_trace();
  json povm = json::array();
  for (const auto& e : run.povm.elements) povm.push_back(matrix_json(e));
  return {{"runMetadata", run_metadata("discriminate", run.train.seed, run.config)},
          {"finalCost", best.final_cost},
          {"baselines", to_json(run.baselines)},
          {"certificate", to_json(run.certificate, run.certificate_tol)},
          {"povmMatrices", std::move(povm)},
          {"costHistory", best.cost_history},
          {"bestRestart", run.result.best},
          {"restarts", restarts_json(run.result)},
          {"finalTheta", std::vector<double>(best.final_theta.values().begin(),
                                             best.final_theta.values().end())}};
}

json result_document(const BaselinesRun& run) {
  return {{"runMetadata", run_metadata("baselines", run.config.value("seed", 0), run.config)},
          {"baselines", to_json(run.baselines)}};
}

json result_document(const IrisRun& run) {
  json folds = json::array();
  for (const auto& f : run.cv.folds) {
    json roc = json::array();
    for (const auto& r : f.roc) roc.push_back(to_json(r));
    folds.push_back({{"fold", f.fold},
                     {"seed", f.seed},
                     {"testSize", f.test_indices.size()},
                     {"metrics", metrics_json(f.metrics)},
                     {"finalCost", f.training.best_trace().final_cost},
                     {"bestRestart", f.training.best},
                     {"restarts", restarts_json(f.training)},
                     {"roc", std::move(roc)}});
  }
  json mean_roc = json::array();
  for (const auto& r : run.cv.mean_roc) mean_roc.push_back(to_json(r));
  return {{"runMetadata",
           run_metadata("classify-iris", run.config.at("seed").get<std::uint64_t>(), run.config)},
          {"classification",
           {{"folds", std::move(folds)},
            {"mean", metrics_json(run.cv.mean)},
            {"meanRoc", std::move(mean_roc)}}}};
}

std::string cost_history_csv(const std::vector<double>& history) {
  std::string s = "iteration,cost\n";
  for (std::size_t i = 0; i < history.size(); ++i)
    s += std::to_string(i + 1) + "," + format_double(history[i]) + "\n";
  return s;
}

std::string roc_csv(const RocCurve& roc) {
  std::string s = "fpr,tpr\n";
  for (const auto& p : roc.points) s += format_double(p.fpr) + "," + format_double(p.tpr) + "\n";
  return s;
}

std::string predictions_csv(const FoldResult& fold, std::size_t valid_labels) {
  std::string s = "index,truth,predicted";
  for (std::size_t m = 0; m < valid_labels; ++m) s += ",p" + std::to_string(m);
  s += "\n";
  for (std::size_t n = 0; n < fold.test_indices.size(); ++n) {
    s += std::to_string(fold.test_indices[n]) + "," + std::to_string(fold.truth[n]) + "," +
         std::to_string(fold.predicted[n]);
    for (std::size_t m = 0; m < valid_labels; ++m)
      s += "," + format_double(fold.probabilities[n][m]);
    s += "\n";
  }
  return s;
}

OutputBundle discriminate_outputs(const DiscriminationRun& run) {
  OutputBundle b;
  b.files.emplace_back("result.json", result_document(run).dump(2) + "\n");
  b.files.emplace_back("cost_history.csv", cost_history_csv(run.result.best_trace().cost_history));
  return b;
}

OutputBundle iris_outputs(const IrisRun& run) {
  OutputBundle b;
  b.files.emplace_back("result.json", result_document(run).dump(2) + "\n");
  for (std::size_t m = 0; m < run.cv.mean_roc.size(); ++m)
    b.files.emplace_back("roc_class" + std::to_string(m) + ".csv", roc_csv(run.cv.mean_roc[m]));
  for (const auto& f : run.cv.folds)
    b.files.emplace_back("predictions_fold" + std::to_string(f.fold) + ".csv",
                         predictions_csv(f, run.circuit.n_outcomes));
  return b;
}

void write_outputs(const std::filesystem::path& dir, const OutputBundle& bundle) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, content] : bundle.files) write_atomic(dir / name, content);
}

}  // namespace vqsd

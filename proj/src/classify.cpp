#include "vqsd/classify.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include "vqsd/rng.hpp"

namespace vqsd {

std::vector<FoldSplit> stratified_kfold(std::span<const int> labels, std::size_t k,
                                        std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("stratified_kfold: k must be at least 2");
  int max_label = -1;
  for (int y : labels) {
    if (y < 0) throw std::invalid_argument("stratified_kfold: negative label");
    max_label = std::max(max_label, y);
  }
  std::vector<std::vector<std::size_t>> classes(static_cast<std::size_t>(max_label + 1));
  for (std::size_t n = 0; n < labels.size(); ++n)
    classes[static_cast<std::size_t>(labels[n])].push_back(n);

  Rng rng(seed);
  std::vector<FoldSplit> folds(k);
  std::size_t offset = 0;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    auto& members = classes[c];
    if (members.empty()) continue;
    if (members.size() < k)
      throw std::invalid_argument("stratified_kfold: class " + std::to_string(c) + " has " +
                                  std::to_string(members.size()) + " members, fewer than k = " +
                                  std::to_string(k));
    // Fisher-Yates, written out so the permutation is library independent.
    for (std::size_t i = members.size() - 1; i > 0; --i)
      std::swap(members[i], members[rng.below(i + 1)]);
    for (std::size_t i = 0; i < members.size(); ++i)
      folds[(offset + i) % k].test.push_back(members[i]);
    offset = (offset + members.size()) % k;
  }

  for (auto& f : folds) {
    std::sort(f.test.begin(), f.test.end());
    std::vector<char> in_test(labels.size(), 0);
    for (auto i : f.test) in_test[i] = 1;
    for (std::size_t n = 0; n < labels.size(); ++n)
      if (!in_test[n]) f.train.push_back(n);
  }
  return folds;
}

int predict_label(std::span<const double> p, std::size_t valid_labels) {
  if (valid_labels == 0 || valid_labels > p.size())
    throw std::invalid_argument("predict_label: valid label count out of range");
  std::size_t best = 0;
  for (std::size_t m = 1; m < valid_labels; ++m)
    if (p[m] > p[best]) best = m;
  return static_cast<int>(best);
}

double accuracy(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.size() != truth.size())
    throw std::invalid_argument("accuracy: length mismatch");
  if (truth.empty()) throw std::invalid_argument("accuracy: empty input");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i];
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

namespace {

double trapezoid(const std::vector<RocPoint>& pts) {
  double area = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i)
    area += (pts[i].fpr - pts[i - 1].fpr) * (pts[i].tpr + pts[i - 1].tpr) / 2.0;
  return area;
}

}  // namespace

RocCurve roc_auc_ovr(std::span<const double> class_scores, std::span<const int> truth,
                     int positive_class) {
  if (class_scores.size() != truth.size())
    throw std::invalid_argument("roc_auc_ovr: scores/truth length mismatch");
  std::size_t pos = 0;
  for (int y : truth) pos += y == positive_class;
  const std::size_t neg = truth.size() - pos;
  if (pos == 0 || neg == 0)
    throw std::invalid_argument("roc_auc_ovr: truth contains a single class");

  std::vector<std::size_t> order(truth.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return class_scores[a] > class_scores[b];
  });

  RocCurve roc;
  roc.points.push_back({0.0, 0.0});
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double s = class_scores[order[i]];
    for (; i < order.size() && class_scores[order[i]] == s; ++i)
      (truth[order[i]] == positive_class ? tp : fp) += 1;
    roc.points.push_back({static_cast<double>(fp) / static_cast<double>(neg),
                          static_cast<double>(tp) / static_cast<double>(pos)});
  }
  roc.auc = trapezoid(roc.points);
  return roc;
}

RocCurve roc_auc_ovr(const std::vector<std::vector<double>>& scores,
                     std::span<const int> truth, int positive_class) {
  if (positive_class < 0) throw std::invalid_argument("roc_auc_ovr: negative class");
  std::vector<double> col(scores.size());
  for (std::size_t n = 0; n < scores.size(); ++n) {
    if (static_cast<std::size_t>(positive_class) >= scores[n].size())
      throw std::invalid_argument("roc_auc_ovr: class outside score vector");
    col[n] = scores[n][static_cast<std::size_t>(positive_class)];
  }
  return roc_auc_ovr(col, truth, positive_class);
}

double tpr_at(const RocCurve& curve, double fpr) {
  double best = 0.0;
  bool found = false;
  const auto& p = curve.points;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    const double a = p[i].fpr, b = p[i + 1].fpr;
    if (fpr < a || fpr > b) continue;
    const double v = b > a ? p[i].tpr + (p[i + 1].tpr - p[i].tpr) * (fpr - a) / (b - a)
                           : std::max(p[i].tpr, p[i + 1].tpr);
    best = found ? std::max(best, v) : v;
    found = true;
  }
  if (!found) throw std::invalid_argument("tpr_at: fpr outside curve");
  return best;
}

RocCurve mean_roc(std::span<const RocCurve> curves, std::size_t grid) {
  if (curves.empty()) throw std::invalid_argument("mean_roc: no curves");
  if (grid < 2) throw std::invalid_argument("mean_roc: grid needs two points");
  RocCurve out;
  for (std::size_t i = 0; i < grid; ++i) {
    const double f = static_cast<double>(i) / static_cast<double>(grid - 1);
    double t = 0.0;
    for (const auto& c : curves) t += tpr_at(c, f);
    t /= static_cast<double>(curves.size());
    if (i == 0) t = 0.0;
    if (i == grid - 1) t = 1.0;
    out.points.push_back({f, t});
  }
  out.auc = trapezoid(out.points);
  return out;
}

std::vector<PureState> encode_points(const IrisDataset& data, std::span<const std::size_t> idx,
                                     const EncoderConfig& encoder) {
  std::vector<PureState> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(feature_map(encode(encoder.function, data.points.at(i)),
                                               encoder.layers));
  return out;
}

namespace {

FoldResult run_fold(const IrisDataset& data, const FoldSplit& split, std::size_t fold,
                    const EncoderConfig& encoder, const PovmCircuitSpec& circuit,
                    TrainConfig train, std::uint64_t seed) {
  FoldResult r;
  r.fold = fold;
  r.seed = seed;
  train.circuit = circuit;
  train.seed = seed;

  std::vector<int> train_labels;
  for (auto i : split.train) train_labels.push_back(data.labels.at(i));
  const LabeledStateSet train_set(encode_points(data, split.train, encoder), train_labels);
  r.training = vqsd::train(train_set, train);
  const ParamVector& theta = r.training.best_trace().final_theta;

  r.test_indices = split.test;
  const auto test_states = encode_points(data, split.test, encoder);
  for (std::size_t n = 0; n < split.test.size(); ++n) {
    r.truth.push_back(data.labels.at(split.test[n]));
    r.probabilities.push_back(outcome_probabilities(test_states[n], circuit, theta));
    r.predicted.push_back(predict_label(r.probabilities.back(), circuit.n_outcomes));
  }
  r.metrics.accuracy = accuracy(r.predicted, r.truth);
  for (std::size_t m = 0; m < circuit.n_outcomes; ++m) {
    r.roc.push_back(roc_auc_ovr(r.probabilities, r.truth, static_cast<int>(m)));
    r.metrics.per_class_auc.push_back(r.roc.back().auc);
  }
  r.metrics.mean_auc =
      std::accumulate(r.metrics.per_class_auc.begin(), r.metrics.per_class_auc.end(), 0.0) /
      static_cast<double>(r.metrics.per_class_auc.size());
  return r;
}

}  // namespace

CrossValidationResult cross_validate(const IrisDataset& data, const EncoderConfig& encoder,
                                     const PovmCircuitSpec& circuit, TrainConfig train,
                                     std::size_t k, std::uint64_t seed) {
  if (data.points.size() != data.labels.size())
    throw std::invalid_argument("cross_validate: points/labels length mismatch");
  for (int y : data.labels)
    if (y < 0 || static_cast<std::size_t>(y) >= circuit.n_outcomes)
      throw std::invalid_argument("cross_validate: label " + std::to_string(y) +
                                  " outside the circuit's valid outcomes");
  const auto splits = stratified_kfold(data.labels, k, seed);

  CrossValidationResult cv;
  for (std::size_t f = 0; f < k; ++f) {
    const std::string where = "fold " + std::to_string(f) + ": ";
    try {
      cv.folds.push_back(run_fold(data, splits[f], f, encoder, circuit, train, seed ^ f));
    } catch (const TrainingError& e) {
      throw TrainingError(where + e.what());
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(where + e.what());
    }
  }

  const double nf = static_cast<double>(k);
  cv.mean.per_class_auc.assign(circuit.n_outcomes, 0.0);
  for (const auto& fr : cv.folds) {
    cv.mean.accuracy += fr.metrics.accuracy / nf;
    for (std::size_t m = 0; m < circuit.n_outcomes; ++m)
      cv.mean.per_class_auc[m] += fr.metrics.per_class_auc[m] / nf;
  }
  cv.mean.mean_auc =
      std::accumulate(cv.mean.per_class_auc.begin(), cv.mean.per_class_auc.end(), 0.0) /
      static_cast<double>(circuit.n_outcomes);
  for (std::size_t m = 0; m < circuit.n_outcomes; ++m) {
    std::vector<RocCurve> curves;
    for (const auto& fr : cv.folds) curves.push_back(fr.roc[m]);
    cv.mean_roc.push_back(mean_roc(curves));
  }
  return cv;
}

}  // namespace vqsd

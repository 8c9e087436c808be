#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vqsd/encoding.hpp"
#include "vqsd/povm_circuit.hpp"
#include "vqsd/training.hpp"

namespace vqsd {

struct FoldSplit {
  std::vector<std::size_t> train;  // ascending
  std::vector<std::size_t> test;   // ascending
};

/// Each class is shuffled with Rng(seed) (classes in ascending label order)
/// and dealt round-robin onto the k test folds. The dealing offset carries
/// over between classes so fold sizes differ by at most one.
std::vector<FoldSplit> stratified_kfold(std::span<const int> labels, std::size_t k,
                                        std::uint64_t seed);

/// argmax over the first valid_labels outcomes; ties go to the smaller index.
int predict_label(std::span<const double> probabilities, std::size_t valid_labels);

double accuracy(std::span<const int> predicted, std::span<const int> truth);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;  // from (0,0) to (1,1)
  double auc = 0.0;
};

/// One-vs-rest ROC of `positive_class` from per-sample class scores. One
/// threshold per distinct score, equal scores grouped; AUC by trapezoids.
RocCurve roc_auc_ovr(std::span<const double> class_scores, std::span<const int> truth,
                     int positive_class);
RocCurve roc_auc_ovr(const std::vector<std::vector<double>>& scores,
                     std::span<const int> truth, int positive_class);

/// TPR of a curve at a given FPR. On a vertical segment the upper value is
/// taken.
double tpr_at(const RocCurve& curve, double fpr);

/// Vertical average on fpr = i / (grid - 1). The endpoints are pinned to
/// (0,0) and (1,1).
RocCurve mean_roc(std::span<const RocCurve> curves, std::size_t grid = 101);

struct Metrics {
  double accuracy = 0.0;
  std::vector<double> per_class_auc;
  double mean_auc = 0.0;
};

struct EncoderConfig {
  EncodingFunction function = EncodingFunction::InvCosCos;
  std::size_t layers = 2;
};

struct FoldResult {
  std::size_t fold = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> test_indices;
  std::vector<int> truth;
  std::vector<int> predicted;
  std::vector<std::vector<double>> probabilities;  // all simulated outcomes
  std::vector<RocCurve> roc;                       // per valid class
  Metrics metrics;
  TrainResult training;
};

struct CrossValidationResult {
  std::vector<FoldResult> folds;
  Metrics mean;                   // fold averages
  std::vector<RocCurve> mean_roc; // per class, on the 101-point grid
};

/// Encoded feature states of the given points.
std::vector<PureState> encode_points(const IrisDataset& data, std::span<const std::size_t> idx,
                                     const EncoderConfig& encoder);

/// k-fold stratified cross-validation of the VQSD classifier. `data` is used
/// as given (callers rescale first). Fold f trains with seed ^ f; the labels
/// 0..circuit.n_outcomes-1 are the valid classes. Errors are rethrown with
/// the fold index in the message, keeping the exception type.
CrossValidationResult cross_validate(const IrisDataset& data, const EncoderConfig& encoder,
                                     const PovmCircuitSpec& circuit, TrainConfig train,
                                     std::size_t k, std::uint64_t seed);

}  // namespace vqsd

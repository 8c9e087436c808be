#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "vqsd/experiment.hpp"

namespace vqsd {

/// Shortest decimal form that reads back to the same double.
std::string format_double(double v);

/// Writes via a temporary file in the same directory followed by a rename.
void write_atomic(const std::filesystem::path& path, const std::string& content);

nlohmann::json run_metadata(const std::string& mode, std::uint64_t seed,
                            const nlohmann::json& config);
nlohmann::json matrix_json(const ComplexMatrix& m);  // {"real": .., "imag": ..}

nlohmann::json to_json(const BaselineReport& b);
nlohmann::json to_json(const CertificateReport& c, double tol);
nlohmann::json to_json(const RocCurve& r);

nlohmann::json result_document(const DiscriminationRun& run);
nlohmann::json result_document(const BaselinesRun& run);
nlohmann::json result_document(const IrisRun& run);

std::string cost_history_csv(const std::vector<double>& history);  // iteration,cost
std::string roc_csv(const RocCurve& roc);                           // fpr,tpr
/// index,truth,predicted,p0..p{l-1}
std::string predictions_csv(const FoldResult& fold, std::size_t valid_labels);

/// Serialized documents and CSVs; files are only touched by write_outputs.
struct OutputBundle {
  std::vector<std::pair<std::string, std::string>> files;  // name, content
};

OutputBundle discriminate_outputs(const DiscriminationRun& run);
OutputBundle iris_outputs(const IrisRun& run);

/// Creates `dir` if needed and writes every file atomically.
void write_outputs(const std::filesystem::path& dir, const OutputBundle& bundle);

}  // namespace vqsd

#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "desc/config.hpp"
#include "desc/dataset.hpp"
#include "desc/ensemble.hpp"
#include "desc/features.hpp"
#include "desc/resources.hpp"

namespace desc::cli {

// Per-feature standardization fitted on training rows only and persisted with
// the models, so evaluate/predict see the exact training-time transform.
struct FeatureScaler {
  std::array<double, features::kFeatureCount> mean{};
  std::array<double, features::kFeatureCount> stdev{};  // 1 where variance is ~0

  static FeatureScaler fit(std::span<const features::FeatureVector> rows);
  std::array<double, features::kFeatureCount> apply(
      const features::FeatureVector& fv) const;

  void save_file(const std::filesystem::path& path) const;
  static FeatureScaler load_file(const std::filesystem::path& path);
};

struct LoadedResources {
  resources::ResourceBundle bundle;
  resources::EmbeddingTable embeddings;
};

LoadedResources load_resources(const RunConfig& config);

struct EncodedDataset {
  std::vector<ensemble::EnsembleInput> inputs;  // one per document
  std::vector<std::size_t> labels;              // labeled rows only
  std::vector<std::size_t> labeled_rows;        // indices into inputs
};

// dense = [tf-idf columns | standardized engineered features];
// sequence = per-token embedding vectors (a zero step for empty documents).
EncodedDataset encode_documents(std::span<const text::Document> documents,
                                const features::TfidfModel& tfidf,
                                const FeatureScaler& scaler,
                                const LoadedResources& resources,
                                std::size_t max_seq_len);

// Fixed artifact layout under the output directory:
//   models/dnn.model, models/bilstm.model, models/attlstm.model,
//   models/tfidf.vocab, models/labels.txt, models/feature_scaler.tsv,
//   manifest.json, reports/weights.{json,txt}
struct TrainOutcome {
  std::array<double, ensemble::kMemberCount> member_cv_f1{};
  ensemble::EnsembleWeights weights;
  std::filesystem::path output_dir;
  std::filesystem::path manifest_path;
};

TrainOutcome cmd_train(const RunConfig& config);

struct BinaryMetricsRow {
  std::string name;  // dnn | bilstm | attlstm | ensemble
  double accuracy = 0.0;
  double macro_precision = 0.0, macro_recall = 0.0, macro_f1 = 0.0;
  double positive_precision = 0.0, positive_recall = 0.0, positive_f1 = 0.0;
  double auc = 0.0;
};

struct SentimentMetricsRow {
  std::string name;
  double cosine = 0.0;
  double mse = 0.0;
};

struct EvaluateOutcome {
  TaskType task = TaskType::Binary;
  std::vector<BinaryMetricsRow> binary;        // binary task
  std::vector<SentimentMetricsRow> sentiment;  // sentiment11 task
  std::filesystem::path report_json;
};

// out_dir empty -> reports land under <model_dir>/reports.
EvaluateOutcome cmd_evaluate(const RunConfig& config,
                             const std::filesystem::path& model_dir,
                             const std::filesystem::path& test_file,
                             std::filesystem::path out_dir = {});

// TSV rows `id<TAB>prediction<TAB>p(<class>)...`, order-preserving.
void cmd_predict(const RunConfig& config, const std::filesystem::path& model_dir,
                 const std::filesystem::path& input_file, std::ostream& out);

// CSV whose header is exactly the canonical 44 feature names.
void cmd_extract_features(const RunConfig& config,
                          const std::filesystem::path& input_file,
                          std::ostream& out);

// Per-class feature means as CSV (and JSON when json_out is given).
void cmd_profile(const RunConfig& config, const std::filesystem::path& labeled_file,
                 std::ostream& out, std::ostream* json_out = nullptr);

}  // namespace desc::cli

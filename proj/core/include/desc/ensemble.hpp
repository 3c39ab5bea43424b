#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "desc/models.hpp"
#include "desc/rng.hpp"

namespace desc::ensemble {

// Canonical member order everywhere: DNN, BiLSTM, AttentionLSTM.
inline constexpr std::size_t kMemberCount = 3;
extern const std::array<const char*, kMemberCount> kMemberNames;

struct EnsembleWeights {
  std::array<double, kMemberCount> w{};
  std::array<double, kMemberCount> source_f1{};
};

// w_i = exp(F1_i) / sum_j exp(F1_j). Every weight is strictly positive and
// the weights sum to 1. Throws OutOfRangeF1 unless each F1 is in [0, 1].
EnsembleWeights compute_weights(const std::array<double, kMemberCount>& f1_scores);

enum class F1Flavor { Macro, Positive };

// Stratified fold assignment: fold_of[i] in [0, k). Every fold receives at
// least one sample of every class or TooFewSamplesPerClass is thrown.
std::vector<std::size_t> stratified_fold_assignment(
    const std::vector<std::size_t>& labels, std::size_t k, Rng& rng);

// fit receives the training sample indices and returns a predictor mapping a
// sample index to a class id.
using FitFn = std::function<std::function<std::size_t(std::size_t)>(
    const std::vector<std::size_t>&)>;

// Mean F1 over k stratified folds; deterministic given seed.
double cross_validated_f1(const std::vector<std::size_t>& labels,
                          std::size_t n_classes, const FitFn& fit, std::size_t k,
                          std::uint64_t seed, F1Flavor flavor = F1Flavor::Macro);

struct CombinedPrediction {
  std::size_t class_id = 0;
  models::ConfidenceVector confidence;  // the weighted soft vote
};

// Weighted soft vote: combined = sum_i w_i * p_i, argmax with ties broken
// toward the lowest class id.
CombinedPrediction combine(
    const std::array<double, kMemberCount>& w,
    const std::array<const models::ConfidenceVector*, kMemberCount>& members);

// One sample's inputs for all three members.
struct EnsembleInput {
  std::vector<double> dense;                    // DNN
  std::vector<std::vector<double>> sequence;    // BiLSTM / AttentionLSTM
};

class EnsembleModel {
 public:
  EnsembleModel() = default;
  EnsembleModel(models::DnnModel dnn, models::BilstmModel bilstm,
                models::AttentionLstmModel attention, EnsembleWeights weights);

  std::size_t classes() const { return classes_; }
  const EnsembleWeights& weights() const { return weights_; }
  const models::DnnModel& dnn() const { return dnn_; }
  const models::BilstmModel& bilstm() const { return bilstm_; }
  const models::AttentionLstmModel& attention() const { return attention_; }

  CombinedPrediction predict(const EnsembleInput& input) const;
  std::vector<CombinedPrediction> predict_batch(
      std::span<const EnsembleInput> inputs) const;

  // per-member confidences for one input, in member order
  std::array<models::ConfidenceVector, kMemberCount> member_confidences(
      const EnsembleInput& input) const;

 private:
  models::DnnModel dnn_;
  models::BilstmModel bilstm_;
  models::AttentionLstmModel attention_;
  EnsembleWeights weights_;
  std::size_t classes_ = 0;
};

// ---- on-disk manifest ----

struct ManifestEntry {
  std::string file;    // relative to the manifest directory
  std::string digest;  // fnv1a64 of the file bytes
};

struct EnsembleManifest {
  std::string task;  // "binary" | "sentiment11"
  std::size_t classes = 0;
  std::string f1_flavor = "macro";
  std::string decode = "argmax";
  EnsembleWeights weights;
  std::array<ManifestEntry, kMemberCount> members;  // member order
  ManifestEntry tfidf;
  ManifestEntry labels;
  ManifestEntry scaler;

  void save(const std::filesystem::path& path) const;
  static EnsembleManifest load(const std::filesystem::path& path);
};

// Loads the member models named by the manifest, verifying every digest.
// Missing files raise MissingArtifact; digest or schema drift raises
// VersionMismatch.
EnsembleModel load_ensemble(const std::filesystem::path& dir,
                            const EnsembleManifest& manifest);

}  // namespace desc::ensemble

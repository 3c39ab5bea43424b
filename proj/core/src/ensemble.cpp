#include "desc/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "desc/digest.hpp"
#include "desc/errors.hpp"
#include "desc/metrics.hpp"

namespace desc {

std::string fnv1a64_hex(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

std::string digest_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingArtifact("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return fnv1a64_hex(buffer.str());
}

}  // namespace desc

namespace desc::ensemble {

using json = nlohmann::ordered_json;

const std::array<const char*, kMemberCount> kMemberNames = {"dnn", "bilstm",
                                                            "attlstm"};

EnsembleWeights compute_weights(const std::array<double, kMemberCount>& f1_scores) {
  for (double f1 : f1_scores) {
    if (!(f1 >= 0.0 && f1 <= 1.0)) {
      throw OutOfRangeF1("F1 score " + std::to_string(f1) + " outside [0, 1]");
    }
  }
  EnsembleWeights weights;
  weights.source_f1 = f1_scores;
  double denom = 0.0;
  for (std::size_t i = 0; i < kMemberCount; ++i) {
    weights.w[i] = std::exp(f1_scores[i]);
    denom += weights.w[i];
  }
  for (double& w : weights.w) w /= denom;
  return weights;
}

std::vector<std::size_t> stratified_fold_assignment(
    const std::vector<std::size_t>& labels, std::size_t k, Rng& rng) {
  if (k < 2) throw TooFewSamplesPerClass("cross validation needs k >= 2");
  const std::size_t n_classes =
      labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;

  std::vector<std::vector<std::size_t>> by_class(n_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);

  for (std::size_t c = 0; c < n_classes; ++c) {
    if (by_class[c].size() < k) {
      throw TooFewSamplesPerClass("class " + std::to_string(c) + " has " +
                                  std::to_string(by_class[c].size()) +
                                  " samples, fewer than k = " + std::to_string(k));
    }
  }

  std::vector<std::size_t> fold_of(labels.size(), 0);
  for (auto& members : by_class) {
    rng.shuffle(members);
    for (std::size_t j = 0; j < members.size(); ++j) {
      fold_of[members[j]] = j % k;
    }
  }
  return fold_of;
}

namespace {

double fold_f1(const std::vector<std::size_t>& gold,
               const std::vector<std::size_t>& predicted, std::size_t n_classes,
               F1Flavor flavor) {
  const auto metrics = eval::classification_metrics(gold, predicted, n_classes);
  if (flavor == F1Flavor::Macro) return metrics.macro_f1;
  // positive-class flavor: class id 1 by convention
  return metrics.f1.size() > 1 ? metrics.f1[1] : 0.0;
}

}  // namespace

double cross_validated_f1(const std::vector<std::size_t>& labels,
                          std::size_t n_classes, const FitFn& fit, std::size_t k,
                          std::uint64_t seed, F1Flavor flavor) {
  Rng rng(seed);
  const std::vector<std::size_t> fold_of = stratified_fold_assignment(labels, k, rng);

  double total = 0.0;
  for (std::size_t fold = 0; fold < k; ++fold) {
    std::vector<std::size_t> train_idx;
    std::vector<std::size_t> test_idx;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      (fold_of[i] == fold ? test_idx : train_idx).push_back(i);
    }
    const auto predictor = fit(train_idx);
    std::vector<std::size_t> gold;
    std::vector<std::size_t> predicted;
    gold.reserve(test_idx.size());
    predicted.reserve(test_idx.size());
    for (std::size_t i : test_idx) {
      gold.push_back(labels[i]);
      predicted.push_back(predictor(i));
    }
    total += fold_f1(gold, predicted, n_classes, flavor);
  }
  return total / static_cast<double>(k);
}

CombinedPrediction combine(
    const std::array<double, kMemberCount>& w,
    const std::array<const models::ConfidenceVector*, kMemberCount>& members) {
  const std::size_t c = members[0]->probs.size();
  CombinedPrediction out;
  out.confidence.probs.assign(c, 0.0);
  for (std::size_t i = 0; i < kMemberCount; ++i) {
    if (members[i]->probs.size() != c) {
      throw DimensionMismatch("ensemble members disagree on class count");
    }
    for (std::size_t j = 0; j < c; ++j) {
      out.confidence.probs[j] += w[i] * members[i]->probs[j];
    }
  }
  out.class_id = out.confidence.argmax();
  return out;
}

EnsembleModel::EnsembleModel(models::DnnModel dnn, models::BilstmModel bilstm,
                             models::AttentionLstmModel attention,
                             EnsembleWeights weights)
    : dnn_(std::move(dnn)),
      bilstm_(std::move(bilstm)),
      attention_(std::move(attention)),
      weights_(weights),
      classes_(dnn_.config().classes) {
  if (bilstm_.config().classes != classes_ ||
      attention_.config().classes != classes_) {
    throw DimensionMismatch("ensemble members disagree on class count");
  }
}

std::array<models::ConfidenceVector, kMemberCount>
EnsembleModel::member_confidences(const EnsembleInput& input) const {
  return {dnn_.predict(input.dense), bilstm_.predict(input.sequence),
          attention_.predict(input.sequence)};
}

CombinedPrediction EnsembleModel::predict(const EnsembleInput& input) const {
  const auto confidences = member_confidences(input);
  return combine(weights_.w,
                 {&confidences[0], &confidences[1], &confidences[2]});
}

std::vector<CombinedPrediction> EnsembleModel::predict_batch(
    std::span<const EnsembleInput> inputs) const {
  std::vector<CombinedPrediction> out;
  out.reserve(inputs.size());
  for (const auto& input : inputs) out.push_back(predict(input));
  return out;
}

// ---- manifest ----

namespace {

json entry_to_json(const ManifestEntry& entry) {
  return json{{"file", entry.file}, {"digest", entry.digest}};
}

ManifestEntry entry_from_json(const json& j) {
  return ManifestEntry{j.at("file").get<std::string>(),
                       j.at("digest").get<std::string>()};
}

}  // namespace

void EnsembleManifest::save(const std::filesystem::path& path) const {
  json j;
  j["format"] = "desc-ensemble";
  j["version"] = 1;
  j["task"] = task;
  j["classes"] = classes;
  j["f1_flavor"] = f1_flavor;
  j["decode"] = decode;
  j["weights"] = weights.w;
  j["member_cv_f1"] = weights.source_f1;
  json members_json = json::array();
  for (std::size_t i = 0; i < kMemberCount; ++i) {
    json m = entry_to_json(members[i]);
    m["name"] = kMemberNames[i];
    members_json.push_back(std::move(m));
  }
  j["members"] = std::move(members_json);
  j["tfidf"] = entry_to_json(tfidf);
  j["labels"] = entry_to_json(labels);
  j["scaler"] = entry_to_json(scaler);

  std::ofstream out(path);
  if (!out) throw MissingArtifact("cannot create " + path.string());
  out << j.dump(2) << "\n";
}

EnsembleManifest EnsembleManifest::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifact("cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw VersionMismatch("manifest " + path.string() + " is not valid JSON: " +
                          e.what());
  }
  if (j.value("format", "") != "desc-ensemble" || j.value("version", 0) != 1) {
    throw VersionMismatch("unsupported manifest format in " + path.string());
  }

  EnsembleManifest manifest;
  manifest.task = j.at("task").get<std::string>();
  manifest.classes = j.at("classes").get<std::size_t>();
  manifest.f1_flavor = j.at("f1_flavor").get<std::string>();
  manifest.decode = j.at("decode").get<std::string>();
  const auto w = j.at("weights").get<std::vector<double>>();
  const auto f1 = j.at("member_cv_f1").get<std::vector<double>>();
  if (w.size() != kMemberCount || f1.size() != kMemberCount) {
    throw VersionMismatch("manifest lists wrong member count");
  }
  std::copy(w.begin(), w.end(), manifest.weights.w.begin());
  std::copy(f1.begin(), f1.end(), manifest.weights.source_f1.begin());

  const auto& members = j.at("members");
  if (!members.is_array() || members.size() != kMemberCount) {
    throw VersionMismatch("manifest lists wrong member count");
  }
  for (std::size_t i = 0; i < kMemberCount; ++i) {
    if (members[i].value("name", "") != kMemberNames[i]) {
      throw VersionMismatch("manifest member order is not dnn/bilstm/attlstm");
    }
    manifest.members[i] = entry_from_json(members[i]);
  }
  manifest.tfidf = entry_from_json(j.at("tfidf"));
  manifest.labels = entry_from_json(j.at("labels"));
  manifest.scaler = entry_from_json(j.at("scaler"));
  return manifest;
}

namespace {

void verify_entry(const std::filesystem::path& dir, const ManifestEntry& entry) {
  const auto path = dir / entry.file;
  if (!std::filesystem::exists(path)) {
    throw MissingArtifact("artifact missing: " + path.string());
  }
  const std::string actual = digest_file(path);
  if (actual != entry.digest) {
    throw VersionMismatch("digest mismatch for " + path.string() + ": manifest " +
                          entry.digest + ", file " + actual);
  }
}

}  // namespace

EnsembleModel load_ensemble(const std::filesystem::path& dir,
                            const EnsembleManifest& manifest) {
  for (const auto& member : manifest.members) verify_entry(dir, member);

  auto dnn = models::DnnModel::from_params(
      models::ModelParams::load_file(dir / manifest.members[0].file));
  auto bilstm = models::BilstmModel::from_params(
      models::ModelParams::load_file(dir / manifest.members[1].file));
  auto attention = models::AttentionLstmModel::from_params(
      models::ModelParams::load_file(dir / manifest.members[2].file));
  return EnsembleModel(std::move(dnn), std::move(bilstm), std::move(attention),
                       manifest.weights);
}

}  // namespace desc::ensemble

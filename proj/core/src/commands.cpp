#include "desc/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "desc/digest.hpp"
#include "desc/errors.hpp"
#include "desc/metrics.hpp"
#include "desc/models.hpp"

namespace desc::cli {

namespace {

using json = nlohmann::ordered_json;

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t x = seed ^ (salt * 0x9E3779B97F4A7C15ULL);
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  return x;
}

void require_file(const std::filesystem::path& path, const char* what) {
  if (path.empty()) {
    throw ConfigError(std::string("config: missing path for ") + what);
  }
  if (!std::filesystem::exists(path)) {
    throw MissingFile(std::string(what) + " not found: " + path.string());
  }
}

std::ofstream create_file(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw MissingFile("cannot create " + path.string());
  return out;
}

}  // namespace

// ---- FeatureScaler ----

FeatureScaler FeatureScaler::fit(std::span<const features::FeatureVector> rows) {
  FeatureScaler scaler;
  scaler.stdev.fill(1.0);
  if (rows.empty()) return scaler;

  for (const auto& row : rows) {
    for (std::size_t f = 0; f < features::kFeatureCount; ++f) {
      scaler.mean[f] += row.values[f];
    }
  }
  for (double& m : scaler.mean) m /= static_cast<double>(rows.size());

  std::array<double, features::kFeatureCount> var{};
  for (const auto& row : rows) {
    for (std::size_t f = 0; f < features::kFeatureCount; ++f) {
      const double d = row.values[f] - scaler.mean[f];
      var[f] += d * d;
    }
  }
  for (std::size_t f = 0; f < features::kFeatureCount; ++f) {
    const double sd = std::sqrt(var[f] / static_cast<double>(rows.size()));
    scaler.stdev[f] = sd > 1e-12 ? sd : 1.0;
  }
  return scaler;
}

std::array<double, features::kFeatureCount> FeatureScaler::apply(
    const features::FeatureVector& fv) const {
  std::array<double, features::kFeatureCount> out{};
  for (std::size_t f = 0; f < features::kFeatureCount; ++f) {
    out[f] = (fv.values[f] - mean[f]) / stdev[f];
  }
  return out;
}

void FeatureScaler::save_file(const std::filesystem::path& path) const {
  std::ofstream out = create_file(path);
  out << "desc-scaler 1\n";
  const auto& names = features::feature_names();
  for (std::size_t f = 0; f < features::kFeatureCount; ++f) {
    out << names[f] << '\t' << format_real(mean[f]) << '\t'
        << format_real(stdev[f]) << '\n';
  }
}

FeatureScaler FeatureScaler::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifact("cannot open " + path.string());
  std::string header;
  std::getline(in, header);
  if (!header.empty() && header.back() == '\r') header.pop_back();
  if (header != "desc-scaler 1") {
    throw VersionMismatch("unsupported scaler file header: '" + header + "'");
  }
  FeatureScaler scaler;
  const auto& names = features::feature_names();
  std::string line;
  for (std::size_t f = 0; f < features::kFeatureCount; ++f) {
    if (!std::getline(in, line)) throw VersionMismatch("truncated scaler file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream row(line);
    std::string name;
    std::getline(row, name, '\t');
    if (name != names[f]) {
      throw VersionMismatch("scaler row '" + name + "' does not match feature '" +
                            names[f] + "'");
    }
    row >> scaler.mean[f] >> scaler.stdev[f];
  }
  return scaler;
}

// ---- resources / encoding ----

LoadedResources load_resources(const RunConfig& config) {
  require_file(config.lexicon_sentiwordnet, "lexicon_sentiwordnet");
  require_file(config.lexicon_vader, "lexicon_vader");
  require_file(config.lexicon_afinn, "lexicon_afinn");
  require_file(config.lexicon_depechemood, "lexicon_depechemood");
  require_file(config.easy_word_list, "easy_word_list");
  require_file(config.pos_lexicon, "pos_lexicon");
  require_file(config.embeddings, "embeddings");

  LoadedResources out;
  out.bundle.sentiment[0] =
      resources::load_sentiment_lexicon(config.lexicon_sentiwordnet, "sentiwordnet");
  out.bundle.sentiment[1] =
      resources::load_sentiment_lexicon(config.lexicon_vader, "vader");
  out.bundle.sentiment[2] =
      resources::load_sentiment_lexicon(config.lexicon_afinn, "afinn");
  out.bundle.mood = resources::load_mood_lexicon(config.lexicon_depechemood);
  out.bundle.sentiment[3] = resources::sentiment_from_mood(out.bundle.mood);
  out.bundle.easy_words = resources::load_wordlist(config.easy_word_list);
  out.bundle.pos = resources::load_pos_lexicon(config.pos_lexicon);
  out.embeddings = resources::load_embeddings(config.embeddings);
  return out;
}

EncodedDataset encode_documents(std::span<const text::Document> documents,
                                const features::TfidfModel& tfidf,
                                const FeatureScaler& scaler,
                                const LoadedResources& resources,
                                std::size_t max_seq_len) {
  EncodedDataset out;
  out.inputs.reserve(documents.size());
  const std::size_t dim = resources.embeddings.dimension();

  for (std::size_t row = 0; row < documents.size(); ++row) {
    const text::Document& doc = documents[row];
    ensemble::EnsembleInput input;

    input.dense = tfidf.transform_dense(doc);
    const auto fv = features::extract_features(doc, resources.bundle);
    const auto standardized = scaler.apply(fv);
    input.dense.insert(input.dense.end(), standardized.begin(), standardized.end());

    const std::size_t steps = std::min(doc.tokens.size(), max_seq_len);
    for (std::size_t t = 0; t < steps; ++t) {
      const auto vec = resources.embeddings.lookup(doc.tokens[t].normalized);
      input.sequence.emplace_back(vec.begin(), vec.end());
    }
    if (input.sequence.empty()) {
      input.sequence.emplace_back(dim, 0.0);  // empty document
    }

    if (doc.label.has_value()) {
      out.labels.push_back(static_cast<std::size_t>(*doc.label));
      out.labeled_rows.push_back(row);
    }
    out.inputs.push_back(std::move(input));
  }
  return out;
}

// ---- cmd_train ----

namespace {

struct TrainedMembers {
  std::shared_ptr<models::DnnModel> dnn;
  std::shared_ptr<models::BilstmModel> bilstm;
  std::shared_ptr<models::AttentionLstmModel> attention;
};

// Removes this run's outputs if training dies halfway through.
class ArtifactGuard {
 public:
  explicit ArtifactGuard(std::filesystem::path dir) : dir_(std::move(dir)) {}
  ~ArtifactGuard() {
    if (!armed_) return;
    std::error_code ec;
    std::filesystem::remove_all(dir_ / "models", ec);
    std::filesystem::remove_all(dir_ / "reports", ec);
    std::filesystem::remove(dir_ / "manifest.json", ec);
  }
  void disarm() { armed_ = false; }

 private:
  std::filesystem::path dir_;
  bool armed_ = true;
};

std::vector<std::vector<double>> gather_dense(
    const EncodedDataset& data, const std::vector<std::size_t>& rows) {
  std::vector<std::vector<double>> out;
  out.reserve(rows.size());
  for (std::size_t i : rows) out.push_back(data.inputs[i].dense);
  return out;
}

std::vector<std::vector<std::vector<double>>> gather_sequences(
    const EncodedDataset& data, const std::vector<std::size_t>& rows) {
  std::vector<std::vector<std::vector<double>>> out;
  out.reserve(rows.size());
  for (std::size_t i : rows) out.push_back(data.inputs[i].sequence);
  return out;
}

}  // namespace

TrainOutcome cmd_train(const RunConfig& config) {
  require_file(config.train_file, "train_file");
  if (config.output_dir.empty()) {
    throw ConfigError("config: output_dir is required for training");
  }
  if (config.cv_folds < 2) {
    throw ConfigError("config: cv_folds must be at least 2");
  }

  const LoadedResources resources = load_resources(config);
  IngestResult data = ingest(config.train_file, config.task);
  if (data.documents.empty()) throw EmptyDataset("training file has no rows");
  for (std::size_t i = 0; i < data.documents.size(); ++i) {
    if (!data.documents[i].label.has_value()) {
      throw UnparseableLabel("training row '" + data.ids[i] + "' is unlabeled");
    }
  }
  const std::size_t classes =
      config.task == TaskType::Binary ? 2 : data.labels.size();
  if (config.task == TaskType::Binary && data.labels.size() != 2) {
    throw UnparseableLabel("binary training data must contain exactly 2 classes, found " +
                           std::to_string(data.labels.size()));
  }

  const auto tfidf =
      features::TfidfModel::fit(data.documents, config.tfidf_min_df);

  std::vector<features::FeatureVector> raw_features;
  raw_features.reserve(data.documents.size());
  for (const auto& doc : data.documents) {
    raw_features.push_back(features::extract_features(doc, resources.bundle));
  }
  const FeatureScaler scaler = FeatureScaler::fit(raw_features);

  const EncodedDataset encoded = encode_documents(
      data.documents, tfidf, scaler, resources, config.model.max_seq_len);

  models::ModelConfig dense_cfg = config.model;
  dense_cfg.classes = classes;
  dense_cfg.input_dim = tfidf.vocabulary_size() + features::kFeatureCount;
  models::ModelConfig seq_cfg = config.model;
  seq_cfg.classes = classes;
  seq_cfg.embedding_dim = resources.embeddings.dimension();

  const std::vector<std::size_t>& labels = encoded.labels;
  const std::uint64_t seed = config.train.seed;

  // cross-validated F1 per member, the input to the ensemble weighting
  const ensemble::FitFn dnn_fit = [&](const std::vector<std::size_t>& train_idx) {
    Rng init(mix_seed(seed, 1));
    auto model = std::make_shared<models::DnnModel>(dense_cfg, init);
    const auto inputs = gather_dense(encoded, train_idx);
    std::vector<std::size_t> fold_labels;
    for (std::size_t i : train_idx) fold_labels.push_back(labels[i]);
    models::train_model<models::DnnModel, std::vector<double>>(
        *model, inputs, fold_labels, config.train);
    return [model, &encoded](std::size_t i) {
      return model->predict(encoded.inputs[i].dense).argmax();
    };
  };
  const ensemble::FitFn bilstm_fit = [&](const std::vector<std::size_t>& train_idx) {
    Rng init(mix_seed(seed, 2));
    auto model = std::make_shared<models::BilstmModel>(seq_cfg, init);
    const auto inputs = gather_sequences(encoded, train_idx);
    std::vector<std::size_t> fold_labels;
    for (std::size_t i : train_idx) fold_labels.push_back(labels[i]);
    models::train_model<models::BilstmModel, std::vector<std::vector<double>>>(
        *model, inputs, fold_labels, config.train);
    return [model, &encoded](std::size_t i) {
      return model->predict(encoded.inputs[i].sequence).argmax();
    };
  };
  const ensemble::FitFn attention_fit =
      [&](const std::vector<std::size_t>& train_idx) {
        Rng init(mix_seed(seed, 3));
        auto model = std::make_shared<models::AttentionLstmModel>(seq_cfg, init);
        const auto inputs = gather_sequences(encoded, train_idx);
        std::vector<std::size_t> fold_labels;
        for (std::size_t i : train_idx) fold_labels.push_back(labels[i]);
        models::train_model<models::AttentionLstmModel,
                            std::vector<std::vector<double>>>(
            *model, inputs, fold_labels, config.train);
        return [model, &encoded](std::size_t i) {
          return model->predict(encoded.inputs[i].sequence).argmax();
        };
      };

  std::array<double, ensemble::kMemberCount> cv_f1{};
  cv_f1[0] = ensemble::cross_validated_f1(labels, classes, dnn_fit,
                                          config.cv_folds, mix_seed(seed, 11),
                                          config.f1_flavor);
  cv_f1[1] = ensemble::cross_validated_f1(labels, classes, bilstm_fit,
                                          config.cv_folds, mix_seed(seed, 12),
                                          config.f1_flavor);
  cv_f1[2] = ensemble::cross_validated_f1(labels, classes, attention_fit,
                                          config.cv_folds, mix_seed(seed, 13),
                                          config.f1_flavor);
  const ensemble::EnsembleWeights weights = ensemble::compute_weights(cv_f1);

  // Final members are fitted on the full training set.
  std::vector<std::size_t> all_rows(labels.size());
  for (std::size_t i = 0; i < all_rows.size(); ++i) all_rows[i] = i;

  Rng dnn_init(mix_seed(seed, 1));
  models::DnnModel dnn(dense_cfg, dnn_init);
  {
    const auto inputs = gather_dense(encoded, all_rows);
    models::train_model<models::DnnModel, std::vector<double>>(
        dnn, inputs, labels, config.train);
  }
  Rng bilstm_init(mix_seed(seed, 2));
  models::BilstmModel bilstm(seq_cfg, bilstm_init);
  {
    const auto inputs = gather_sequences(encoded, all_rows);
    models::train_model<models::BilstmModel, std::vector<std::vector<double>>>(
        bilstm, inputs, labels, config.train);
  }
  Rng attention_init(mix_seed(seed, 3));
  models::AttentionLstmModel attention(seq_cfg, attention_init);
  {
    const auto inputs = gather_sequences(encoded, all_rows);
    models::train_model<models::AttentionLstmModel,
                        std::vector<std::vector<double>>>(
        attention, inputs, labels, config.train);
  }

  // ---- artifacts ----
  const std::filesystem::path out_dir = config.output_dir;
  std::filesystem::create_directories(out_dir / "models");
  std::filesystem::create_directories(out_dir / "reports");
  ArtifactGuard guard(out_dir);

  models::ModelParams dnn_params = dnn.to_params();
  dnn_params.feature_names = tfidf.ngrams();
  for (const auto& name : features::feature_names()) {
    dnn_params.feature_names.push_back(name);
  }
  dnn_params.save_file(out_dir / "models" / "dnn.model");
  bilstm.to_params().save_file(out_dir / "models" / "bilstm.model");
  attention.to_params().save_file(out_dir / "models" / "attlstm.model");
  tfidf.save_file(out_dir / "models" / "tfidf.vocab");
  data.labels.save_file(out_dir / "models" / "labels.txt");
  scaler.save_file(out_dir / "models" / "feature_scaler.tsv");

  ensemble::EnsembleManifest manifest;
  manifest.task = task_name(config.task);
  manifest.classes = classes;
  manifest.f1_flavor =
      config.f1_flavor == ensemble::F1Flavor::Macro ? "macro" : "positive";
  manifest.decode = config.decode == DecodeMode::Argmax ? "argmax" : "expectation";
  manifest.weights = weights;
  const std::array<const char*, 3> member_files = {
      "models/dnn.model", "models/bilstm.model", "models/attlstm.model"};
  for (std::size_t i = 0; i < ensemble::kMemberCount; ++i) {
    manifest.members[i] = {member_files[i], digest_file(out_dir / member_files[i])};
  }
  manifest.tfidf = {"models/tfidf.vocab", digest_file(out_dir / "models/tfidf.vocab")};
  manifest.labels = {"models/labels.txt", digest_file(out_dir / "models/labels.txt")};
  manifest.scaler = {"models/feature_scaler.tsv",
                     digest_file(out_dir / "models/feature_scaler.tsv")};
  manifest.save(out_dir / "manifest.json");

  {
    json report;
    report["task"] = task_name(config.task);
    report["cv_folds"] = config.cv_folds;
    report["f1_flavor"] = manifest.f1_flavor;
    json members = json::array();
    for (std::size_t i = 0; i < ensemble::kMemberCount; ++i) {
      members.push_back({{"name", ensemble::kMemberNames[i]},
                         {"cv_f1", cv_f1[i]},
                         {"weight", weights.w[i]}});
    }
    report["members"] = std::move(members);
    std::ofstream out = create_file(out_dir / "reports" / "weights.json");
    out << report.dump(2) << "\n";
  }
  {
    std::ofstream out = create_file(out_dir / "reports" / "weights.txt");
    out << "member    cv_f1      weight\n";
    for (std::size_t i = 0; i < ensemble::kMemberCount; ++i) {
      char line[96];
      std::snprintf(line, sizeof(line), "%-9s %-10.6f %-10.6f\n",
                    ensemble::kMemberNames[i], cv_f1[i], weights.w[i]);
      out << line;
    }
  }

  guard.disarm();
  TrainOutcome outcome;
  outcome.member_cv_f1 = cv_f1;
  outcome.weights = weights;
  outcome.output_dir = out_dir;
  outcome.manifest_path = out_dir / "manifest.json";
  return outcome;
}

// ---- shared artifact loading for evaluate/predict ----

namespace {

struct LoadedArtifacts {
  ensemble::EnsembleManifest manifest;
  ensemble::EnsembleModel model;
  features::TfidfModel tfidf;
  LabelMap labels;
  FeatureScaler scaler;
};

LoadedArtifacts load_artifacts(const RunConfig& config,
                               const std::filesystem::path& model_dir) {
  LoadedArtifacts art;
  const auto manifest_path = model_dir / "manifest.json";
  if (!std::filesystem::exists(manifest_path)) {
    throw MissingArtifact("no manifest at " + manifest_path.string());
  }
  art.manifest = ensemble::EnsembleManifest::load(manifest_path);
  if (art.manifest.task != task_name(config.task)) {
    throw VersionMismatch("config task '" + std::string(task_name(config.task)) +
                          "' does not match trained task '" + art.manifest.task +
                          "'");
  }
  for (const auto* entry :
       {&art.manifest.tfidf, &art.manifest.labels, &art.manifest.scaler}) {
    const auto path = model_dir / entry->file;
    if (!std::filesystem::exists(path)) {
      throw MissingArtifact("artifact missing: " + path.string());
    }
    const auto actual = digest_file(path);
    if (actual != entry->digest) {
      throw VersionMismatch("digest mismatch for " + path.string());
    }
  }
  art.model = ensemble::load_ensemble(model_dir, art.manifest);
  art.tfidf = features::TfidfModel::load_file(model_dir / art.manifest.tfidf.file);
  art.labels = LabelMap::load_file(model_dir / art.manifest.labels.file);
  art.scaler = FeatureScaler::load_file(model_dir / art.manifest.scaler.file);
  return art;
}

double decode_score(const models::ConfidenceVector& confidence, DecodeMode mode) {
  if (mode == DecodeMode::Argmax) {
    return static_cast<double>(confidence.argmax()) - 5.0;
  }
  double expectation = 0.0;
  for (std::size_t k = 0; k < confidence.probs.size(); ++k) {
    expectation += confidence.probs[k] * (static_cast<double>(k) - 5.0);
  }
  return expectation;
}

void write_roc_csv(const std::filesystem::path& path, const eval::RocCurve& curve) {
  std::ofstream out = create_file(path);
  out << "fpr,tpr\n";
  for (const auto& [fpr, tpr] : curve.points) {
    out << format_real(fpr) << ',' << format_real(tpr) << '\n';
  }
}

}  // namespace

EvaluateOutcome cmd_evaluate(const RunConfig& config,
                             const std::filesystem::path& model_dir,
                             const std::filesystem::path& test_file,
                             std::filesystem::path out_dir) {
  const LoadedArtifacts art = load_artifacts(config, model_dir);
  const LoadedResources resources = load_resources(config);
  const IngestResult data =
      ingest_with_labels(test_file, config.task, art.labels);
  const EncodedDataset encoded = encode_documents(
      data.documents, art.tfidf, art.scaler, resources, config.model.max_seq_len);
  if (encoded.labeled_rows.empty()) {
    throw EmptyInput("evaluate: no labeled rows in " + test_file.string());
  }

  if (out_dir.empty()) out_dir = model_dir;
  std::filesystem::create_directories(out_dir / "reports");

  // member and ensemble confidences for the labeled rows
  const std::array<const char*, 4> row_names = {"dnn", "bilstm", "attlstm",
                                                "ensemble"};
  std::array<std::vector<models::ConfidenceVector>, 4> confidences;
  for (std::size_t row : encoded.labeled_rows) {
    const auto member = art.model.member_confidences(encoded.inputs[row]);
    const auto combined =
        ensemble::combine(art.model.weights().w,
                          {&member[0], &member[1], &member[2]});
    for (std::size_t m = 0; m < 3; ++m) confidences[m].push_back(member[m]);
    confidences[3].push_back(combined.confidence);
  }

  EvaluateOutcome outcome;
  outcome.task = config.task;
  json report;
  report["task"] = task_name(config.task);
  report["test_rows"] = encoded.labeled_rows.size();

  if (config.task == TaskType::Binary) {
    json systems;
    for (std::size_t m = 0; m < 4; ++m) {
      std::vector<std::size_t> predicted;
      std::vector<double> positive_scores;
      predicted.reserve(confidences[m].size());
      for (const auto& c : confidences[m]) {
        predicted.push_back(c.argmax());
        positive_scores.push_back(c.probs[1]);
      }
      const auto metrics =
          eval::classification_metrics(encoded.labels, predicted, 2);
      const auto roc = eval::roc_auc(encoded.labels, positive_scores);
      write_roc_csv(out_dir / "reports" /
                        ("roc_" + std::string(row_names[m]) + ".csv"),
                    roc);

      BinaryMetricsRow row;
      row.name = row_names[m];
      row.accuracy = metrics.accuracy;
      row.macro_precision = metrics.macro_precision;
      row.macro_recall = metrics.macro_recall;
      row.macro_f1 = metrics.macro_f1;
      row.positive_precision = metrics.precision[1];
      row.positive_recall = metrics.recall[1];
      row.positive_f1 = metrics.f1[1];
      row.auc = roc.auc;
      outcome.binary.push_back(row);

      systems[row.name] = {{"accuracy", row.accuracy},
                           {"macro_precision", row.macro_precision},
                           {"macro_recall", row.macro_recall},
                           {"macro_f1", row.macro_f1},
                           {"positive_precision", row.positive_precision},
                           {"positive_recall", row.positive_recall},
                           {"positive_f1", row.positive_f1},
                           {"auc", row.auc}};
    }
    report["systems"] = std::move(systems);
  } else {
    std::vector<double> gold;
    gold.reserve(encoded.labeled_rows.size());
    for (std::size_t row : encoded.labeled_rows) {
      gold.push_back(static_cast<double>(*data.documents[row].score));
    }
    // decode mode is a run-time choice; the manifest only records the
    // training-time default
    const DecodeMode mode = config.decode;
    json systems;
    for (std::size_t m = 0; m < 4; ++m) {
      std::vector<double> predicted;
      predicted.reserve(confidences[m].size());
      for (const auto& c : confidences[m]) predicted.push_back(decode_score(c, mode));
      const auto metrics = eval::sentiment_metrics(gold, predicted);

      SentimentMetricsRow row;
      row.name = row_names[m];
      row.cosine = metrics.cosine;
      row.mse = metrics.mse;
      outcome.sentiment.push_back(row);
      // exactly the keys {cosine, mse} per system
      systems[row.name] = {{"cosine", row.cosine}, {"mse", row.mse}};
    }
    report["systems"] = std::move(systems);
  }

  outcome.report_json = out_dir / "reports" / "metrics.json";
  {
    std::ofstream out = create_file(outcome.report_json);
    out << report.dump(2) << "\n";
  }
  {
    std::ofstream out = create_file(out_dir / "reports" / "metrics.txt");
    if (config.task == TaskType::Binary) {
      out << "system    acc      macro_p  macro_r  macro_f1 pos_f1   auc\n";
      for (const auto& row : outcome.binary) {
        char line[160];
        std::snprintf(line, sizeof(line),
                      "%-9s %-8.4f %-8.4f %-8.4f %-8.4f %-8.4f %-8.4f\n",
                      row.name.c_str(), row.accuracy, row.macro_precision,
                      row.macro_recall, row.macro_f1, row.positive_f1, row.auc);
        out << line;
      }
    } else {
      out << "system    cosine   mse\n";
      for (const auto& row : outcome.sentiment) {
        char line[96];
        std::snprintf(line, sizeof(line), "%-9s %-8.4f %-8.4f\n",
                      row.name.c_str(), row.cosine, row.mse);
        out << line;
      }
    }
  }
  return outcome;
}

void cmd_predict(const RunConfig& config, const std::filesystem::path& model_dir,
                 const std::filesystem::path& input_file, std::ostream& out) {
  const LoadedArtifacts art = load_artifacts(config, model_dir);
  const LoadedResources resources = load_resources(config);
  const IngestResult data =
      ingest_with_labels(input_file, config.task, art.labels);
  const EncodedDataset encoded = encode_documents(
      data.documents, art.tfidf, art.scaler, resources, config.model.max_seq_len);

  out << "# id\tprediction";
  for (const auto& name : art.labels.names()) out << "\tp(" << name << ")";
  out << "\n";
  for (std::size_t row = 0; row < encoded.inputs.size(); ++row) {
    const auto prediction = art.model.predict(encoded.inputs[row]);
    out << data.ids[row] << '\t' << art.labels.name_of(prediction.class_id);
    for (double p : prediction.confidence.probs) out << '\t' << format_real(p);
    out << '\n';
  }
}

void cmd_extract_features(const RunConfig& config,
                          const std::filesystem::path& input_file,
                          std::ostream& out) {
  const LoadedResources resources = load_resources(config);
  const IngestResult data = ingest(input_file, config.task);

  const auto& names = features::feature_names();
  for (std::size_t f = 0; f < names.size(); ++f) {
    out << (f == 0 ? "" : ",") << names[f];
  }
  out << "\n";
  for (const auto& doc : data.documents) {
    const auto fv = features::extract_features(doc, resources.bundle);
    for (std::size_t f = 0; f < fv.values.size(); ++f) {
      out << (f == 0 ? "" : ",") << format_real(fv.values[f]);
    }
    out << "\n";
  }
}

void cmd_profile(const RunConfig& config, const std::filesystem::path& labeled_file,
                 std::ostream& out, std::ostream* json_out) {
  const LoadedResources resources = load_resources(config);
  const IngestResult data = ingest(labeled_file, config.task);
  const auto profile = eval::class_feature_profile(data.documents, resources.bundle);

  const auto& names = features::feature_names();
  out << "class,count";
  for (const auto& name : names) out << ',' << name;
  out << "\n";
  for (std::size_t c = 0; c < profile.class_ids.size(); ++c) {
    out << data.labels.name_of(static_cast<std::size_t>(profile.class_ids[c]))
        << ',' << profile.class_counts[c];
    for (double v : profile.means[c]) out << ',' << format_real(v);
    out << "\n";
  }

  if (json_out != nullptr) {
    json j = json::array();
    for (std::size_t c = 0; c < profile.class_ids.size(); ++c) {
      json entry;
      entry["class"] =
          data.labels.name_of(static_cast<std::size_t>(profile.class_ids[c]));
      entry["count"] = profile.class_counts[c];
      json means;
      for (std::size_t f = 0; f < names.size(); ++f) {
        means[names[f]] = profile.means[c][f];
      }
      entry["means"] = std::move(means);
      j.push_back(std::move(entry));
    }
    *json_out << j.dump(2) << "\n";
  }
}

}  // namespace desc::cli

#include "desc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "desc/errors.hpp"

namespace desc::eval {

ConfusionCounts confusion(std::span<const std::size_t> gold,
                          std::span<const std::size_t> predicted,
                          std::size_t n_classes) {
  ConfusionCounts counts;
  counts.total = gold.size();
  counts.tp.assign(n_classes, 0);
  counts.fp.assign(n_classes, 0);
  counts.fn.assign(n_classes, 0);
  counts.tn.assign(n_classes, 0);
  for (std::size_t i = 0; i < gold.size(); ++i) {
    for (std::size_t c = 0; c < n_classes; ++c) {
      const bool is_gold = gold[i] == c;
      const bool is_pred = predicted[i] == c;
      if (is_gold && is_pred) ++counts.tp[c];
      else if (!is_gold && is_pred) ++counts.fp[c];
      else if (is_gold && !is_pred) ++counts.fn[c];
      else ++counts.tn[c];
    }
  }
  return counts;
}

ClassificationMetrics classification_metrics(std::span<const std::size_t> gold,
                                             std::span<const std::size_t> predicted,
                                             std::size_t n_classes) {
  if (gold.size() != predicted.size()) {
    throw LengthMismatch("metrics: " + std::to_string(gold.size()) +
                         " gold labels vs " + std::to_string(predicted.size()) +
                         " predictions");
  }
  if (gold.empty()) throw EmptyInput("metrics: empty label lists");

  if (n_classes == 0) {
    for (std::size_t v : gold) n_classes = std::max(n_classes, v + 1);
    for (std::size_t v : predicted) n_classes = std::max(n_classes, v + 1);
  }

  const ConfusionCounts counts = confusion(gold, predicted, n_classes);
  ClassificationMetrics metrics;
  metrics.precision.resize(n_classes);
  metrics.recall.resize(n_classes);
  metrics.f1.resize(n_classes);

  std::size_t correct = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] == predicted[i]) ++correct;
  }
  metrics.accuracy = static_cast<double>(correct) / static_cast<double>(gold.size());

  for (std::size_t c = 0; c < n_classes; ++c) {
    const double tp = static_cast<double>(counts.tp[c]);
    const double fp = static_cast<double>(counts.fp[c]);
    const double fn = static_cast<double>(counts.fn[c]);
    const double p = tp + fp > 0.0 ? tp / (tp + fp) : 0.0;
    const double r = tp + fn > 0.0 ? tp / (tp + fn) : 0.0;
    metrics.precision[c] = p;
    metrics.recall[c] = r;
    metrics.f1[c] = p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
    metrics.macro_precision += p;
    metrics.macro_recall += r;
    metrics.macro_f1 += metrics.f1[c];
  }
  metrics.macro_precision /= static_cast<double>(n_classes);
  metrics.macro_recall /= static_cast<double>(n_classes);
  metrics.macro_f1 /= static_cast<double>(n_classes);
  return metrics;
}

RocCurve roc_auc(std::span<const std::size_t> gold,
                 std::span<const double> scores) {
  if (gold.size() != scores.size()) {
    throw LengthMismatch("roc: " + std::to_string(gold.size()) + " labels vs " +
                         std::to_string(scores.size()) + " scores");
  }
  std::size_t n_pos = 0;
  for (std::size_t g : gold) n_pos += g == 1 ? 1 : 0;
  const std::size_t n_neg = gold.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw SingleClassInput("roc needs both classes in the gold labels");
  }

  std::vector<std::size_t> order(gold.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });

  RocCurve curve;
  curve.points.emplace_back(0.0, 0.0);

  // Integer accumulation at every distinct threshold keeps the trapezoid sum
  // exactly equal to the pairwise tie-aware count.
  std::size_t tp = 0, fp = 0;
  unsigned long long twice_area = 0;  // sum of d_fp * (tp_before + tp_after)
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    std::size_t d_tp = 0, d_fp = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      if (gold[order[j]] == 1) ++d_tp; else ++d_fp;
      ++j;
    }
    twice_area += static_cast<unsigned long long>(d_fp) * (2 * tp + d_tp);
    tp += d_tp;
    fp += d_fp;
    curve.points.emplace_back(static_cast<double>(fp) / static_cast<double>(n_neg),
                              static_cast<double>(tp) / static_cast<double>(n_pos));
    i = j;
  }
  curve.auc = static_cast<double>(twice_area) /
              (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));
  return curve;
}

SentimentMetrics sentiment_metrics(std::span<const double> gold,
                                   std::span<const double> predicted) {
  if (gold.size() != predicted.size()) {
    throw LengthMismatch("sentiment metrics: " + std::to_string(gold.size()) +
                         " gold vs " + std::to_string(predicted.size()) +
                         " predicted");
  }
  SentimentMetrics out;
  double dot = 0.0, norm_g = 0.0, norm_p = 0.0, err = 0.0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    dot += gold[i] * predicted[i];
    norm_g += gold[i] * gold[i];
    norm_p += predicted[i] * predicted[i];
    const double d = gold[i] - predicted[i];
    err += d * d;
  }
  out.cosine = norm_g > 0.0 && norm_p > 0.0
                   ? dot / (std::sqrt(norm_g) * std::sqrt(norm_p))
                   : 0.0;
  out.mse = gold.empty() ? 0.0 : err / static_cast<double>(gold.size());
  return out;
}

ClassProfile class_feature_profile(std::span<const text::Document> documents,
                                   const resources::ResourceBundle& bundle) {
  std::map<int, std::vector<const text::Document*>> by_class;
  for (const auto& doc : documents) {
    if (doc.label.has_value()) by_class[*doc.label].push_back(&doc);
  }
  if (by_class.empty()) {
    throw EmptyClass("profile: no labeled documents");
  }

  ClassProfile profile;
  for (const auto& [class_id, docs] : by_class) {
    std::array<double, features::kFeatureCount> mean{};
    for (const text::Document* doc : docs) {
      const auto fv = features::extract_features(*doc, bundle);
      for (std::size_t f = 0; f < features::kFeatureCount; ++f) {
        mean[f] += fv.values[f];
      }
    }
    for (double& v : mean) v /= static_cast<double>(docs.size());
    profile.class_ids.push_back(class_id);
    profile.class_counts.push_back(docs.size());
    profile.means.push_back(mean);
  }
  return profile;
}

}  // namespace desc::eval

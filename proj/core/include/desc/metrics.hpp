#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "desc/features.hpp"
#include "desc/resources.hpp"
#include "desc/text.hpp"

namespace desc::eval {

struct ConfusionCounts {
  std::vector<std::size_t> tp, fp, fn, tn;  // per class
  std::size_t total = 0;
};

ConfusionCounts confusion(std::span<const std::size_t> gold,
                          std::span<const std::size_t> predicted,
                          std::size_t n_classes);

struct ClassificationMetrics {
  double accuracy = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  std::vector<double> precision, recall, f1;  // per class; 0/0 counts as 0
};

// n_classes = 0 infers max(gold, predicted) + 1.
ClassificationMetrics classification_metrics(std::span<const std::size_t> gold,
                                             std::span<const std::size_t> predicted,
                                             std::size_t n_classes = 0);

struct RocCurve {
  // (FPR, TPR) from a threshold sweep over the distinct scores, starting at
  // (0, 0) and ending at (1, 1), monotone in FPR.
  std::vector<std::pair<double, double>> points;
  double auc = 0.0;  // trapezoid rule; equals the pairwise Mann-Whitney statistic
};

// gold labels are 0/1 with class 1 positive; both classes must be present.
RocCurve roc_auc(std::span<const std::size_t> gold, std::span<const double> scores);

struct SentimentMetrics {
  double cosine = 0.0;  // 0 when either vector has zero norm
  double mse = 0.0;
};

SentimentMetrics sentiment_metrics(std::span<const double> gold,
                                   std::span<const double> predicted);

struct ClassProfile {
  std::vector<int> class_ids;              // observed classes, ascending
  std::vector<std::size_t> class_counts;
  // means[c][f]: mean of feature f over the documents of class_ids[c]
  std::vector<std::array<double, features::kFeatureCount>> means;
};

// Per-class mean of every engineered feature over labeled documents.
ClassProfile class_feature_profile(std::span<const text::Document> documents,
                                   const resources::ResourceBundle& bundle);

}  // namespace desc::eval

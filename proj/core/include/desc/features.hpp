#pragma once

#include <array>
#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "desc/resources.hpp"
#include "desc/text.hpp"

namespace desc::features {

inline constexpr std::size_t kSyntacticCount = 12;
inline constexpr std::size_t kDemonstrativeCount = 8;
inline constexpr std::size_t kSentimentCount = 12;
inline constexpr std::size_t kMoodCount = 8;
inline constexpr std::size_t kReadabilityCount = 4;
inline constexpr std::size_t kFeatureCount =
    kSyntacticCount + kDemonstrativeCount + kSentimentCount + kMoodCount +
    kReadabilityCount;  // 44

// Canonical feature order; CSV headers, profiles and model input specs all
// use these names.
const std::array<std::string, kFeatureCount>& feature_names();

struct FeatureVector {
  std::array<double, kFeatureCount> values{};
};

// Relative POS-tag frequency over word + punctuation tokens, in PosTag order.
std::array<double, kSyntacticCount> syntactic_features(
    const text::Document& doc, const resources::PosLexicon& pos);

// (word count, emoji count, average word length, punctuation frequency,
//  '!'/'?' count, elongated-word count, polysyllabic frequency,
//  all-caps word count)
std::array<double, kDemonstrativeCount> demonstrative_features(
    const text::Document& doc);

// Per lexicon, in bundle order: mean positive score, mean negative score,
// and their difference (the sentiment contrast), averaged over word tokens.
std::array<double, kSentimentCount> sentiment_features(
    const text::Document& doc,
    const std::array<resources::SentimentLexicon, 4>& lexicons);

// Per-dimension mean of the mood vectors over all word tokens.
std::array<double, kMoodCount> mood_features(const text::Document& doc,
                                             const resources::MoodLexicon& mood);

// (difficult-word count, Dale-Chall, Flesch, Gunning Fog); all four are 0
// when the document has no words or no sentences.
std::array<double, kReadabilityCount> readability_features(
    const text::Document& doc, const resources::WordList& easy_words);

FeatureVector extract_features(const text::Document& doc,
                               const resources::ResourceBundle& resources);

// ---- Tf-Idf over unigrams and adjacent bigrams of normalized tokens ----

struct SparseEntry {
  std::size_t column = 0;
  double value = 0.0;
};
using SparseVector = std::vector<SparseEntry>;  // sorted by column

// Unigrams then adjacent bigrams (two normalized tokens joined by a space).
std::vector<std::string> document_ngrams(const text::Document& doc);

class TfidfModel {
 public:
  // Keeps every ngram with document frequency >= min_df; columns are the
  // surviving ngrams in lexicographic order. idf(t) = ln((1+N)/(1+df)) + 1.
  static TfidfModel fit(std::span<const text::Document> corpus,
                        std::size_t min_df = 2);

  std::size_t vocabulary_size() const { return ngrams_.size(); }
  std::size_t document_count() const { return n_documents_; }
  const std::vector<std::string>& ngrams() const { return ngrams_; }
  std::optional<std::size_t> column_of(const std::string& ngram) const;
  std::size_t document_frequency(std::size_t column) const { return df_[column]; }
  double idf(std::size_t column) const;

  // raw term count * idf, L2-normalized; the zero vector stays zero;
  // out-of-vocabulary ngrams are ignored
  SparseVector transform(const text::Document& doc) const;
  std::vector<double> transform_dense(const text::Document& doc) const;

  void save(std::ostream& out) const;
  static TfidfModel load(std::istream& in);
  void save_file(const std::filesystem::path& path) const;
  static TfidfModel load_file(const std::filesystem::path& path);

 private:
  std::vector<std::string> ngrams_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::size_t> df_;
  std::size_t n_documents_ = 0;
};

}  // namespace desc::features

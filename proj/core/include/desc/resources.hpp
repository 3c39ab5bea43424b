#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace desc::resources {

struct SentimentScore {
  double pos = 0.0;
  double neg = 0.0;
};

// Word-level positive/negative scores in [0, 1]. Lookups are total: an
// absent word scores (0, 0).
class SentimentLexicon {
 public:
  SentimentLexicon() = default;
  explicit SentimentLexicon(std::string name) : name_(std::move(name)) {}

  const std::string& name() const { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }

  // Scores outside [0, 1] are clamped; each clamp bumps clamp_warnings().
  void insert(const std::string& word, double pos, double neg);
  SentimentScore lookup(const std::string& word) const;

  std::size_t size() const { return entries_.size(); }
  std::size_t clamp_warnings() const { return clamp_warnings_; }
  const std::unordered_map<std::string, SentimentScore>& entries() const {
    return entries_;
  }

 private:
  std::string name_;
  std::unordered_map<std::string, SentimentScore> entries_;
  std::size_t clamp_warnings_ = 0;
};

inline constexpr std::size_t kMoodDims = 8;
using MoodVector = std::array<double, kMoodDims>;

// Fixed dimension order of every mood vector.
extern const std::array<const char*, kMoodDims> kMoodDimNames;

class MoodLexicon {
 public:
  void insert(const std::string& word, const MoodVector& moods);
  // absent word -> zero vector
  MoodVector lookup(const std::string& word) const;

  std::size_t size() const { return entries_.size(); }
  const std::unordered_map<std::string, MoodVector>& entries() const {
    return entries_;
  }

 private:
  std::unordered_map<std::string, MoodVector> entries_;
};

// Case-insensitive word membership (Dale-Chall easy-word list).
class WordList {
 public:
  void insert(const std::string& word);
  bool contains(const std::string& word) const;
  std::size_t size() const { return words_.size(); }
  const std::unordered_set<std::string>& words() const { return words_; }

 private:
  std::unordered_set<std::string> words_;
};

// Coarse 12-tag set shared with the syntactic feature group.
enum class PosTag {
  Noun = 0,
  Verb,
  Adj,
  Adv,
  Pron,
  Det,
  Adp,
  Conj,
  Num,
  Intj,
  Punct,
  Other
};
inline constexpr std::size_t kPosTagCount = 12;

const char* pos_tag_name(PosTag tag);
std::optional<PosTag> pos_tag_from_name(std::string_view name);

class PosLexicon {
 public:
  PosLexicon();  // starts with the built-in suffix rules

  void insert(const std::string& word, PosTag tag);
  std::optional<PosTag> lookup(const std::string& word) const;
  // lexicon lookup, then ordered suffix rules, then Other
  PosTag tag_word(const std::string& word) const;

  std::size_t size() const { return entries_.size(); }
  const std::unordered_map<std::string, PosTag>& entries() const {
    return entries_;
  }
  const std::vector<std::pair<std::string, PosTag>>& suffix_rules() const {
    return suffix_rules_;
  }

 private:
  std::unordered_map<std::string, PosTag> entries_;
  std::vector<std::pair<std::string, PosTag>> suffix_rules_;
};

class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  explicit EmbeddingTable(std::size_t dimension);

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return vectors_.size(); }

  void insert(const std::string& token, std::vector<double> vector);
  // unknown token -> the all-zeros vector
  std::span<const double> lookup(const std::string& token) const;
  const std::unordered_map<std::string, std::vector<double>>& vectors() const {
    return vectors_;
  }

 private:
  std::size_t dimension_ = 0;
  std::unordered_map<std::string, std::vector<double>> vectors_;
  std::vector<double> oov_;
};

// ---- loaders ----
// Formats are line-oriented UTF-8; '#'-prefixed lines are comments except in
// embedding files, where '#' can begin a real token.

// word<TAB>pos<TAB>neg
SentimentLexicon load_sentiment_lexicon(const std::filesystem::path& path,
                                        std::string name = "");
// word<TAB>v1<TAB>...<TAB>v8 in kMoodDimNames order
MoodLexicon load_mood_lexicon(const std::filesystem::path& path);
// one word per line, stored lowercase
WordList load_wordlist(const std::filesystem::path& path);
// word<TAB>TAGNAME
PosLexicon load_pos_lexicon(const std::filesystem::path& path);
// token v1 v2 ... vD, dimension inferred from the first line
EmbeddingTable load_embeddings(const std::filesystem::path& path);

// ---- writers (same formats, full-precision values) ----
void save_sentiment_lexicon(const SentimentLexicon& lex,
                            const std::filesystem::path& path);
void save_mood_lexicon(const MoodLexicon& lex, const std::filesystem::path& path);
void save_wordlist(const WordList& list, const std::filesystem::path& path);
void save_pos_lexicon(const PosLexicon& lex, const std::filesystem::path& path);
void save_embeddings(const EmbeddingTable& table,
                     const std::filesystem::path& path);

// DepecheMood plays a sentiment role too: pos = mean(happiness, inspiration,
// amusement), neg = mean(sadness, fear, anger), both clamped to [0, 1].
SentimentLexicon sentiment_from_mood(const MoodLexicon& mood,
                                     std::string name = "depechemood");

// Canonical lexicon order of the 12 sentiment feature slots.
extern const std::array<const char*, 4> kSentimentLexiconNames;

struct ResourceBundle {
  std::array<SentimentLexicon, 4> sentiment;  // kSentimentLexiconNames order
  MoodLexicon mood;
  WordList easy_words;
  PosLexicon pos;
};

}  // namespace desc::resources

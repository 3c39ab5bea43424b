#include "desc/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "desc/errors.hpp"

namespace desc::features {

namespace {

using text::Document;
using text::Token;
using text::TokenKind;

std::size_t word_count(const Document& doc) {
  std::size_t n = 0;
  for (const Token& tok : doc.tokens) {
    if (tok.kind == TokenKind::Word) ++n;
  }
  return n;
}

std::size_t codepoint_length(const std::string& s) {
  return text::decode_utf8(s).size();
}

// A word is treated as a proper noun when it is capitalized anywhere but the
// first word of its sentence.
std::vector<bool> capitalized_mid_sentence_flags(const Document& doc) {
  std::vector<bool> flags(doc.tokens.size(), false);
  for (const auto& range : doc.sentences) {
    bool saw_first_word = false;
    for (std::size_t i = range.begin; i < range.end; ++i) {
      const Token& tok = doc.tokens[i];
      if (tok.kind != TokenKind::Word) continue;
      if (!saw_first_word) {
        saw_first_word = true;
        continue;
      }
      const char c = tok.surface.empty() ? '\0' : tok.surface[0];
      flags[i] = c >= 'A' && c <= 'Z';
    }
  }
  return flags;
}

}  // namespace

const std::array<std::string, kFeatureCount>& feature_names() {
  static const std::array<std::string, kFeatureCount> names = [] {
    std::array<std::string, kFeatureCount> n;
    std::size_t i = 0;
    for (std::size_t t = 0; t < resources::kPosTagCount; ++t) {
      std::string tag = resources::pos_tag_name(static_cast<resources::PosTag>(t));
      std::transform(tag.begin(), tag.end(), tag.begin(),
                     [](unsigned char c) { return std::tolower(c); });
      n[i++] = "pos_freq_" + tag;
    }
    n[i++] = "word_count";
    n[i++] = "emoji_count";
    n[i++] = "avg_word_length";
    n[i++] = "punct_freq";
    n[i++] = "exclamation_question_count";
    n[i++] = "elongated_word_count";
    n[i++] = "polysyllabic_freq";
    n[i++] = "all_caps_count";
    for (const char* lex : resources::kSentimentLexiconNames) {
      n[i++] = std::string(lex) + "_pos";
      n[i++] = std::string(lex) + "_neg";
      n[i++] = std::string(lex) + "_contrast";
    }
    for (const char* dim : resources::kMoodDimNames) {
      n[i++] = std::string("mood_") + dim;
    }
    n[i++] = "difficult_word_count";
    n[i++] = "dale_chall";
    n[i++] = "flesch";
    n[i++] = "gunning_fog";
    return n;
  }();
  return names;
}

std::array<double, kSyntacticCount> syntactic_features(
    const Document& doc, const resources::PosLexicon& pos) {
  std::array<double, kSyntacticCount> freq{};
  std::size_t denom = 0;
  for (const Token& tok : doc.tokens) {
    if (tok.kind == TokenKind::Word) {
      ++freq[static_cast<std::size_t>(pos.tag_word(tok.normalized))];
      ++denom;
    } else if (tok.kind == TokenKind::Punctuation) {
      ++freq[static_cast<std::size_t>(resources::PosTag::Punct)];
      ++denom;
    }
  }
  if (denom == 0) return {};
  for (double& f : freq) f /= static_cast<double>(denom);
  return freq;
}

std::array<double, kDemonstrativeCount> demonstrative_features(
    const Document& doc) {
  std::array<double, kDemonstrativeCount> out{};
  std::size_t words = 0;
  std::size_t emojis = 0;
  std::size_t puncts = 0;
  std::size_t marks = 0;
  std::size_t elongated = 0;
  std::size_t polysyllabic = 0;
  std::size_t all_caps = 0;
  std::size_t word_chars = 0;

  for (const Token& tok : doc.tokens) {
    switch (tok.kind) {
      case TokenKind::Word:
        ++words;
        word_chars += codepoint_length(tok.surface);
        if (tok.is_elongated) ++elongated;
        if (text::is_polysyllabic(tok.normalized)) ++polysyllabic;
        if (tok.is_all_caps) ++all_caps;
        break;
      case TokenKind::Emoji:
        ++emojis;
        break;
      case TokenKind::Punctuation:
        ++puncts;
        if (tok.surface == "!" || tok.surface == "?") ++marks;
        break;
      default:
        break;
    }
  }

  out[0] = static_cast<double>(words);
  out[1] = static_cast<double>(emojis);
  out[2] = words == 0 ? 0.0 : static_cast<double>(word_chars) / words;
  out[3] = doc.tokens.empty()
               ? 0.0
               : static_cast<double>(puncts) / doc.tokens.size();
  out[4] = static_cast<double>(marks);
  out[5] = static_cast<double>(elongated);
  out[6] = words == 0 ? 0.0 : static_cast<double>(polysyllabic) / words;
  out[7] = static_cast<double>(all_caps);
  return out;
}

std::array<double, kSentimentCount> sentiment_features(
    const Document& doc,
    const std::array<resources::SentimentLexicon, 4>& lexicons) {
  std::array<double, kSentimentCount> out{};
  const std::size_t n = word_count(doc);
  if (n == 0) return out;

  for (std::size_t l = 0; l < lexicons.size(); ++l) {
    double pos_sum = 0.0;
    double neg_sum = 0.0;
    for (const Token& tok : doc.tokens) {
      if (tok.kind != TokenKind::Word) continue;
      const auto score = lexicons[l].lookup(tok.normalized);
      pos_sum += score.pos;
      neg_sum += score.neg;
    }
    const double s_pos = pos_sum / static_cast<double>(n);
    const double s_neg = neg_sum / static_cast<double>(n);
    out[3 * l] = s_pos;
    out[3 * l + 1] = s_neg;
    out[3 * l + 2] = s_pos - s_neg;
  }
  return out;
}

std::array<double, kMoodCount> mood_features(const Document& doc,
                                             const resources::MoodLexicon& mood) {
  std::array<double, kMoodCount> out{};
  const std::size_t n = word_count(doc);
  if (n == 0) return out;

  for (const Token& tok : doc.tokens) {
    if (tok.kind != TokenKind::Word) continue;
    const auto moods = mood.lookup(tok.normalized);
    for (std::size_t d = 0; d < resources::kMoodDims; ++d) out[d] += moods[d];
  }
  for (double& v : out) v /= static_cast<double>(n);
  return out;
}

std::array<double, kReadabilityCount> readability_features(
    const Document& doc, const resources::WordList& easy_words) {
  std::array<double, kReadabilityCount> out{};
  const std::size_t words = word_count(doc);
  const std::size_t sentences = doc.sentences.size();
  if (words == 0 || sentences == 0) return out;

  const std::vector<bool> cap_mid = capitalized_mid_sentence_flags(doc);
  std::size_t difficult = 0;
  std::size_t syllables = 0;
  std::size_t complex_words = 0;
  for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
    const Token& tok = doc.tokens[i];
    if (tok.kind != TokenKind::Word) continue;
    if (!easy_words.contains(tok.normalized)) ++difficult;
    syllables += text::count_syllables(tok.normalized);
    if (text::is_complex_word(tok.surface, cap_mid[i])) ++complex_words;
  }

  const double w = static_cast<double>(words);
  const double s = static_cast<double>(sentences);
  out[0] = static_cast<double>(difficult);
  out[1] = 0.1579 * (static_cast<double>(difficult) / w * 100.0) + 0.0496 * (w / s);
  out[2] = 206.835 - 1.015 * (w / s) - 84.6 * (static_cast<double>(syllables) / w);
  out[3] = 0.4 * ((w / s) + 100.0 * (static_cast<double>(complex_words) / w));
  return out;
}

FeatureVector extract_features(const Document& doc,
                               const resources::ResourceBundle& resources) {
  FeatureVector fv;
  std::size_t i = 0;
  for (double v : syntactic_features(doc, resources.pos)) fv.values[i++] = v;
  for (double v : demonstrative_features(doc)) fv.values[i++] = v;
  for (double v : sentiment_features(doc, resources.sentiment)) fv.values[i++] = v;
  for (double v : mood_features(doc, resources.mood)) fv.values[i++] = v;
  for (double v : readability_features(doc, resources.easy_words)) fv.values[i++] = v;
  return fv;
}

// ---- Tf-Idf ----

std::vector<std::string> document_ngrams(const Document& doc) {
  std::vector<std::string> grams;
  grams.reserve(doc.tokens.size() * 2);
  for (const Token& tok : doc.tokens) grams.push_back(tok.normalized);
  const std::size_t n = doc.tokens.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    grams.push_back(doc.tokens[i].normalized + " " + doc.tokens[i + 1].normalized);
  }
  return grams;
}

TfidfModel TfidfModel::fit(std::span<const Document> corpus, std::size_t min_df) {
  if (corpus.empty()) throw EmptyCorpus("tf-idf corpus is empty");

  std::map<std::string, std::size_t> df;
  for (const Document& doc : corpus) {
    const auto grams = document_ngrams(doc);
    const std::set<std::string> unique(grams.begin(), grams.end());
    for (const auto& g : unique) ++df[g];
  }

  TfidfModel model;
  model.n_documents_ = corpus.size();
  for (const auto& [gram, count] : df) {
    if (count < min_df) continue;
    model.index_[gram] = model.ngrams_.size();
    model.ngrams_.push_back(gram);
    model.df_.push_back(count);
  }
  return model;
}

std::optional<std::size_t> TfidfModel::column_of(const std::string& ngram) const {
  const auto it = index_.find(ngram);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

double TfidfModel::idf(std::size_t column) const {
  return std::log(static_cast<double>(1 + n_documents_) /
                  static_cast<double>(1 + df_[column])) +
         1.0;
}

SparseVector TfidfModel::transform(const Document& doc) const {
  std::map<std::size_t, double> counts;
  for (const auto& gram : document_ngrams(doc)) {
    if (const auto col = column_of(gram)) counts[*col] += 1.0;
  }

  SparseVector vec;
  vec.reserve(counts.size());
  double norm_sq = 0.0;
  for (const auto& [col, count] : counts) {
    const double value = count * idf(col);
    vec.push_back({col, value});
    norm_sq += value * value;
  }
  if (norm_sq > 0.0) {
    const double norm = std::sqrt(norm_sq);
    for (auto& entry : vec) entry.value /= norm;
  }
  return vec;
}

std::vector<double> TfidfModel::transform_dense(const Document& doc) const {
  std::vector<double> dense(vocabulary_size(), 0.0);
  for (const auto& entry : transform(doc)) dense[entry.column] = entry.value;
  return dense;
}

void TfidfModel::save(std::ostream& out) const {
  out << "desc-tfidf 1\n";
  out << "documents " << n_documents_ << "\n";
  out << "ngrams " << ngrams_.size() << "\n";
  for (std::size_t i = 0; i < ngrams_.size(); ++i) {
    out << df_[i] << '\t' << ngrams_[i] << '\n';
  }
}

TfidfModel TfidfModel::load(std::istream& in) {
  std::string header;
  std::getline(in, header);
  if (header != "desc-tfidf 1") {
    throw VersionMismatch("unsupported tf-idf file header: '" + header + "'");
  }
  std::string word;
  std::size_t n_documents = 0;
  std::size_t n_ngrams = 0;
  in >> word >> n_documents;
  if (word != "documents") throw VersionMismatch("malformed tf-idf file");
  in >> word >> n_ngrams;
  if (word != "ngrams") throw VersionMismatch("malformed tf-idf file");
  in.ignore();

  TfidfModel model;
  model.n_documents_ = n_documents;
  std::string line;
  for (std::size_t i = 0; i < n_ngrams; ++i) {
    if (!std::getline(in, line)) throw VersionMismatch("truncated tf-idf file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) throw VersionMismatch("malformed tf-idf row");
    model.df_.push_back(std::stoul(line.substr(0, tab)));
    model.index_[line.substr(tab + 1)] = model.ngrams_.size();
    model.ngrams_.push_back(line.substr(tab + 1));
  }
  return model;
}

void TfidfModel::save_file(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw MissingFile("cannot create " + path.string());
  save(out);
}

TfidfModel TfidfModel::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingFile("cannot open " + path.string());
  return load(in);
}

}  // namespace desc::features

#include "desc/resources.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "desc/errors.hpp"
#include "desc/text.hpp"

namespace desc::resources {

namespace {

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingFile("cannot open " + path.string());
  return in;
}

std::ofstream create_or_throw(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw MissingFile("cannot create " + path.string());
  return out;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return fields;
}

double parse_real(const std::string& text, const std::filesystem::path& path,
                  std::size_t line_no) {
  const char* begin = text.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(value)) {
    throw MalformedRow(path.string() + ":" + std::to_string(line_no) +
                       ": not a number: '" + text + "'");
  }
  return value;
}

bool is_comment_or_blank(const std::string& line) {
  return line.empty() || line[0] == '#';
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

}  // namespace

const std::array<const char*, kMoodDims> kMoodDimNames = {
    "happiness", "sadness", "annoyance",    "inspiration",
    "fear",      "indifference", "anger",   "amusement"};

const std::array<const char*, 4> kSentimentLexiconNames = {
    "sentiwordnet", "vader", "afinn", "depechemood"};

// ---- SentimentLexicon ----

void SentimentLexicon::insert(const std::string& word, double pos, double neg) {
  const double cp = clamp01(pos);
  const double cn = clamp01(neg);
  if (cp != pos || cn != neg) ++clamp_warnings_;
  entries_[word] = SentimentScore{cp, cn};
}

SentimentScore SentimentLexicon::lookup(const std::string& word) const {
  const auto it = entries_.find(word);
  return it == entries_.end() ? SentimentScore{} : it->second;
}

// ---- MoodLexicon ----

void MoodLexicon::insert(const std::string& word, const MoodVector& moods) {
  entries_[word] = moods;
}

MoodVector MoodLexicon::lookup(const std::string& word) const {
  const auto it = entries_.find(word);
  return it == entries_.end() ? MoodVector{} : it->second;
}

// ---- WordList ----

void WordList::insert(const std::string& word) {
  words_.insert(text::to_lower(word));
}

bool WordList::contains(const std::string& word) const {
  return words_.count(text::to_lower(word)) > 0;
}

// ---- PosLexicon ----

const char* pos_tag_name(PosTag tag) {
  switch (tag) {
    case PosTag::Noun: return "NOUN";
    case PosTag::Verb: return "VERB";
    case PosTag::Adj: return "ADJ";
    case PosTag::Adv: return "ADV";
    case PosTag::Pron: return "PRON";
    case PosTag::Det: return "DET";
    case PosTag::Adp: return "ADP";
    case PosTag::Conj: return "CONJ";
    case PosTag::Num: return "NUM";
    case PosTag::Intj: return "INTJ";
    case PosTag::Punct: return "PUNCT";
    case PosTag::Other: return "OTHER";
  }
  return "OTHER";
}

std::optional<PosTag> pos_tag_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kPosTagCount; ++i) {
    const PosTag tag = static_cast<PosTag>(i);
    if (name == pos_tag_name(tag)) return tag;
  }
  return std::nullopt;
}

PosLexicon::PosLexicon() {
  suffix_rules_ = {
      {"ing", PosTag::Verb}, {"ed", PosTag::Verb},   {"ly", PosTag::Adv},
      {"tion", PosTag::Noun}, {"ness", PosTag::Noun}, {"ment", PosTag::Noun},
      {"ous", PosTag::Adj},   {"ful", PosTag::Adj},   {"ive", PosTag::Adj},
      {"est", PosTag::Adj},   {"er", PosTag::Noun},   {"s", PosTag::Noun},
  };
}

void PosLexicon::insert(const std::string& word, PosTag tag) {
  entries_[text::to_lower(word)] = tag;
}

std::optional<PosTag> PosLexicon::lookup(const std::string& word) const {
  const auto it = entries_.find(text::to_lower(word));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

PosTag PosLexicon::tag_word(const std::string& word) const {
  if (const auto tag = lookup(word)) return *tag;
  const std::string lower = text::to_lower(word);
  for (const auto& [suffix, tag] : suffix_rules_) {
    if (lower.size() > suffix.size() &&
        lower.compare(lower.size() - suffix.size(), suffix.size(), suffix) == 0) {
      return tag;
    }
  }
  return PosTag::Other;
}

// ---- EmbeddingTable ----

EmbeddingTable::EmbeddingTable(std::size_t dimension)
    : dimension_(dimension), oov_(dimension, 0.0) {}

void EmbeddingTable::insert(const std::string& token, std::vector<double> vector) {
  if (dimension_ == 0) {
    dimension_ = vector.size();
    oov_.assign(dimension_, 0.0);
  }
  if (vector.size() != dimension_) {
    throw InconsistentDimension("embedding for '" + token + "' has " +
                                std::to_string(vector.size()) +
                                " values, expected " + std::to_string(dimension_));
  }
  vectors_[token] = std::move(vector);
}

std::span<const double> EmbeddingTable::lookup(const std::string& token) const {
  const auto it = vectors_.find(token);
  if (it == vectors_.end()) return oov_;
  return it->second;
}

// ---- loaders ----

SentimentLexicon load_sentiment_lexicon(const std::filesystem::path& path,
                                        std::string name) {
  std::ifstream in = open_or_throw(path);
  SentimentLexicon lex(name.empty() ? path.stem().string() : std::move(name));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (is_comment_or_blank(line)) continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 3) {
      throw MalformedRow(path.string() + ":" + std::to_string(line_no) +
                         ": expected 3 tab-separated fields, got " +
                         std::to_string(fields.size()));
    }
    lex.insert(fields[0], parse_real(fields[1], path, line_no),
               parse_real(fields[2], path, line_no));
  }
  return lex;
}

MoodLexicon load_mood_lexicon(const std::filesystem::path& path) {
  std::ifstream in = open_or_throw(path);
  MoodLexicon lex;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (is_comment_or_blank(line)) continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 1 + kMoodDims) {
      throw MalformedRow(path.string() + ":" + std::to_string(line_no) +
                         ": expected word + " + std::to_string(kMoodDims) +
                         " scores, got " + std::to_string(fields.size()) +
                         " fields");
    }
    MoodVector moods{};
    for (std::size_t d = 0; d < kMoodDims; ++d) {
      moods[d] = clamp01(parse_real(fields[d + 1], path, line_no));
    }
    lex.insert(fields[0], moods);
  }
  return lex;
}

WordList load_wordlist(const std::filesystem::path& path) {
  std::ifstream in = open_or_throw(path);
  WordList list;
  std::string line;
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (is_comment_or_blank(line)) continue;
    list.insert(line);
  }
  return list;
}

PosLexicon load_pos_lexicon(const std::filesystem::path& path) {
  std::ifstream in = open_or_throw(path);
  PosLexicon lex;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (is_comment_or_blank(line)) continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 2) {
      throw MalformedRow(path.string() + ":" + std::to_string(line_no) +
                         ": expected word<TAB>TAGNAME");
    }
    const auto tag = pos_tag_from_name(fields[1]);
    if (!tag) {
      throw MalformedRow(path.string() + ":" + std::to_string(line_no) +
                         ": unknown POS tag '" + fields[1] + "'");
    }
    lex.insert(fields[0], *tag);
  }
  return lex;
}

EmbeddingTable load_embeddings(const std::filesystem::path& path) {
  std::ifstream in = open_or_throw(path);
  EmbeddingTable table;
  std::string line;
  std::size_t line_no = 0;
  std::size_t dim = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string token;
    fields >> token;
    std::vector<double> values;
    std::string value_text;
    while (fields >> value_text) {
      values.push_back(parse_real(value_text, path, line_no));
    }
    if (values.empty()) {
      throw MalformedRow(path.string() + ":" + std::to_string(line_no) +
                         ": embedding line has no values");
    }
    if (dim == 0) {
      dim = values.size();
    } else if (values.size() != dim) {
      throw InconsistentDimension(
          path.string() + ":" + std::to_string(line_no) + ": expected " +
          std::to_string(dim) + " values, got " + std::to_string(values.size()));
    }
    table.insert(token, std::move(values));
  }
  if (table.size() == 0) throw EmptyFile(path.string() + ": no embeddings");
  return table;
}

// ---- writers ----
// Entries are written in sorted key order so output bytes are reproducible.

void save_sentiment_lexicon(const SentimentLexicon& lex,
                            const std::filesystem::path& path) {
  std::ofstream out = create_or_throw(path);
  std::map<std::string, SentimentScore> sorted(lex.entries().begin(),
                                               lex.entries().end());
  for (const auto& [word, score] : sorted) {
    out << word << '\t' << format_real(score.pos) << '\t'
        << format_real(score.neg) << '\n';
  }
}

void save_mood_lexicon(const MoodLexicon& lex, const std::filesystem::path& path) {
  std::ofstream out = create_or_throw(path);
  std::map<std::string, MoodVector> sorted(lex.entries().begin(),
                                           lex.entries().end());
  for (const auto& [word, moods] : sorted) {
    out << word;
    for (double m : moods) out << '\t' << format_real(m);
    out << '\n';
  }
}

void save_wordlist(const WordList& list, const std::filesystem::path& path) {
  std::ofstream out = create_or_throw(path);
  std::vector<std::string> sorted(list.words().begin(), list.words().end());
  std::sort(sorted.begin(), sorted.end());
  for (const auto& word : sorted) out << word << '\n';
}

void save_pos_lexicon(const PosLexicon& lex, const std::filesystem::path& path) {
  std::ofstream out = create_or_throw(path);
  std::map<std::string, PosTag> sorted(lex.entries().begin(), lex.entries().end());
  for (const auto& [word, tag] : sorted) {
    out << word << '\t' << pos_tag_name(tag) << '\n';
  }
}

void save_embeddings(const EmbeddingTable& table,
                     const std::filesystem::path& path) {
  std::ofstream out = create_or_throw(path);
  std::map<std::string, std::vector<double>> sorted(table.vectors().begin(),
                                                    table.vectors().end());
  for (const auto& [token, values] : sorted) {
    out << token;
    for (double v : values) out << ' ' << format_real(v);
    out << '\n';
  }
}

SentimentLexicon sentiment_from_mood(const MoodLexicon& mood, std::string name) {
  SentimentLexicon lex(std::move(name));
  for (const auto& [word, m] : mood.entries()) {
    // index order: happiness 0, sadness 1, annoyance 2, inspiration 3,
    // fear 4, indifference 5, anger 6, amusement 7
    const double pos = (m[0] + m[3] + m[7]) / 3.0;
    const double neg = (m[1] + m[4] + m[6]) / 3.0;
    lex.insert(word, pos, neg);
  }
  return lex;
}

}  // namespace desc::resources

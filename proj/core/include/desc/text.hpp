#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace desc::text {

enum class TokenKind { Word, Punctuation, Emoji, Hashtag, Mention, Url, Number };

const char* token_kind_name(TokenKind kind);

struct Token {
  std::string surface;
  TokenKind kind = TokenKind::Word;
  // lowercase form with every run of >= 3 identical letters collapsed to 2
  std::string normalized;
  bool is_elongated = false;
  bool is_all_caps = false;
};

// Half-open range [begin, end) of token indices.
struct SentenceRange {
  std::size_t begin = 0;
  std::size_t end = 0;
};

struct Document {
  std::string raw_text;
  std::vector<Token> tokens;
  // Sentence ranges partition the token list: no overlap, no gap.
  std::vector<SentenceRange> sentences;
  std::optional<int> label;  // class id
  std::optional<int> score;  // sentiment score in [-5, 5]
};

// Rule-ordered tokenizer. Kind precedence at each position:
// url -> mention -> hashtag -> emoji -> number -> punctuation -> word.
// Each hashtag additionally yields a word token holding its '#'-stripped body
// so lexicons can score it; the hashtag token itself stays in place.
Document tokenize(const std::string& raw_text);

// Sentence boundaries fall after terminal punctuation (. ! ? and the ellipsis
// character); a run of terminal marks closes one sentence. Text without a
// terminal mark is a single sentence; an empty document has none.
Document split_sentences(Document doc);

// tokenize + split_sentences
Document analyze(const std::string& raw_text);

// Heuristic syllable count: maximal [aeiouy] runs in the lowercased word,
// minus one for a final silent 'e' after a consonant, floored at 1 for any
// word containing a vowel. Vowel-less strings count 0.
std::size_t count_syllables(const std::string& word);

// polysyllabic <=> at least three syllables
bool is_polysyllabic(const std::string& word);

// Complex in the Gunning Fog sense: polysyllabic, not a proper noun
// (approximated by the capitalized_mid_sentence flag), and not pushed over
// three syllables by an -es/-ed/-ing suffix.
bool is_complex_word(const std::string& word, bool capitalized_mid_sentence = false);

// Collapses every run of >= 3 identical letters to exactly two. Never
// lengthens the string and preserves the first and last character.
std::string collapse_elongation(const std::string& word);

bool is_emoji_codepoint(char32_t cp);

// Decodes UTF-8; invalid bytes come back as U+FFFD one byte at a time.
std::vector<char32_t> decode_utf8(const std::string& s);

std::string to_lower(const std::string& s);

}  // namespace desc::text

#include "desc/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace desc::text {

namespace {

bool is_ascii_alpha(char32_t cp) {
  return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
}

bool is_ascii_digit(char32_t cp) { return cp >= '0' && cp <= '9'; }

bool is_space_cp(char32_t cp) {
  return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\f' ||
         cp == '\v' || cp == 0x00A0;
}

// Zero-width and variation selectors carry no surface content of their own.
bool is_ignorable_cp(char32_t cp) {
  return (cp >= 0x200B && cp <= 0x200D) || (cp >= 0xFE00 && cp <= 0xFE0F);
}

bool is_general_punct_cp(char32_t cp) {
  return (cp >= 0x2000 && cp <= 0x206F) ||  // general punctuation, incl. ellipsis
         (cp >= 0x00A1 && cp <= 0x00BF);    // inverted marks, section signs, ...
}

// A letter for tokenization purposes: ASCII alphabetic, or any codepoint
// beyond ASCII that is not an emoji, space, or punctuation-like symbol.
bool is_letter_cp(char32_t cp) {
  if (cp < 0x80) return is_ascii_alpha(cp);
  return !is_emoji_codepoint(cp) && !is_space_cp(cp) && !is_ignorable_cp(cp) &&
         !is_general_punct_cp(cp);
}

bool is_handle_char(char32_t cp) {
  return is_ascii_alpha(cp) || is_ascii_digit(cp) || cp == '_';
}

char32_t lower_cp(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 32;
  return cp;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string encode_utf8(const std::vector<char32_t>& cps, std::size_t begin,
                        std::size_t end) {
  std::string out;
  for (std::size_t i = begin; i < end; ++i) append_utf8(out, cps[i]);
  return out;
}

bool starts_with_ci(const std::vector<char32_t>& cps, std::size_t pos,
                    const char* prefix) {
  for (std::size_t k = 0; prefix[k] != '\0'; ++k) {
    if (pos + k >= cps.size()) return false;
    if (lower_cp(cps[pos + k]) != static_cast<char32_t>(prefix[k])) return false;
  }
  return true;
}

bool is_vowel_letter(char32_t cp) {
  return cp == 'a' || cp == 'e' || cp == 'i' || cp == 'o' || cp == 'u' ||
         cp == 'y';
}

Token make_token(std::string surface, TokenKind kind) {
  Token tok;
  tok.kind = kind;
  tok.normalized = collapse_elongation(to_lower(surface));

  const std::vector<char32_t> cps = decode_utf8(surface);
  std::size_t run = 1;
  std::size_t letters = 0;
  std::size_t upper = 0;
  std::size_t lower = 0;
  for (std::size_t i = 0; i < cps.size(); ++i) {
    if (i > 0 && cps[i] == cps[i - 1] && is_letter_cp(cps[i])) {
      if (++run >= 3) tok.is_elongated = true;
    } else {
      run = 1;
    }
    if (is_ascii_alpha(cps[i])) {
      ++letters;
      if (cps[i] <= 'Z') ++upper; else ++lower;
    }
  }
  tok.is_all_caps = letters >= 2 && lower == 0 && upper == letters;
  tok.surface = std::move(surface);
  return tok;
}

bool is_terminal_punct(const Token& tok) {
  if (tok.kind != TokenKind::Punctuation) return false;
  return tok.surface == "." || tok.surface == "!" || tok.surface == "?" ||
         tok.surface == "…";
}

}  // namespace

const char* token_kind_name(TokenKind kind) {
  switch (kind) {
    case TokenKind::Word: return "word";
    case TokenKind::Punctuation: return "punctuation";
    case TokenKind::Emoji: return "emoji";
    case TokenKind::Hashtag: return "hashtag";
    case TokenKind::Mention: return "mention";
    case TokenKind::Url: return "url";
    case TokenKind::Number: return "number";
  }
  return "unknown";
}

std::vector<char32_t> decode_utf8(const std::string& s) {
  std::vector<char32_t> out;
  out.reserve(s.size());
  std::size_t i = 0;
  const std::size_t n = s.size();
  while (i < n) {
    const unsigned char c = static_cast<unsigned char>(s[i]);
    std::size_t len = 0;
    char32_t cp = 0;
    if (c < 0x80) {
      len = 1;
      cp = c;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    if (i + len > n) {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    bool valid = true;
    for (std::size_t k = 1; k < len; ++k) {
      const unsigned char cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) {
        valid = false;
        break;
      }
      cp = (cp << 6) | (cc & 0x3F);
    }
    if (!valid) {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::string to_lower(const std::string& s) {
  const std::vector<char32_t> cps = decode_utf8(s);
  std::string out;
  out.reserve(s.size());
  for (char32_t cp : cps) append_utf8(out, lower_cp(cp));
  return out;
}

bool is_emoji_codepoint(char32_t cp) {
  struct Range {
    char32_t lo, hi;
  };
  static constexpr std::array<Range, 9> kRanges{{
      {0x2600, 0x26FF},    // miscellaneous symbols
      {0x2700, 0x27BF},    // dingbats
      {0x2B00, 0x2BFF},    // arrows/stars (incl. U+2B50)
      {0x1F1E6, 0x1F1FF},  // regional indicators
      {0x1F300, 0x1F5FF},  // symbols and pictographs
      {0x1F600, 0x1F64F},  // emoticons
      {0x1F680, 0x1F6FF},  // transport
      {0x1F900, 0x1F9FF},  // supplemental symbols
      {0x1FA70, 0x1FAFF},  // extended pictographs
  }};
  for (const auto& r : kRanges) {
    if (cp >= r.lo && cp <= r.hi) return true;
  }
  return false;
}

std::string collapse_elongation(const std::string& word) {
  const std::vector<char32_t> cps = decode_utf8(word);
  std::string out;
  out.reserve(word.size());
  std::size_t run = 0;
  for (std::size_t i = 0; i < cps.size(); ++i) {
    if (i > 0 && cps[i] == cps[i - 1] && is_letter_cp(cps[i])) {
      ++run;
    } else {
      run = 1;
    }
    if (run <= 2) append_utf8(out, cps[i]);
  }
  return out;
}

Document tokenize(const std::string& raw_text) {
  Document doc;
  doc.raw_text = raw_text;

  const std::vector<char32_t> cps = decode_utf8(raw_text);
  const std::size_t n = cps.size();
  std::size_t i = 0;

  while (i < n) {
    if (is_space_cp(cps[i]) || is_ignorable_cp(cps[i])) {
      ++i;
      continue;
    }

    // url
    if (starts_with_ci(cps, i, "http://") || starts_with_ci(cps, i, "https://") ||
        starts_with_ci(cps, i, "www.")) {
      std::size_t j = i;
      while (j < n && !is_space_cp(cps[j])) ++j;
      doc.tokens.push_back(make_token(encode_utf8(cps, i, j), TokenKind::Url));
      i = j;
      continue;
    }

    // mention
    if (cps[i] == '@' && i + 1 < n && is_handle_char(cps[i + 1])) {
      std::size_t j = i + 1;
      while (j < n && is_handle_char(cps[j])) ++j;
      doc.tokens.push_back(make_token(encode_utf8(cps, i, j), TokenKind::Mention));
      i = j;
      continue;
    }

    // hashtag; the body is re-emitted as a word token for lexicon lookup
    if (cps[i] == '#' && i + 1 < n && is_handle_char(cps[i + 1])) {
      std::size_t j = i + 1;
      while (j < n && is_handle_char(cps[j])) ++j;
      doc.tokens.push_back(make_token(encode_utf8(cps, i, j), TokenKind::Hashtag));
      doc.tokens.push_back(make_token(encode_utf8(cps, i + 1, j), TokenKind::Word));
      i = j;
      continue;
    }

    // emoji (one codepoint per token; a trailing variation selector is absorbed)
    if (is_emoji_codepoint(cps[i])) {
      std::size_t j = i + 1;
      if (j < n && cps[j] >= 0xFE00 && cps[j] <= 0xFE0F) ++j;
      doc.tokens.push_back(make_token(encode_utf8(cps, i, i + 1), TokenKind::Emoji));
      i = j;
      continue;
    }

    // number: digits with internal . or , between digits
    if (is_ascii_digit(cps[i])) {
      std::size_t j = i + 1;
      while (j < n) {
        if (is_ascii_digit(cps[j])) {
          ++j;
        } else if ((cps[j] == '.' || cps[j] == ',') && j + 1 < n &&
                   is_ascii_digit(cps[j + 1])) {
          j += 2;
        } else {
          break;
        }
      }
      doc.tokens.push_back(make_token(encode_utf8(cps, i, j), TokenKind::Number));
      i = j;
      continue;
    }

    // word: letters plus apostrophe/hyphen sandwiched between letters
    if (is_letter_cp(cps[i])) {
      std::size_t j = i + 1;
      while (j < n) {
        if (is_letter_cp(cps[j])) {
          ++j;
        } else if ((cps[j] == '\'' || cps[j] == 0x2019 || cps[j] == '-') &&
                   j + 1 < n && is_letter_cp(cps[j + 1])) {
          j += 2;
        } else {
          break;
        }
      }
      doc.tokens.push_back(make_token(encode_utf8(cps, i, j), TokenKind::Word));
      i = j;
      continue;
    }

    // anything left is a single punctuation codepoint
    doc.tokens.push_back(
        make_token(encode_utf8(cps, i, i + 1), TokenKind::Punctuation));
    ++i;
  }

  return doc;
}

Document split_sentences(Document doc) {
  doc.sentences.clear();
  const std::size_t n = doc.tokens.size();
  std::size_t start = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!is_terminal_punct(doc.tokens[i])) continue;
    const bool run_continues = i + 1 < n && is_terminal_punct(doc.tokens[i + 1]);
    if (run_continues) continue;
    doc.sentences.push_back({start, i + 1});
    start = i + 1;
  }
  if (start < n) doc.sentences.push_back({start, n});
  return doc;
}

Document analyze(const std::string& raw_text) {
  return split_sentences(tokenize(raw_text));
}

std::size_t count_syllables(const std::string& word) {
  const std::vector<char32_t> cps = decode_utf8(to_lower(word));
  std::size_t groups = 0;
  bool in_group = false;
  for (char32_t cp : cps) {
    if (is_vowel_letter(cp)) {
      if (!in_group) {
        ++groups;
        in_group = true;
      }
    } else {
      in_group = false;
    }
  }
  if (groups == 0) return 0;

  std::size_t count = groups;
  const std::size_t n = cps.size();
  if (n >= 2 && cps[n - 1] == 'e' && is_ascii_alpha(cps[n - 2]) &&
      !is_vowel_letter(cps[n - 2])) {
    --count;
  }
  return std::max<std::size_t>(count, 1);
}

bool is_polysyllabic(const std::string& word) {
  return count_syllables(word) >= 3;
}

bool is_complex_word(const std::string& word, bool capitalized_mid_sentence) {
  if (capitalized_mid_sentence) return false;
  if (count_syllables(word) < 3) return false;

  const std::string lower = to_lower(word);
  for (const char* suffix : {"ing", "es", "ed"}) {
    const std::size_t len = std::char_traits<char>::length(suffix);
    if (lower.size() > len && lower.compare(lower.size() - len, len, suffix) == 0) {
      const std::string stem = lower.substr(0, lower.size() - len);
      if (count_syllables(stem) < 3) return false;
      break;
    }
  }
  return true;
}

}  // namespace desc::text

#pragma once

// Text primitives shared by every pipeline stage: deterministic tokenization,
// phrase normalization, and contiguous-subsequence containment.

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace gfq {

enum class TextRole { source, student, question, answer };

inline const char* to_string(TextRole r) {
  switch (r) {
    case TextRole::source: return "source";
    case TextRole::student: return "student";
    case TextRole::question: return "question";
    case TextRole::answer: return "answer";
  }
  return "?";
}

namespace unicode {

// Decodes one UTF-8 codepoint starting at s[i]; advances i. Invalid bytes
// decode as themselves so tokenization never throws on odd input.
inline char32_t decode(std::string_view s, size_t& i) {
  unsigned char c = static_cast<unsigned char>(s[i]);
  if (c < 0x80) {
    ++i;
    return c;
  }
  int len = (c >= 0xF0) ? 4 : (c >= 0xE0) ? 3 : (c >= 0xC0) ? 2 : 1;
  if (len == 1 || i + len > s.size()) {
    ++i;
    return c;
  }
  char32_t cp = c & (0xFF >> (len + 1));
  for (int k = 1; k < len; ++k) {
    unsigned char cc = static_cast<unsigned char>(s[i + k]);
    if ((cc & 0xC0) != 0x80) {
      ++i;
      return c;
    }
    cp = (cp << 6) | (cc & 0x3F);
  }
  i += len;
  return cp;
}

inline void encode(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

inline std::vector<char32_t> decode_all(std::string_view s) {
  std::vector<char32_t> cps;
  cps.reserve(s.size());
  size_t i = 0;
  while (i < s.size()) cps.push_back(decode(s, i));
  return cps;
}

// Canonical composition for the Latin combining sequences that show up in
// western-European text. Anything outside the table passes through unchanged.
inline char32_t compose(char32_t base, char32_t mark) {
  struct Entry {
    char32_t base, mark, composed;
  };
  static constexpr std::array<Entry, 58> table{{
      {U'A', 0x300, 0xC0},  {U'A', 0x301, 0xC1},  {U'A', 0x302, 0xC2},
      {U'A', 0x303, 0xC3},  {U'A', 0x308, 0xC4},  {U'A', 0x30A, 0xC5},
      {U'C', 0x327, 0xC7},  {U'E', 0x300, 0xC8},  {U'E', 0x301, 0xC9},
      {U'E', 0x302, 0xCA},  {U'E', 0x308, 0xCB},  {U'I', 0x300, 0xCC},
      {U'I', 0x301, 0xCD},  {U'I', 0x302, 0xCE},  {U'I', 0x308, 0xCF},
      {U'N', 0x303, 0xD1},  {U'O', 0x300, 0xD2},  {U'O', 0x301, 0xD3},
      {U'O', 0x302, 0xD4},  {U'O', 0x303, 0xD5},  {U'O', 0x308, 0xD6},
      {U'U', 0x300, 0xD9},  {U'U', 0x301, 0xDA},  {U'U', 0x302, 0xDB},
      {U'U', 0x308, 0xDC},  {U'Y', 0x301, 0xDD},  {U'a', 0x300, 0xE0},
      {U'a', 0x301, 0xE1},  {U'a', 0x302, 0xE2},  {U'a', 0x303, 0xE3},
      {U'a', 0x308, 0xE4},  {U'a', 0x30A, 0xE5},  {U'c', 0x327, 0xE7},
      {U'e', 0x300, 0xE8},  {U'e', 0x301, 0xE9},  {U'e', 0x302, 0xEA},
      {U'e', 0x308, 0xEB},  {U'i', 0x300, 0xEC},  {U'i', 0x301, 0xED},
      {U'i', 0x302, 0xEE},  {U'i', 0x308, 0xEF},  {U'n', 0x303, 0xF1},
      {U'o', 0x300, 0xF2},  {U'o', 0x301, 0xF3},  {U'o', 0x302, 0xF4},
      {U'o', 0x303, 0xF5},  {U'o', 0x308, 0xF6},  {U'u', 0x300, 0xF9},
      {U'u', 0x301, 0xFA},  {U'u', 0x302, 0xFB},  {U'u', 0x308, 0xFC},
      {U'y', 0x301, 0xFD},  {U'y', 0x308, 0xFF},  {U'a', 0x304, 0x101},
      {U'e', 0x304, 0x113}, {U'c', 0x30C, 0x10D}, {U's', 0x30C, 0x161},
      {U'z', 0x30C, 0x17E},
  }};
  for (const auto& e : table)
    if (e.base == base && e.mark == mark) return e.composed;
  return 0;
}

inline std::string nfc(std::string_view s) {
  std::vector<char32_t> cps = decode_all(s);
  std::string out;
  out.reserve(s.size());
  for (size_t i = 0; i < cps.size(); ++i) {
    if (i + 1 < cps.size()) {
      char32_t c = compose(cps[i], cps[i + 1]);
      if (c) {
        encode(c, out);
        ++i;
        continue;
      }
    }
    encode(cps[i], out);
  }
  return out;
}

inline char32_t to_lower(char32_t cp) {
  if (cp >= U'A' && cp <= U'Z') return cp + 0x20;
  // Latin-1 supplement capitals, skipping the multiplication sign.
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
  if (cp == 0x178) return 0xFF;  // Y with diaeresis
  // Latin extended-A pairs upper/lower codepoints.
  if (cp >= 0x100 && cp <= 0x177 && (cp % 2 == 0)) return cp + 1;
  return cp;
}

inline std::string lower(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  size_t i = 0;
  while (i < s.size()) encode(to_lower(decode(s, i)), out);
  return out;
}

inline bool is_punct(char32_t cp) {
  if (cp < 0x80)
    return (cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) ||
           (cp >= 0x5B && cp <= 0x60) || (cp >= 0x7B && cp <= 0x7E);
  switch (cp) {
    case 0xA1:   // inverted exclamation
    case 0xAB:   // left guillemet
    case 0xBB:   // right guillemet
    case 0xBF:   // inverted question mark
      return true;
    default:
      break;
  }
  // General punctuation block: dashes, curly quotes, ellipsis, daggers.
  return cp >= 0x2010 && cp <= 0x205E;
}

}  // namespace unicode

// True when every codepoint of the token is punctuation ("." "``" "--" ...).
inline bool is_punctuation_token(std::string_view tok) {
  if (tok.empty()) return false;
  size_t i = 0;
  while (i < tok.size())
    if (!unicode::is_punct(unicode::decode(tok, i))) return false;
  return true;
}

// A text plus its deterministic token segmentation. Token spans throughout
// the library index into `tokens`; `raw` keeps the original spelling.
struct TokenizedText {
  std::string raw;
  std::vector<std::string> tokens;
  TextRole role = TextRole::source;

  bool empty() const { return tokens.empty(); }
  std::string pretokenized() const { return join_tokens(tokens); }

  friend bool operator==(const TokenizedText& a, const TokenizedText& b) {
    return a.tokens == b.tokens && a.raw == b.raw && a.role == b.role;
  }
};

namespace detail {

// Splits one whitespace-delimited chunk into tokens: leading and trailing
// punctuation runs detach (runs of the same character stay together, so
// "``" and "..." survive as units), and a final "'s" clitic detaches.
inline void split_chunk(std::string_view chunk, std::vector<std::string>& out) {
  std::vector<char32_t> cps = unicode::decode_all(chunk);
  size_t lo = 0, hi = cps.size();

  std::vector<std::pair<size_t, size_t>> leading;  // [begin, end) runs
  while (lo < hi && unicode::is_punct(cps[lo])) {
    size_t run = lo + 1;
    while (run < hi && cps[run] == cps[lo]) ++run;
    leading.emplace_back(lo, run);
    lo = run;
  }
  std::vector<std::pair<size_t, size_t>> trailing;
  while (hi > lo && unicode::is_punct(cps[hi - 1])) {
    size_t run = hi - 1;
    while (run > lo && cps[run - 1] == cps[hi - 1]) --run;
    trailing.emplace_back(run, hi);
    hi = run;
  }

  auto emit = [&](size_t b, size_t e) {
    std::string tok;
    for (size_t i = b; i < e; ++i) unicode::encode(cps[i], tok);
    out.push_back(std::move(tok));
  };

  for (auto [b, e] : leading) emit(b, e);
  if (lo < hi) {
    // Clitic "'s": keep the apostrophe with the s, detached from the stem.
    bool clitic = hi - lo > 2 && (cps[hi - 1] == U's' || cps[hi - 1] == U'S') &&
                  (cps[hi - 2] == U'\'' || cps[hi - 2] == 0x2019);
    if (clitic) {
      emit(lo, hi - 2);
      emit(hi - 2, hi);
    } else {
      emit(lo, hi);
    }
  }
  for (auto it = trailing.rbegin(); it != trailing.rend(); ++it)
    emit(it->first, it->second);
}

}  // namespace detail

inline std::vector<std::string> split_tokens(std::string_view raw) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < raw.size()) {
    while (i < raw.size() && std::isspace(static_cast<unsigned char>(raw[i])))
      ++i;
    size_t j = i;
    while (j < raw.size() && !std::isspace(static_cast<unsigned char>(raw[j])))
      ++j;
    if (j > i) detail::split_chunk(raw.substr(i, j - i), out);
    i = j;
  }
  return out;
}

inline TokenizedText tokenize(std::string_view raw,
                              TextRole role = TextRole::source) {
  return TokenizedText{std::string(raw), split_tokens(raw), role};
}

// Lowercased, NFC-composed token sequence with outer punctuation stripped.
// The comparison substrate for answer-span containment tests.
struct NormalizedPhrase {
  std::vector<std::string> tokens;

  bool empty() const { return tokens.empty(); }
  std::string joined() const { return join_tokens(tokens); }

  friend bool operator==(const NormalizedPhrase& a, const NormalizedPhrase& b) {
    return a.tokens == b.tokens;
  }
  friend bool operator<(const NormalizedPhrase& a, const NormalizedPhrase& b) {
    return a.tokens < b.tokens;
  }
};

inline NormalizedPhrase normalize(const std::vector<std::string>& tokens) {
  size_t lo = 0, hi = tokens.size();
  while (lo < hi && is_punctuation_token(tokens[lo])) ++lo;
  while (hi > lo && is_punctuation_token(tokens[hi - 1])) --hi;
  NormalizedPhrase out;
  out.tokens.reserve(hi - lo);
  for (size_t i = lo; i < hi; ++i) {
    std::string t = unicode::lower(unicode::nfc(tokens[i]));
    if (!t.empty()) out.tokens.push_back(std::move(t));
  }
  return out;
}

inline NormalizedPhrase normalize(const TokenizedText& text) {
  return normalize(text.tokens);
}

inline NormalizedPhrase normalize(const NormalizedPhrase& phrase) {
  return normalize(phrase.tokens);
}

// True iff needle occurs as a contiguous token subsequence of haystack.
// Empty needles match nothing.
inline bool contains(const NormalizedPhrase& haystack,
                     const NormalizedPhrase& needle) {
  if (needle.empty()) return false;
  auto it = std::search(haystack.tokens.begin(), haystack.tokens.end(),
                        needle.tokens.begin(), needle.tokens.end());
  return it != haystack.tokens.end();
}

}  // namespace gfq

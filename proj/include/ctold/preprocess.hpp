#pragma once

// Tweet normalization: emojis to words, URLs to "http", hashtags to phrases,
// and entity normalization (<user>, <email>, <time>, <money>, <date>).

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <regex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ctold/emoji_table.hpp"
#include "ctold/tensor.hpp"

namespace ctold {

struct RawTweet {
  std::string tweet_id;
  std::string user_id;
  std::string text;
  int label = 0;  // 1 = offensive

  bool operator==(const RawTweet&) const = default;
};

namespace detail {

struct Utf8Char {
  char32_t codepoint;
  std::size_t length;  // bytes consumed; 1 for invalid sequences
  bool valid;
};

inline Utf8Char decode_utf8(std::string_view s, std::size_t pos) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  if (b0 < 0x80) return {b0, 1, true};
  std::size_t len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) len = 2, cp = b0 & 0x1F;
  else if ((b0 & 0xF0) == 0xE0) len = 3, cp = b0 & 0x0F;
  else if ((b0 & 0xF8) == 0xF0) len = 4, cp = b0 & 0x07;
  else return {b0, 1, false};
  if (pos + len > s.size()) return {b0, 1, false};
  for (std::size_t k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[pos + k]);
    if ((b & 0xC0) != 0x80) return {b0, 1, false};
    cp = (cp << 6) | (b & 0x3F);
  }
  return {cp, len, true};
}

inline bool is_emoji_codepoint(char32_t cp) {
  return (cp >= 0x1F000 && cp <= 0x1FAFF) || (cp >= 0x2600 && cp <= 0x27BF) ||
         (cp >= 0x2B00 && cp <= 0x2BFF) || (cp >= 0x2300 && cp <= 0x23FF);
}

// Codepoints that decorate a preceding emoji without carrying meaning.
inline bool is_emoji_modifier(char32_t cp) {
  return cp == 0xFE0F || cp == 0xFE0E || cp == 0x20E3 ||
         (cp >= 0x1F3FB && cp <= 0x1F3FF);
}

inline bool is_letters_and_spaces(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return c == ' ' || std::isalpha(static_cast<unsigned char>(c));
  });
}

}  // namespace detail

/// Maps emoji codepoint sequences to replacement phrases.
class EmojiTable {
 public:
  EmojiTable() = default;

  static EmojiTable builtin() {
    EmojiTable t;
    for (const auto& [emoji, phrase] : kDefaultEmojiTable)
      t.add(std::string(emoji), std::string(phrase));
    return t;
  }

  /// UTF-8 TSV, one `emoji<TAB>phrase` row per line.
  static EmojiTable from_tsv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open emoji table '" + path + "'");
    EmojiTable t;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      const auto tab = line.find('\t');
      if (tab == std::string::npos || tab == 0)
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": expected emoji<TAB>phrase");
      t.add(line.substr(0, tab), line.substr(tab + 1),
            path + ":" + std::to_string(line_no));
    }
    return t;
  }

  void add(std::string emoji, std::string phrase, const std::string& where = "") {
    if (!detail::is_letters_and_spaces(phrase))
      throw std::invalid_argument((where.empty() ? "" : where + ": ") +
                                  "emoji phrase must contain only letters and spaces: '" +
                                  phrase + "'");
    max_key_bytes_ = std::max(max_key_bytes_, emoji.size());
    entries_[std::move(emoji)] = std::move(phrase);
  }

  std::size_t size() const { return entries_.size(); }

  const std::string* find(std::string_view emoji) const {
    auto it = entries_.find(std::string(emoji));
    return it == entries_.end() ? nullptr : &it->second;
  }

  // Longest table key that prefixes s[pos..]; returns its byte length or 0.
  std::size_t longest_match(std::string_view s, std::size_t pos,
                            const std::string** phrase) const {
    const std::size_t limit = std::min(max_key_bytes_, s.size() - pos);
    for (std::size_t len = limit; len > 0; --len) {
      if (const auto* p = find(s.substr(pos, len))) {
        *phrase = p;
        return len;
      }
    }
    return 0;
  }

  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
  std::size_t max_key_bytes_ = 0;
};

/// Replaces each emoji (with any skin-tone, variation-selector or ZWJ tail)
/// by its table phrase, or by `<emoji>` when unmapped.
inline std::string replace_emojis(std::string_view text, const EmojiTable& table) {
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto ch = detail::decode_utf8(text, pos);
    if (!ch.valid || !detail::is_emoji_codepoint(ch.codepoint)) {
      out.append(text.substr(pos, ch.length));
      pos += ch.length;
      continue;
    }
    const std::string* phrase = nullptr;
    std::size_t len = table.longest_match(text, pos, &phrase);
    if (len == 0) len = ch.length;
    std::size_t end = pos + len;
    // Absorb decorations and zero-width-joined continuations.
    while (end < text.size()) {
      const auto next = detail::decode_utf8(text, end);
      if (next.valid && detail::is_emoji_modifier(next.codepoint)) {
        end += next.length;
      } else if (next.valid && next.codepoint == 0x200D && end + next.length < text.size()) {
        const auto joined = detail::decode_utf8(text, end + next.length);
        if (!joined.valid || !detail::is_emoji_codepoint(joined.codepoint)) break;
        end += next.length + joined.length;
      } else {
        break;
      }
    }
    if (!out.empty() && !std::isspace(static_cast<unsigned char>(out.back()))) out += ' ';
    out += phrase ? *phrase : std::string("<emoji>");
    if (end < text.size() && !std::isspace(static_cast<unsigned char>(text[end]))) out += ' ';
    pos = end;
  }
  return out;
}

namespace detail {

inline const std::regex& url_pattern() {
  static const std::regex re(R"((?:https?|ftp)://[^\s]+|www\.[^\s]+|\bt\.co/[^\s]+)",
                             std::regex::ECMAScript | std::regex::icase);
  return re;
}

inline std::string regex_fixed_point(std::string text, const std::regex& re,
                                     const std::string& replacement) {
  for (int i = 0; i < 16; ++i) {
    auto next = std::regex_replace(text, re, replacement);
    if (next == text) break;
    text = std::move(next);
  }
  return text;
}

}  // namespace detail

inline std::string replace_urls(std::string_view text) {
  return std::regex_replace(std::string(text), detail::url_pattern(), "http");
}

/// Splits a hashtag body at case changes, letter/digit boundaries and
/// underscores: "SomeHashtagText" -> "Some Hashtag Text", "USAToday" ->
/// "USA Today", "Trump2024Now" -> "Trump 2024 Now".
inline std::string split_hashtag_words(std::string_view tag) {
  auto kind = [](char c) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isdigit(u)) return 0;
    if (std::isupper(u)) return 1;
    if (std::islower(u)) return 2;
    return 3;
  };
  std::vector<std::string> words;
  std::string cur;
  for (std::size_t i = 0; i < tag.size(); ++i) {
    const char c = tag[i];
    if (c == '_') {
      if (!cur.empty()) words.push_back(std::move(cur)), cur.clear();
      continue;
    }
    if (!cur.empty()) {
      const int prev = kind(cur.back()), now = kind(c);
      const bool digit_edge = (prev == 0) != (now == 0);
      const bool camel = prev == 2 && now == 1;
      const bool acronym_end = prev == 1 && now == 1 && i + 1 < tag.size() &&
                               kind(tag[i + 1]) == 2;
      if (digit_edge || camel || acronym_end) words.push_back(std::move(cur)), cur.clear();
    }
    cur += c;
  }
  if (!cur.empty()) words.push_back(std::move(cur));
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out += ' ';
    out += words[i];
  }
  return out;
}

inline std::string segment_hashtags(std::string_view text) {
  static const std::regex tag(R"(#([A-Za-z0-9_]+))");
  std::string out;
  std::string s(text);
  auto begin = std::sregex_iterator(s.begin(), s.end(), tag);
  std::size_t last = 0;
  for (auto it = begin; it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    out.append(s, last, static_cast<std::size_t>(m.position(0)) - last);
    out += split_hashtag_words(m.str(1));
    last = static_cast<std::size_t>(m.position(0) + m.length(0));
  }
  out.append(s, last, std::string::npos);
  return out;
}

/// Mentions need a leading boundary (start of text or a character that is
/// neither a word character nor '@'), so "me@5pm" is left alone.
inline std::string normalize_entities(std::string_view text) {
  using std::regex;
  const auto flags = regex::ECMAScript | regex::icase;
  static const regex email(R"([A-Za-z0-9._%+-]+@[A-Za-z0-9-]+(?:\.[A-Za-z0-9-]+)+)", flags);
  static const regex mention(R"((^|[^A-Za-z0-9_@])@[A-Za-z0-9_]+)", flags);
  static const regex date(
      R"((^|[^A-Za-z0-9_])(?:\d{1,2}[/.-]\d{1,2}[/.-]\d{2,4}|\d{4}-\d{1,2}-\d{1,2}|)"
      R"((?:january|february|march|april|may|june|july|august|september|october|november|december|)"
      R"(jan|feb|mar|apr|jun|jul|aug|sept|sep|oct|nov|dec)\.? \d{1,2}(?:st|nd|rd|th)?(?:,? \d{4})?))"
      R"((?![A-Za-z0-9_]))",
      flags);
  static const regex time(
      R"((^|[^A-Za-z0-9_@:/])(?:\d{1,2}:\d{2}(?::\d{2})?(?: ?[ap]\.?m\.?)?|\d{1,2} ?[ap]\.?m\.?)(?![A-Za-z0-9_]))",
      flags);
  static const regex money(
      R"((^|[^A-Za-z0-9_])(?:(?:\$|€|£|¥) ?\d+(?:[.,]\d+)*(?:k|m|bn)?|\d+(?:[.,]\d+)* ?(?:dollars|usd|euros|euro|eur|pounds|gbp))(?![A-Za-z0-9_]))",
      flags);

  std::string s(text);
  s = detail::regex_fixed_point(std::move(s), email, "<email>");
  s = detail::regex_fixed_point(std::move(s), mention, "$1<user>");
  s = detail::regex_fixed_point(std::move(s), date, "$1<date>");
  s = detail::regex_fixed_point(std::move(s), time, "$1<time>");
  s = detail::regex_fixed_point(std::move(s), money, "$1<money>");
  return s;
}

inline std::string collapse_whitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += c;
  }
  return out;
}

inline std::string preprocess_text(std::string_view text, const EmojiTable& table) {
  // One pass is almost always a fixed point; a few rare overlaps (an entity
  // exposed by collapsing whitespace) need a second pass.
  std::string cur(text);
  for (int i = 0; i < 4; ++i) {
    auto next = collapse_whitespace(normalize_entities(
        segment_hashtags(replace_urls(replace_emojis(collapse_whitespace(cur), table)))));
    if (next == cur) break;
    cur = std::move(next);
  }
  return cur;
}

inline RawTweet preprocess(const RawTweet& raw, const EmojiTable& table) {
  RawTweet out = raw;
  out.text = preprocess_text(raw.text, table);
  return out;
}

}  // namespace ctold

#pragma once

// Tweet/edge ingestion, the 7:3 tweet split, vocabulary and batching.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "ctold/ops.hpp"
#include "ctold/preprocess.hpp"

namespace ctold {

/// Input file problem, reported with its location.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& path, std::size_t line, const std::string& what)
      : std::runtime_error(path + ":" + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct Edge {
  std::string follower;
  std::string followee;

  bool operator==(const Edge&) const = default;
};

/// Tweets and follow relationships.  `users` is sorted and covers every
/// tweet author and every edge endpoint.
struct Corpus {
  std::vector<RawTweet> tweets;
  std::vector<Edge> edges;
  std::vector<std::string> users;

  std::size_t user_index(const std::string& user) const {
    auto it = index_.find(user);
    require(it != index_.end(), "corpus: unknown user '" + user + "'");
    return it->second;
  }
  bool has_user(const std::string& user) const { return index_.count(user) > 0; }

  static Corpus make(std::vector<RawTweet> tweets, std::vector<Edge> edges) {
    Corpus c;
    std::set<std::string> users;
    std::unordered_set<std::string> ids;
    for (const auto& t : tweets) {
      if (t.user_id.empty())
        throw std::invalid_argument("tweet '" + t.tweet_id + "' has an empty user_id");
      if (t.label != 0 && t.label != 1)
        throw std::invalid_argument("tweet '" + t.tweet_id + "' has label outside {0,1}");
      if (!ids.insert(t.tweet_id).second)
        throw std::invalid_argument("duplicate tweet_id '" + t.tweet_id + "'");
      users.insert(t.user_id);
    }
    for (const auto& e : edges) {
      users.insert(e.follower);
      users.insert(e.followee);
    }
    c.tweets = std::move(tweets);
    c.edges = std::move(edges);
    c.users.assign(users.begin(), users.end());
    for (std::size_t i = 0; i < c.users.size(); ++i) c.index_[c.users[i]] = i;
    return c;
  }

 private:
  std::unordered_map<std::string, std::size_t> index_;
};

// ---------------------------------------------------------------------------
// File formats

inline RawTweet tweet_from_json(const nlohmann::json& j) {
  RawTweet t;
  t.tweet_id = j.at("tweet_id").get<std::string>();
  t.user_id = j.at("user_id").get<std::string>();
  t.text = j.at("text").get<std::string>();
  const auto& label = j.at("label");
  if (!label.is_number_integer()) throw std::invalid_argument("label must be an integer");
  t.label = label.get<int>();
  if (t.label != 0 && t.label != 1) throw std::invalid_argument("label must be 0 or 1");
  return t;
}

inline nlohmann::json tweet_to_json(const RawTweet& t) {
  return {{"tweet_id", t.tweet_id}, {"user_id", t.user_id},
          {"text", t.text}, {"label", t.label}};
}

/// JSON-lines: one {tweet_id, user_id, text, label} object per line.
inline std::vector<RawTweet> read_tweets_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open tweets file '" + path + "'");
  std::vector<RawTweet> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(tweet_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      throw ParseError(path, line_no, e.what());
    }
  }
  return out;
}

inline void write_tweets_jsonl(const std::string& path, const std::vector<RawTweet>& tweets) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  for (const auto& t : tweets) out << tweet_to_json(t).dump() << '\n';
}

/// TSV: `follower_id<TAB>followee_id` per line.
inline std::vector<Edge> read_edges_tsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open edges file '" + path + "'");
  std::vector<Edge> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size() ||
        line.find('\t', tab + 1) != std::string::npos)
      throw ParseError(path, line_no, "expected follower_id<TAB>followee_id");
    out.push_back({line.substr(0, tab), line.substr(tab + 1)});
  }
  return out;
}

inline void write_edges_tsv(const std::string& path, const std::vector<Edge>& edges) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  for (const auto& e : edges) out << e.follower << '\t' << e.followee << '\n';
}

inline Corpus load_corpus(const std::string& tweets_path, const std::string& edges_path) {
  return Corpus::make(read_tweets_jsonl(tweets_path), read_edges_tsv(edges_path));
}

// ---------------------------------------------------------------------------
// Split

/// Indices into Corpus::tweets.
struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Uniform random partition of tweets.  The train side gets
/// round(n * train_fraction) tweets; with `stratified` each label is split
/// separately with the same rule.
inline Split split_corpus(const Corpus& corpus, double train_fraction,
                          std::uint64_t seed, bool stratified = false) {
  require(train_fraction > 0.0 && train_fraction < 1.0,
          "split_corpus: train_fraction must be in (0, 1)");
  if (corpus.tweets.empty()) throw std::invalid_argument("split_corpus: empty corpus");
  Rng rng(seed);
  Split split;
  auto take = [&](std::vector<std::size_t> pool) {
    std::shuffle(pool.begin(), pool.end(), rng);
    const auto n_train = static_cast<std::size_t>(
        std::llround(static_cast<double>(pool.size()) * train_fraction));
    split.train.insert(split.train.end(), pool.begin(), pool.begin() + n_train);
    split.test.insert(split.test.end(), pool.begin() + n_train, pool.end());
  };
  if (stratified) {
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < corpus.tweets.size(); ++i)
      (corpus.tweets[i].label == 1 ? pos : neg).push_back(i);
    take(std::move(neg));
    take(std::move(pos));
  } else {
    std::vector<std::size_t> all(corpus.tweets.size());
    std::iota(all.begin(), all.end(), 0);
    take(std::move(all));
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

// ---------------------------------------------------------------------------
// Tokenization and vocabulary

/// Lowercased whitespace/punctuation tokenization.  Punctuation marks become
/// single-character tokens; `<category>` placeholders stay whole.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) tokens.push_back(std::move(cur)), cur.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (c == '<') {
      const auto close = text.find('>', i);
      if (close != std::string_view::npos && close > i + 1) {
        bool word = true;
        for (std::size_t k = i + 1; k < close; ++k)
          word = word && std::isalpha(static_cast<unsigned char>(text[k]));
        if (word) {
          flush();
          std::string tok(text.substr(i, close - i + 1));
          for (auto& ch : tok) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
          tokens.push_back(std::move(tok));
          i = close;
          continue;
        }
      }
    }
    if (std::isspace(c)) {
      flush();
    } else if (c < 0x80 && std::ispunct(c) && c != '\'') {
      flush();
      tokens.emplace_back(1, static_cast<char>(c));
    } else {
      cur += static_cast<char>(std::tolower(c));
    }
  }
  flush();
  return tokens;
}

class Vocab {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr int kCls = 2;

  Vocab() : tokens_{"<pad>", "<unk>", "<cls>"} { reindex(); }

  explicit Vocab(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
    require(tokens_.size() >= 3 && tokens_[kPad] == "<pad>" && tokens_[kUnk] == "<unk>" &&
                tokens_[kCls] == "<cls>",
            "Vocab: reserved tokens must occupy ids 0..2");
    reindex();
    require(index_.size() == tokens_.size(), "Vocab: duplicate tokens");
  }

  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  int id(const std::string& token) const {
    auto it = index_.find(token);
    return it == index_.end() ? kUnk : it->second;
  }
  bool contains(const std::string& token) const { return index_.count(token) > 0; }
  const std::string& token(int id) const {
    require(id >= 0 && static_cast<std::size_t>(id) < tokens_.size(),
            "Vocab: id out of range");
    return tokens_[static_cast<std::size_t>(id)];
  }

 private:
  void reindex() {
    index_.clear();
    for (std::size_t i = 0; i < tokens_.size(); ++i)
      index_.emplace(tokens_[i], static_cast<int>(i));
  }

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

/// Builds a vocabulary from training texts only.  Tokens with frequency
/// below `min_freq` are dropped; `max_size` (0 = unlimited) caps the total
/// size including the three reserved tokens.  Order: frequency descending,
/// then lexicographic.
inline Vocab build_vocab(const std::vector<std::string>& train_texts,
                         std::size_t min_freq = 1, std::size_t max_size = 0) {
  std::map<std::string, std::size_t> counts;
  for (const auto& text : train_texts)
    for (auto& tok : tokenize(text)) ++counts[tok];
  std::vector<std::pair<std::string, std::size_t>> ranked;
  for (auto& [tok, n] : counts)
    if (n >= min_freq && tok != "<pad>" && tok != "<unk>" && tok != "<cls>")
      ranked.emplace_back(tok, n);
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> tokens{"<pad>", "<unk>", "<cls>"};
  for (auto& [tok, n] : ranked) {
    if (max_size && tokens.size() >= max_size) break;
    tokens.push_back(tok);
  }
  return Vocab(std::move(tokens));
}

struct TokenSequence {
  std::vector<int> token_ids;  // starts with <cls>
  std::size_t author = 0;      // node index of the tweet's user
  int label = 0;
  std::string tweet_id;
};

/// `<cls>` followed by the token ids, truncated to max_len in total.
inline std::vector<int> encode_text(std::string_view text, const Vocab& vocab,
                                    std::size_t max_len) {
  require(max_len >= 1, "encode: max_len must be at least 1");
  std::vector<int> ids{Vocab::kCls};
  for (const auto& tok : tokenize(text)) {
    if (ids.size() >= max_len) break;
    ids.push_back(vocab.id(tok));
  }
  return ids;
}

inline TokenSequence encode(const RawTweet& tweet, const Vocab& vocab,
                            std::size_t max_len, std::size_t author) {
  return {encode_text(tweet.text, vocab, max_len), author, tweet.label, tweet.tweet_id};
}

inline std::vector<std::string> decode(std::span<const int> ids, const Vocab& vocab) {
  std::vector<std::string> out;
  for (int id : ids)
    if (id != Vocab::kCls && id != Vocab::kPad) out.push_back(vocab.token(id));
  return out;
}

// ---------------------------------------------------------------------------
// Batching

/// Splits positions 0..size-1 into batches.  With shuffling every epoch
/// draws a fresh permutation from (seed, epoch); without it the order is
/// fixed.  The last batch may be short.
class BatchSampler {
 public:
  BatchSampler(std::size_t size, std::size_t batch_size, std::uint64_t seed, bool shuffle)
      : size_(size), batch_size_(batch_size), seed_(seed), shuffle_(shuffle) {
    require(batch_size >= 1, "BatchSampler: batch_size must be >= 1");
  }

  std::vector<std::vector<std::size_t>> epoch(std::size_t epoch_index) const {
    std::vector<std::size_t> order(size_);
    std::iota(order.begin(), order.end(), 0);
    if (shuffle_) {
      Rng rng(seed_ ^ (0x9E3779B97F4A7C15ULL * (epoch_index + 1)));
      std::shuffle(order.begin(), order.end(), rng);
    }
    std::vector<std::vector<std::size_t>> batches;
    for (std::size_t b = 0; b < size_; b += batch_size_)
      batches.emplace_back(order.begin() + b,
                           order.begin() + std::min(size_, b + batch_size_));
    return batches;
  }

 private:
  std::size_t size_, batch_size_;
  std::uint64_t seed_;
  bool shuffle_;
};

}  // namespace ctold

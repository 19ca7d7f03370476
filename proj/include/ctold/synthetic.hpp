#pragma once

// Planted-signal corpus generator.
//
// Users are split into communities; offenders live in a few of them and
// follow mostly within their community.  Offensive tweets are drawn only from
// offenders' tweets and carry words from an offensive lexicon; offenders also
// post ordinary tweets, so the author alone does not decide a label.  A small
// share of ordinary tweets borrows one lexicon word, so text alone is not
// decisive either.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ctold/corpus.hpp"

namespace ctold {

struct SyntheticConfig {
  std::size_t tweets = 1000;
  std::size_t users = 100;
  std::size_t communities = 10;
  std::size_t offender_communities = 3;
  double offender_share = 0.5;  // of each offender community's members
  double offensive_rate = 0.079;
  double follow_within = 0.3;
  double follow_across = 0.01;
  double borrowed_word_rate = 0.02;
  std::uint64_t seed = 7;
};

namespace detail {

inline constexpr std::array<const char*, 80> kNeutralWords = {
    "today",   "weather", "coffee",  "morning", "game",    "team",    "music",  "film",
    "friends", "family",  "city",    "news",    "vote",    "school",  "work",   "lunch",
    "dinner",  "weekend", "travel",  "book",    "great",   "nice",    "happy",  "new",
    "love",    "watch",   "listen",  "read",    "think",   "really",  "just",   "again",
    "tonight", "tomorrow", "season", "match",   "score",   "win",     "play",   "song",
    "album",   "show",    "episode", "class",   "exam",    "office",  "meeting", "project",
    "market",  "price",   "phone",   "photo",   "video",   "post",    "story",  "park",
    "beach",   "train",   "bus",     "street",  "home",    "garden",  "dog",    "cat",
    "pizza",   "tea",     "cake",    "party",   "birthday", "holiday", "summer", "winter",
    "rain",    "sun",     "night",   "day",     "week",    "year",    "life",   "people"};

inline constexpr std::array<const char*, 24> kOffensiveWords = {
    "idiot",   "moron",   "stupid", "trash",   "loser",  "pathetic", "disgusting", "scum",
    "clown",   "dumb",    "worthless", "shut",  "hate",   "garbage", "fool",     "ugly",
    "creep",   "liar",    "coward", "freak",   "jerk",   "imbecile", "lowlife",  "sucks"};

inline constexpr std::array<const char*, 8> kHashtags = {
    "#GameDay", "#MondayMotivation", "#NewMusic", "#TravelTuesday",
    "#Election2024", "#FoodLover", "#BookClub", "#SummerVibes"};

inline constexpr std::array<const char*, 6> kEmojis = {
    "\xf0\x9f\x98\x80", "\xf0\x9f\x98\x82", "\xf0\x9f\x91\x8d",
    "\xf0\x9f\x94\xa5", "\xf0\x9f\x98\xa1", "\xe2\x9d\xa4\xef\xb8\x8f"};

inline std::string user_name(std::size_t u, std::size_t users) {
  const auto width = std::to_string(users > 0 ? users - 1 : 0).size();
  auto s = std::to_string(u);
  return "u" + std::string(width > s.size() ? width - s.size() : 0, '0') + s;
}

}  // namespace detail

struct SyntheticCorpus {
  std::vector<RawTweet> tweets;
  std::vector<Edge> edges;
  std::vector<bool> offender;  // by user index
  std::vector<std::size_t> community;

  Corpus corpus() const { return Corpus::make(tweets, edges); }
};

inline SyntheticCorpus generate_synthetic(const SyntheticConfig& cfg) {
  require(cfg.users >= 2 && cfg.tweets >= 1, "synthetic: need at least 2 users and 1 tweet");
  require(cfg.communities >= 1 && cfg.communities <= cfg.users,
          "synthetic: communities must be in [1, users]");
  require(cfg.offender_communities <= cfg.communities,
          "synthetic: offender_communities exceeds communities");
  Rng rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  SyntheticCorpus out;

  const std::size_t n = cfg.users;
  out.community.resize(n);
  out.offender.assign(n, false);
  for (std::size_t u = 0; u < n; ++u) out.community[u] = u * cfg.communities / n;
  for (std::size_t c = 0; c < cfg.offender_communities; ++c) {
    std::vector<std::size_t> members;
    for (std::size_t u = 0; u < n; ++u)
      if (out.community[u] == c) members.push_back(u);
    std::shuffle(members.begin(), members.end(), rng);
    const auto k = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(cfg.offender_share * members.size())));
    for (std::size_t i = 0; i < std::min(k, members.size()); ++i) out.offender[members[i]] = true;
  }

  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b) continue;
      const double p =
          out.community[a] == out.community[b] ? cfg.follow_within : cfg.follow_across;
      if (unit(rng) < p)
        out.edges.push_back({detail::user_name(a, n), detail::user_name(b, n)});
    }

  // Heavy-tailed activity: a few users post much more than others.
  std::lognormal_distribution<double> activity(0.0, 0.7);
  std::vector<double> weights(n);
  for (auto& w : weights) w = activity(rng);
  std::discrete_distribution<std::size_t> pick_author(weights.begin(), weights.end());
  std::vector<std::size_t> authors(cfg.tweets);
  for (auto& a : authors) a = pick_author(rng);

  std::vector<std::size_t> candidates;
  for (std::size_t t = 0; t < cfg.tweets; ++t)
    if (out.offender[authors[t]]) candidates.push_back(t);
  std::shuffle(candidates.begin(), candidates.end(), rng);
  const auto wanted = static_cast<std::size_t>(std::llround(cfg.offensive_rate * cfg.tweets));
  std::vector<int> labels(cfg.tweets, 0);
  for (std::size_t i = 0; i < std::min(wanted, candidates.size()); ++i) labels[candidates[i]] = 1;

  std::uniform_int_distribution<std::size_t> length(6, 14);
  std::uniform_int_distribution<std::size_t> neutral(0, detail::kNeutralWords.size() - 1);
  std::uniform_int_distribution<std::size_t> offensive(0, detail::kOffensiveWords.size() - 1);
  std::uniform_int_distribution<std::size_t> tag(0, detail::kHashtags.size() - 1);
  std::uniform_int_distribution<std::size_t> emoji(0, detail::kEmojis.size() - 1);
  std::uniform_int_distribution<std::size_t> anyone(0, n - 1);

  for (std::size_t t = 0; t < cfg.tweets; ++t) {
    std::vector<std::string> words;
    const auto len = length(rng);
    for (std::size_t i = 0; i < len; ++i) words.emplace_back(detail::kNeutralWords[neutral(rng)]);
    auto insert_word = [&](std::string w) {
      std::uniform_int_distribution<std::size_t> at(0, words.size());
      words.insert(words.begin() + static_cast<std::ptrdiff_t>(at(rng)), std::move(w));
    };
    if (labels[t] == 1) {
      const std::size_t k = unit(rng) < 0.5 ? 1 : 2;
      for (std::size_t i = 0; i < k; ++i) insert_word(detail::kOffensiveWords[offensive(rng)]);
    } else if (unit(rng) < cfg.borrowed_word_rate) {
      insert_word(detail::kOffensiveWords[offensive(rng)]);
    }
    if (unit(rng) < 0.3) insert_word("@" + detail::user_name(anyone(rng), n));
    if (unit(rng) < 0.2) words.emplace_back(detail::kHashtags[tag(rng)]);
    if (unit(rng) < 0.2) words.emplace_back(detail::kEmojis[emoji(rng)]);
    if (unit(rng) < 0.15) words.emplace_back("https://t.co/x" + std::to_string(t));
    std::string text;
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (i) text += ' ';
      text += words[i];
    }
    auto id = std::to_string(t);
    out.tweets.push_back({"t" + std::string(id.size() < 5 ? 5 - id.size() : 0, '0') + id,
                          detail::user_name(authors[t], n), std::move(text), labels[t]});
  }
  return out;
}

}  // namespace ctold

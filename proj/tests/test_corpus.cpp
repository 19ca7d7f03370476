#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>

#include "ctold/corpus.hpp"
#include "ctold/synthetic.hpp"

using namespace ctold;

namespace {

std::string write_file(const std::string& name, const std::string& content) {
  const std::string path = ::testing::TempDir() + name;
  std::ofstream(path) << content;
  return path;
}

Corpus numbered_corpus(std::size_t n) {
  std::vector<RawTweet> tweets;
  for (std::size_t i = 0; i < n; ++i)
    tweets.push_back({"t" + std::to_string(i), "u" + std::to_string(i % 7), "x", int(i % 5 == 0)});
  return Corpus::make(std::move(tweets), {});
}

}  // namespace

TEST(LoadCorpus, ParsesTweetsAndEdges) {
  const auto tweets = write_file("c1.jsonl",
                                 R"({"tweet_id":"1","user_id":"a","text":"hi","label":0})" "\n"
                                 R"({"tweet_id":"2","user_id":"b","text":"yo","label":1})" "\n"
                                 R"({"tweet_id":"3","user_id":"a","text":"ok","label":0})" "\n");
  const auto edges = write_file("c1.tsv", "a\tb\nb\tc\n");
  const auto c = load_corpus(tweets, edges);
  EXPECT_EQ(c.tweets.size(), 3u);
  EXPECT_EQ(c.edges.size(), 2u);
  // "c" appears only in an edge and is kept as a user without tweets.
  EXPECT_EQ(c.users, (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_TRUE(c.has_user("c"));
  EXPECT_EQ(c.user_index("c"), 2u);
}

TEST(LoadCorpus, DuplicateTweetIdNamesTheId) {
  const auto tweets = write_file("c2.jsonl",
                                 R"({"tweet_id":"dup7","user_id":"a","text":"hi","label":0})" "\n"
                                 R"({"tweet_id":"dup7","user_id":"b","text":"yo","label":1})" "\n");
  const auto edges = write_file("c2.tsv", "");
  try {
    load_corpus(tweets, edges);
    FAIL() << "expected rejection";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("dup7"), std::string::npos);
  }
}

TEST(LoadCorpus, MalformedLinesReportLineNumbers) {
  const auto tweets = write_file("c3.jsonl",
                                 R"({"tweet_id":"1","user_id":"a","text":"hi","label":0})" "\n"
                                 "{not json\n");
  const auto edges = write_file("c3.tsv", "a\tb\n");
  try {
    load_corpus(tweets, edges);
    FAIL() << "expected parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  const auto bad_label = write_file("c4.jsonl",
                                    R"({"tweet_id":"1","user_id":"a","text":"hi","label":2})" "\n");
  EXPECT_THROW(read_tweets_jsonl(bad_label), ParseError);
  const auto bad_edges = write_file("c4.tsv", "a\tb\nonly-one-column\n");
  try {
    read_edges_tsv(bad_edges);
    FAIL() << "expected parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(LoadCorpus, EmptyUserIdRejected) {
  EXPECT_THROW(Corpus::make({{"1", "", "x", 0}}, {}), std::invalid_argument);
}

TEST(LoadCorpus, RoundTripThroughFiles) {
  const auto s = generate_synthetic({.tweets = 50, .users = 10, .communities = 2,
                                     .offender_communities = 1});
  const std::string tp = ::testing::TempDir() + "rt.jsonl", ep = ::testing::TempDir() + "rt.tsv";
  write_tweets_jsonl(tp, s.tweets);
  write_edges_tsv(ep, s.edges);
  const auto c = load_corpus(tp, ep);
  EXPECT_EQ(c.tweets, s.tweets);
  EXPECT_EQ(c.edges, s.edges);
}

TEST(Split, SevenThree) {
  const auto c = numbered_corpus(10);
  const auto s = split_corpus(c, 0.7, 1);
  EXPECT_EQ(s.train.size(), 7u);
  EXPECT_EQ(s.test.size(), 3u);
}

TEST(Split, SparseFraction) {
  const auto c = numbered_corpus(12780);
  EXPECT_EQ(split_corpus(c, 0.1, 3).train.size(), 1278u);
}

TEST(Split, DeterministicDisjointComplete) {
  const auto c = numbered_corpus(101);
  const auto a = split_corpus(c, 0.7, 42), b = split_corpus(c, 0.7, 42);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.test, b.test);
  std::vector<std::size_t> all = a.train;
  all.insert(all.end(), a.test.begin(), a.test.end());
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < all.size(); ++i) EXPECT_EQ(all[i], i);
  EXPECT_NE(split_corpus(c, 0.7, 43).train, a.train);
}

TEST(Split, UsersMayLandOnBothSides) {
  const auto c = numbered_corpus(70);
  const auto s = split_corpus(c, 0.7, 5);
  std::set<std::string> train_users, test_users, both;
  for (auto i : s.train) train_users.insert(c.tweets[i].user_id);
  for (auto i : s.test) test_users.insert(c.tweets[i].user_id);
  std::set_intersection(train_users.begin(), train_users.end(), test_users.begin(),
                        test_users.end(), std::inserter(both, both.begin()));
  EXPECT_FALSE(both.empty());
}

TEST(Split, StratifiedKeepsLabelShares) {
  const auto c = numbered_corpus(100);  // 20 positives
  const auto s = split_corpus(c, 0.7, 9, true);
  std::size_t pos = 0;
  for (auto i : s.train) pos += c.tweets[i].label;
  EXPECT_EQ(pos, 14u);
  EXPECT_EQ(s.train.size(), 70u);
}

TEST(Split, Errors) {
  EXPECT_THROW(split_corpus(numbered_corpus(5), 1.0, 1), ContractViolation);
  EXPECT_THROW(split_corpus(numbered_corpus(5), 0.0, 1), ContractViolation);
  EXPECT_THROW(split_corpus(Corpus::make({}, {}), 0.5, 1), std::invalid_argument);
}

TEST(Tokenize, LowercasePunctuationAndPlaceholders) {
  EXPECT_EQ(tokenize("Hello, <user>! It's OK"),
            (std::vector<std::string>{"hello", ",", "<user>", "!", "it's", "ok"}));
  EXPECT_EQ(tokenize("a<b c"), (std::vector<std::string>{"a", "<", "b", "c"}));
  EXPECT_TRUE(tokenize("   ").empty());
}

TEST(Vocab, MinFreqThreshold) {
  const auto v = build_vocab({"a a b"}, 2);
  EXPECT_TRUE(v.contains("a"));
  EXPECT_FALSE(v.contains("b"));
  EXPECT_EQ(encode_text("b", v, 64), (std::vector<int>{Vocab::kCls, Vocab::kUnk}));
  EXPECT_EQ(v.token(Vocab::kPad), "<pad>");
  EXPECT_EQ(v.token(Vocab::kUnk), "<unk>");
  EXPECT_EQ(v.token(Vocab::kCls), "<cls>");
}

TEST(Vocab, DenseIdsAndOrdering) {
  const auto v = build_vocab({"c b b a a a", "d c"}, 1);
  EXPECT_EQ(v.tokens(), (std::vector<std::string>{"<pad>", "<unk>", "<cls>", "a", "b", "c", "d"}));
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(v.id(v.tokens()[i]), int(i));
  EXPECT_EQ(build_vocab({"c b b a a a", "d c"}, 1, 5).size(), 5u);
}

TEST(Encode, TruncationAt512And64) {
  std::string text;
  for (int i = 0; i < 600; ++i) text += "w" + std::to_string(i % 50) + " ";
  const auto v = build_vocab({text}, 1);
  EXPECT_EQ(encode_text(text, v, 512).size(), 512u);
  EXPECT_EQ(encode_text(text, v, 64).size(), 64u);
  EXPECT_EQ(encode_text("", v, 64), (std::vector<int>{Vocab::kCls}));
}

TEST(Encode, DecodeRoundTrip) {
  const auto v = build_vocab({"the cat sat on the mat"}, 1);
  const auto ids = encode_text("the mat sat", v, 64);
  EXPECT_EQ(decode(ids, v), (std::vector<std::string>{"the", "mat", "sat"}));
  const RawTweet t{"t9", "u1", "the cat", 1};
  const auto seq = encode(t, v, 64, 3);
  EXPECT_EQ(seq.author, 3u);
  EXPECT_EQ(seq.label, 1);
  EXPECT_EQ(seq.tweet_id, "t9");
  for (int id : seq.token_ids) EXPECT_LT(static_cast<std::size_t>(id), v.size());
}

TEST(Batches, SizesAndCoverage) {
  BatchSampler train(130, 64, 7, true);
  const auto e0 = train.epoch(0);
  ASSERT_EQ(e0.size(), 3u);
  EXPECT_EQ(e0[0].size(), 64u);
  EXPECT_EQ(e0[1].size(), 64u);
  EXPECT_EQ(e0[2].size(), 2u);
  std::vector<std::size_t> all;
  for (const auto& b : e0) all.insert(all.end(), b.begin(), b.end());
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < 130; ++i) EXPECT_EQ(all[i], i);
  EXPECT_NE(train.epoch(0), train.epoch(1));
  EXPECT_EQ(train.epoch(3), BatchSampler(130, 64, 7, true).epoch(3));
}

TEST(Batches, EvalOrderFixed) {
  BatchSampler eval(130, 64, 7, false);
  EXPECT_EQ(eval.epoch(0), eval.epoch(5));
  EXPECT_EQ(eval.epoch(0)[0][0], 0u);
  EXPECT_THROW(BatchSampler(10, 0, 1, false), ContractViolation);
}

TEST(Synthetic, PlantedStructure) {
  const auto s = generate_synthetic({});
  EXPECT_EQ(s.tweets.size(), 1000u);
  std::size_t offensive = 0;
  for (const auto& t : s.tweets) offensive += t.label;
  EXPECT_EQ(offensive, 79u);
  const auto c = s.corpus();
  EXPECT_EQ(c.users.size(), 100u);
  for (const auto& t : s.tweets)
    if (t.label == 1) {
      const auto u = c.user_index(t.user_id);
      EXPECT_TRUE(s.offender[u]);
      EXPECT_LT(s.community[u], 3u);
    }
  const auto again = generate_synthetic({});
  EXPECT_EQ(again.tweets, s.tweets);
  EXPECT_EQ(again.edges, s.edges);
}

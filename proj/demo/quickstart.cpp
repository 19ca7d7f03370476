// Trains on the planted synthetic corpus (about a minute on one core), then
// scores a fresh tweet and a known offensive one through a checkpoint.

#include <algorithm>
#include <iostream>

#include "ctold/ctold.hpp"

int main() {
  using namespace ctold;

  TrainConfig cfg;  // 1000 tweets, 100 users, up to 20 epochs
  cfg.lr_rest = 3e-3;

  const auto corpus = config_corpus(cfg);
  const auto trained = train_model(cfg, corpus);
  const auto& r = trained.result;
  std::cout << "best epoch " << r.best_epoch << " of " << r.epochs << ", test macro-F1 "
            << r.test.f1 << ", AUC " << r.test.auc << "\n";

  const auto ckpt = checkpoint_from_json(checkpoint_to_json(trained));
  const auto offensive = *std::find_if(corpus.tweets.begin(), corpus.tweets.end(),
                                       [](const RawTweet& t) { return t.label == 1; });
  const std::vector<RawTweet> tweets{
      {"fresh", corpus.tweets.front().user_id, "@friend what a lovely day #SundayFunday", 0},
      offensive,
  };
  for (const auto& p : evaluate_checkpoint(ckpt, tweets).predictions)
    std::cout << p.tweet_id << " P(offensive) = " << p.probability << "\n";
}

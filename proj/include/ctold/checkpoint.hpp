#pragma once

// Self-describing JSON checkpoints: the config, vocabulary, masked graph and
// every named parameter with its shape.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ctold/train.hpp"

namespace ctold {

struct Checkpoint {
  TrainConfig config;
  Vocab vocab;
  SocialGraph graph;
  CtOldModel model;

  Tensor features() const { return graph.feature_tensor(); }
  Neighborhoods neighborhoods() const {
    return graph.neighborhoods(config.symmetric_neighborhood);
  }
};

inline nlohmann::json checkpoint_to_json(const TrainConfig& cfg, const Vocab& vocab,
                                         const SocialGraph& graph, const CtOldModel& model) {
  nlohmann::json params = nlohmann::json::array();
  for (const auto& p : model.parameters())
    params.push_back({{"name", p.name},
                      {"shape", p.tensor.shape()},
                      {"data", std::vector<double>(p.tensor.data().begin(),
                                                   p.tensor.data().end())}});
  return {{"format", "ctold-checkpoint"},
          {"version", 1},
          {"config", config_to_json(cfg)},
          {"vocab", vocab.tokens()},
          {"graph", graph_to_json(graph)},
          {"parameters", std::move(params)}};
}

inline nlohmann::json checkpoint_to_json(const TrainedModel& t) {
  return checkpoint_to_json(t.result.config, t.data.vocab, t.data.graph, t.model);
}

inline Checkpoint checkpoint_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "ctold-checkpoint")
    throw std::invalid_argument("not a ctold checkpoint");
  auto cfg = config_from_json(j.at("config"));
  Vocab vocab(j.at("vocab").get<std::vector<std::string>>());
  auto graph = graph_from_json(j.at("graph"));
  CtOldModel model(cfg.model_config(vocab.size(), graph.feature_dim()), 0);

  std::map<std::string, const nlohmann::json*> stored;
  for (const auto& p : j.at("parameters")) stored[p.at("name").get<std::string>()] = &p;
  const auto params = model.parameters();
  if (stored.size() != params.size())
    throw std::invalid_argument("checkpoint: expected " + std::to_string(params.size()) +
                                " parameters, found " + std::to_string(stored.size()));
  for (const auto& p : params) {
    auto it = stored.find(p.name);
    if (it == stored.end()) throw std::invalid_argument("checkpoint: missing parameter " + p.name);
    if (it->second->at("shape").get<Shape>() != p.tensor.shape())
      throw std::invalid_argument("checkpoint: shape mismatch for " + p.name);
    const auto values = it->second->at("data").get<std::vector<double>>();
    auto t = p.tensor;
    auto data = t.mutable_data();
    if (values.size() != data.size())
      throw std::invalid_argument("checkpoint: data size mismatch for " + p.name);
    std::copy(values.begin(), values.end(), data.begin());
  }
  return {std::move(cfg), std::move(vocab), std::move(graph), std::move(model)};
}

inline void save_checkpoint(const std::string& path, const nlohmann::json& ckpt) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint '" + path + "'");
  out << ckpt.dump() << '\n';
}

inline Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint '" + path + "'");
  return checkpoint_from_json(nlohmann::json::parse(in));
}

struct Prediction {
  std::string tweet_id;
  double probability = 0.0;
  int predicted = 0;
  int label = 0;
};

struct EvalResult {
  std::vector<Prediction> predictions;
  MetricsReport metrics;

  nlohmann::json to_json() const {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& p : predictions)
      rows.push_back({{"tweet_id", p.tweet_id},
                      {"probability", p.probability},
                      {"predicted", p.predicted},
                      {"label", p.label}});
    return {{"metrics", metrics.to_json()}, {"predictions", std::move(rows)}};
  }
};

/// Scores labelled tweets with a loaded checkpoint.  Texts go through the
/// same preprocessing as training; authors must be nodes of the stored graph
/// unless the model has no GAT layer.
inline EvalResult evaluate_checkpoint(const Checkpoint& ckpt, const std::vector<RawTweet>& tweets,
                                      const EmojiTable& table = EmojiTable::builtin()) {
  require(!tweets.empty(), "evaluate_checkpoint: no tweets");
  std::unordered_map<std::string, std::size_t> node_index;
  for (std::size_t i = 0; i < ckpt.graph.num_nodes(); ++i) node_index[ckpt.graph.nodes()[i]] = i;
  const bool graph = ckpt.model.config().uses_graph();
  std::vector<TokenSequence> seqs;
  for (const auto& raw : tweets) {
    const auto t = preprocess(raw, table);
    std::size_t author = 0;
    if (graph) {
      auto it = node_index.find(t.user_id);
      if (it == node_index.end())
        throw std::invalid_argument("evaluate_checkpoint: tweet " + t.tweet_id + " author '" +
                                    t.user_id + "' is not in the checkpoint graph");
      author = it->second;
    }
    seqs.push_back(encode(t, ckpt.vocab, ckpt.config.max_len, author));
  }
  const auto probs =
      predict_probabilities(ckpt.model, seqs, ckpt.features(), ckpt.neighborhoods());
  EvalResult out;
  for (std::size_t i = 0; i < seqs.size(); ++i)
    out.predictions.push_back({seqs[i].tweet_id, probs[i],
                               probs[i] >= ckpt.config.threshold ? 1 : 0, seqs[i].label});
  out.metrics = evaluate(probs, labels_of(seqs), ckpt.config.threshold);
  return out;
}

}  // namespace ctold

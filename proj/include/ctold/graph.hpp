#pragma once

// Directed follower -> followee graph over users, with self-loops, and the
// per-user node features computed from training tweets only.
//
// Soft features are (non_offensive_count, offensive_count).  The component
// order is fixed so that the non-offensive default (1, 1e-6) reads as "only
// non-offensive posts".

#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ctold/corpus.hpp"

namespace ctold {

enum class GraphVariant { soft, hard, bow };
enum class InitStrategy { all0, all1, avg, nonoff };

inline std::string to_string(GraphVariant v) {
  switch (v) {
    case GraphVariant::soft: return "soft";
    case GraphVariant::hard: return "hard";
    case GraphVariant::bow: return "bow";
  }
  return "?";
}

inline GraphVariant parse_graph_variant(const std::string& s) {
  if (s == "soft") return GraphVariant::soft;
  if (s == "hard") return GraphVariant::hard;
  if (s == "bow") return GraphVariant::bow;
  throw std::invalid_argument("unknown graph variant '" + s + "' (soft, hard, bow)");
}

inline std::string to_string(InitStrategy s) {
  switch (s) {
    case InitStrategy::all0: return "all0";
    case InitStrategy::all1: return "all1";
    case InitStrategy::avg: return "avg";
    case InitStrategy::nonoff: return "nonoff";
  }
  return "?";
}

inline InitStrategy parse_init_strategy(const std::string& s) {
  if (s == "all0") return InitStrategy::all0;
  if (s == "all1") return InitStrategy::all1;
  if (s == "avg") return InitStrategy::avg;
  if (s == "nonoff") return InitStrategy::nonoff;
  throw std::invalid_argument("unknown init strategy '" + s +
                              "' (all0, all1, avg, nonoff)");
}

struct BehaviorFeature {
  double non_offensive = 0.0;
  double offensive = 0.0;

  bool operator==(const BehaviorFeature&) const = default;
};

/// Per-category mean posts over users with at least one training tweet.
struct TrainStats {
  double mean_non_offensive = 0.0;
  double mean_offensive = 0.0;
};

inline TrainStats compute_train_stats(const Corpus& corpus,
                                      std::span<const std::size_t> train) {
  std::vector<BehaviorFeature> per_user(corpus.users.size());
  std::vector<bool> seen(corpus.users.size(), false);
  for (auto i : train) {
    const auto& t = corpus.tweets[i];
    const auto u = corpus.user_index(t.user_id);
    seen[u] = true;
    (t.label == 1 ? per_user[u].offensive : per_user[u].non_offensive) += 1.0;
  }
  TrainStats stats;
  std::size_t known = 0;
  for (std::size_t u = 0; u < per_user.size(); ++u) {
    if (!seen[u]) continue;
    ++known;
    stats.mean_non_offensive += per_user[u].non_offensive;
    stats.mean_offensive += per_user[u].offensive;
  }
  if (known) {
    stats.mean_non_offensive /= static_cast<double>(known);
    stats.mean_offensive /= static_cast<double>(known);
  }
  return stats;
}

inline BehaviorFeature init_unknown_features(InitStrategy strategy,
                                             const TrainStats& stats = {}) {
  switch (strategy) {
    case InitStrategy::all0: return {0.0, 0.0};
    case InitStrategy::all1: return {1.0, 1.0};
    case InitStrategy::avg: return {stats.mean_non_offensive, stats.mean_offensive};
    case InitStrategy::nonoff: return {1.0, 1e-6};
  }
  throw std::invalid_argument("init_unknown_features: bad strategy");
}

inline BehaviorFeature init_unknown_features(const std::string& strategy,
                                             const TrainStats& stats = {}) {
  return init_unknown_features(parse_init_strategy(strategy), stats);
}

/// CSR neighbourhoods: node i attends over cols[offsets[i] .. offsets[i+1]).
struct Neighborhoods {
  std::vector<std::size_t> offsets;
  std::vector<std::size_t> cols;

  std::size_t num_nodes() const { return offsets.empty() ? 0 : offsets.size() - 1; }
  std::size_t num_arcs() const { return cols.size(); }
};

class SocialGraph {
 public:
  SocialGraph() = default;

  std::size_t num_nodes() const { return nodes_.size(); }
  const std::vector<std::string>& nodes() const { return nodes_; }
  /// Out-neighbours of each node, self first, then ascending.
  const std::vector<std::vector<std::size_t>>& adjacency() const { return adjacency_; }
  std::size_t arc_count() const {
    std::size_t n = 0;
    for (const auto& a : adjacency_) n += a.size();
    return n;
  }

  std::size_t feature_dim() const { return feature_dim_; }
  const std::vector<double>& features() const { return features_; }
  GraphVariant variant() const { return variant_; }
  InitStrategy init_strategy() const { return init_; }

  Tensor feature_tensor() const {
    require(feature_dim_ > 0, "SocialGraph: features not set");
    return Tensor({nodes_.size(), feature_dim_}, features_);
  }

  void set_features(std::vector<double> features, std::size_t dim, GraphVariant variant,
                    InitStrategy init) {
    require(dim > 0 && features.size() == dim * nodes_.size(),
            "SocialGraph: feature matrix does not match node count");
    features_ = std::move(features);
    feature_dim_ = dim;
    variant_ = variant;
    init_ = init;
  }

  /// Out-neighbours plus self, or the union with in-neighbours when
  /// `symmetric` is set.
  Neighborhoods neighborhoods(bool symmetric = false) const {
    std::vector<std::set<std::size_t>> sets(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      for (auto j : adjacency_[i]) {
        sets[i].insert(j);
        if (symmetric) sets[j].insert(i);
      }
    Neighborhoods nb;
    nb.offsets.push_back(0);
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      nb.cols.push_back(i);
      for (auto j : sets[i])
        if (j != i) nb.cols.push_back(j);
      nb.offsets.push_back(nb.cols.size());
    }
    return nb;
  }

  static SocialGraph build(std::vector<std::string> nodes,
                           const std::vector<std::pair<std::size_t, std::size_t>>& arcs) {
    SocialGraph g;
    g.nodes_ = std::move(nodes);
    std::vector<std::set<std::size_t>> out(g.nodes_.size());
    for (auto [src, dst] : arcs) {
      require(src < g.nodes_.size() && dst < g.nodes_.size(), "SocialGraph: bad arc");
      if (src != dst) out[src].insert(dst);
    }
    g.adjacency_.resize(g.nodes_.size());
    for (std::size_t i = 0; i < g.nodes_.size(); ++i) {
      g.adjacency_[i].push_back(i);
      g.adjacency_[i].insert(g.adjacency_[i].end(), out[i].begin(), out[i].end());
    }
    return g;
  }

 private:
  std::vector<std::string> nodes_;
  std::vector<std::vector<std::size_t>> adjacency_;
  std::vector<double> features_;
  std::size_t feature_dim_ = 0;
  GraphVariant variant_ = GraphVariant::soft;
  InitStrategy init_ = InitStrategy::nonoff;
};

/// One node per corpus user, one arc per distinct relationship, plus self-loops.
inline SocialGraph build_graph(const Corpus& corpus) {
  std::vector<std::pair<std::size_t, std::size_t>> arcs;
  arcs.reserve(corpus.edges.size());
  for (const auto& e : corpus.edges)
    arcs.emplace_back(corpus.user_index(e.follower), corpus.user_index(e.followee));
  return SocialGraph::build(corpus.users, arcs);
}

/// (non_offensive, offensive) counts over `tweets`; users without any of
/// those tweets get the initialization vector.
inline std::vector<double> soft_features(const SocialGraph& graph, const Corpus& corpus,
                                         std::span<const std::size_t> tweets,
                                         InitStrategy init) {
  const std::size_t n = graph.num_nodes();
  std::vector<double> f(2 * n, 0.0);
  std::vector<bool> seen(n, false);
  for (auto i : tweets) {
    const auto& t = corpus.tweets[i];
    const auto u = corpus.user_index(t.user_id);
    seen[u] = true;
    f[2 * u + (t.label == 1 ? 1 : 0)] += 1.0;
  }
  const auto fill = init_unknown_features(init, compute_train_stats(corpus, tweets));
  for (std::size_t u = 0; u < n; ++u)
    if (!seen[u]) f[2 * u] = fill.non_offensive, f[2 * u + 1] = fill.offensive;
  return f;
}

/// 1.0 if any of the user's `tweets` is offensive, else 0.0.
inline std::vector<double> hard_features(const SocialGraph& graph, const Corpus& corpus,
                                         std::span<const std::size_t> tweets) {
  std::vector<double> f(graph.num_nodes(), 0.0);
  for (auto i : tweets)
    if (corpus.tweets[i].label == 1) f[corpus.user_index(corpus.tweets[i].user_id)] = 1.0;
  return f;
}

/// Binary bag-of-words over the vocabulary across each user's `tweets`.
inline std::vector<double> bow_features(const SocialGraph& graph, const Corpus& corpus,
                                        std::span<const std::size_t> tweets,
                                        const Vocab& vocab) {
  const std::size_t v = vocab.size();
  std::vector<double> f(graph.num_nodes() * v, 0.0);
  for (auto i : tweets) {
    const auto u = corpus.user_index(corpus.tweets[i].user_id);
    for (const auto& tok : tokenize(corpus.tweets[i].text))
      if (vocab.contains(tok)) f[u * v + static_cast<std::size_t>(vocab.id(tok))] = 1.0;
  }
  return f;
}

inline std::size_t feature_dim_for(GraphVariant variant, const Vocab* vocab) {
  switch (variant) {
    case GraphVariant::soft: return 2;
    case GraphVariant::hard: return 1;
    case GraphVariant::bow:
      require(vocab != nullptr, "bow features need a vocabulary");
      return vocab->size();
  }
  return 0;
}

/// Sets `graph`'s features from the given tweets for the chosen variant.
inline void assign_features(SocialGraph& graph, const Corpus& corpus,
                            std::span<const std::size_t> tweets, GraphVariant variant,
                            InitStrategy init, const Vocab* vocab = nullptr) {
  std::vector<double> f;
  switch (variant) {
    case GraphVariant::soft: f = soft_features(graph, corpus, tweets, init); break;
    case GraphVariant::hard: f = hard_features(graph, corpus, tweets); break;
    case GraphVariant::bow: f = bow_features(graph, corpus, tweets, *vocab); break;
  }
  graph.set_features(std::move(f), feature_dim_for(variant, vocab), variant, init);
}

/// Copy of `graph` whose features come from the training split alone.
/// Structure is untouched; test-only users fall back to the initialization.
inline SocialGraph mask_test_information(const SocialGraph& graph, const Corpus& corpus,
                                         const Split& split, GraphVariant variant,
                                         InitStrategy init, const Vocab* vocab = nullptr) {
  SocialGraph masked = graph;
  assign_features(masked, corpus, split.train, variant, init, vocab);
  return masked;
}

inline nlohmann::json graph_to_json(const SocialGraph& g) {
  nlohmann::json edges = nlohmann::json::array();
  for (std::size_t i = 0; i < g.num_nodes(); ++i)
    for (auto j : g.adjacency()[i]) edges.push_back({g.nodes()[i], g.nodes()[j]});
  nlohmann::json features = nlohmann::json::array();
  for (std::size_t i = 0; i < g.num_nodes(); ++i) {
    auto row = nlohmann::json::array();
    for (std::size_t k = 0; k < g.feature_dim(); ++k)
      row.push_back(g.features()[i * g.feature_dim() + k]);
    features.push_back(std::move(row));
  }
  return {{"nodes", g.nodes()},
          {"edges", std::move(edges)},
          {"features", std::move(features)},
          {"variant", to_string(g.variant())},
          {"init_strategy", to_string(g.init_strategy())}};
}

inline SocialGraph graph_from_json(const nlohmann::json& j) {
  auto nodes = j.at("nodes").get<std::vector<std::string>>();
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < nodes.size(); ++i) index[nodes[i]] = i;
  std::vector<std::pair<std::size_t, std::size_t>> arcs;
  for (const auto& e : j.at("edges")) {
    auto a = index.find(e.at(0).get<std::string>()), b = index.find(e.at(1).get<std::string>());
    if (a == index.end() || b == index.end())
      throw std::invalid_argument("graph json: edge references unknown node");
    arcs.emplace_back(a->second, b->second);
  }
  auto g = SocialGraph::build(std::move(nodes), arcs);
  const auto& rows = j.at("features");
  if (!rows.empty()) {
    const std::size_t dim = rows.at(0).size();
    std::vector<double> f;
    for (const auto& r : rows)
      for (const auto& v : r) f.push_back(v.get<double>());
    g.set_features(std::move(f), dim, parse_graph_variant(j.at("variant").get<std::string>()),
                   parse_init_strategy(j.at("init_strategy").get<std::string>()));
  }
  return g;
}

}  // namespace ctold

#pragma once

// The end-to-end detector: GAT over the social graph, text encoder over the
// tweet, fusion attention and classifier on top.

#include <span>
#include <string>
#include <vector>

#include "ctold/corpus.hpp"
#include "ctold/encoder.hpp"
#include "ctold/fusion.hpp"
#include "ctold/gat.hpp"

namespace ctold {

enum class AblationVariant {
  full,
  no_gat,
  no_encoder,
  no_gat_residual,
  single_head_gat,
  no_attention_layer,
};

inline constexpr AblationVariant kAllAblations[] = {
    AblationVariant::no_gat,          AblationVariant::no_encoder,
    AblationVariant::no_gat_residual, AblationVariant::single_head_gat,
    AblationVariant::no_attention_layer, AblationVariant::full,
};

inline std::string to_string(AblationVariant v) {
  switch (v) {
    case AblationVariant::full: return "full";
    case AblationVariant::no_gat: return "no_gat";
    case AblationVariant::no_encoder: return "no_encoder";
    case AblationVariant::no_gat_residual: return "no_gat_residual";
    case AblationVariant::single_head_gat: return "single_head_gat";
    case AblationVariant::no_attention_layer: return "no_attention_layer";
  }
  return "?";
}

inline AblationVariant parse_ablation(const std::string& s) {
  for (auto v : kAllAblations)
    if (to_string(v) == s) return v;
  throw std::invalid_argument("unknown ablation variant '" + s + "'");
}

struct ModelConfig {
  GatConfig gat;
  EncoderConfig encoder;
  FusionConfig fusion;
  AblationVariant variant = AblationVariant::full;

  bool uses_graph() const { return variant != AblationVariant::no_gat; }
  bool uses_encoder() const { return variant != AblationVariant::no_encoder; }

  /// Applies the variant's structural change to the sub-configs.
  ModelConfig resolved() const {
    ModelConfig c = *this;
    switch (variant) {
      case AblationVariant::no_gat_residual: c.gat.residual = false; break;
      case AblationVariant::single_head_gat: c.gat.heads = 1; break;
      case AblationVariant::no_attention_layer: c.fusion.use_attention = false; break;
      default: break;
    }
    c.fusion.uses_graph = c.uses_graph();
    c.fusion.d_model = c.encoder.d_model;
    c.fusion.gat_head_dim = c.gat.head_dim;
    return c;
  }
};

/// Graph embeddings for one batch, already adapted to d_model.
struct GraphContext {
  Tensor head_rows;      // [heads * nodes, d_model], head-major
  Tensor residual_rows;  // [nodes, d_model] or undefined
  std::size_t nodes = 0;
  std::size_t heads = 0;
  GatOutput gat;
};

class CtOldModel {
 public:
  CtOldModel(const ModelConfig& config, std::uint64_t seed) : config_(config.resolved()) {
    Rng rng(seed);
    if (config_.uses_graph()) gat_ = GatParams::xavier(config_.gat, rng);
    if (config_.uses_encoder()) encoder_ = EncoderParams::xavier(config_.encoder, rng);
    fusion_ = FusionParams::xavier(config_.fusion, rng);
  }

  const ModelConfig& config() const { return config_; }
  const GatParams& gat_params() const { return gat_; }
  const EncoderParams& encoder_params() const { return encoder_; }
  const FusionParams& fusion_params() const { return fusion_; }

  /// Runs the GAT once over the whole graph.
  GraphContext graph_context(const Tensor& features, const Neighborhoods& nb, bool training,
                             Rng& rng) const {
    require(config_.uses_graph(), "graph_context: model has no GAT layer");
    GraphContext ctx;
    ctx.gat = gat_forward(features, nb, gat_, config_.gat, training, rng);
    ctx.nodes = nb.num_nodes();
    ctx.heads = config_.gat.heads;
    const Tensor stacked =
        ctx.gat.heads.size() == 1 ? ctx.gat.heads.front() : concat_rows(ctx.gat.heads);
    ctx.head_rows = matmul(stacked, fusion_.head_adapter);
    if (ctx.gat.residual.defined())
      ctx.residual_rows = matmul(ctx.gat.residual, fusion_.residual_adapter);
    return ctx;
  }

  /// The author's K head rows followed by the residual row.
  Tensor user_rows(const GraphContext& ctx, std::size_t author) const {
    require(author < ctx.nodes, "user_rows: author " + std::to_string(author) +
                                    " is not a graph node");
    std::vector<std::size_t> idx(ctx.heads);
    for (std::size_t k = 0; k < ctx.heads; ++k) idx[k] = k * ctx.nodes + author;
    Tensor rows = gather_rows(ctx.head_rows, idx);
    if (ctx.residual_rows.defined()) {
      const std::size_t a[] = {author};
      rows = concat_rows({rows, gather_rows(ctx.residual_rows, a)});
    }
    return rows;
  }

  Tensor token_embeddings(const TokenSequence& seq, bool training, Rng& rng,
                          AttentionTrace* trace = nullptr) const {
    return encode_tokens(seq.token_ids, encoder_, config_.encoder, training, rng, trace);
  }

  /// P(offensive) for one tweet, shape [1].
  Tensor predict(const TokenSequence& seq, const GraphContext* ctx, bool training, Rng& rng,
                 AttentionTrace* trace = nullptr) const {
    Tensor tokens, users;
    if (config_.uses_encoder()) tokens = token_embeddings(seq, training, rng, trace);
    if (config_.uses_graph()) {
      require(ctx != nullptr, "predict: graph context required");
      users = user_rows(*ctx, seq.author);
    }
    return fusion_probability(tokens, users, fusion_, config_.fusion, training, rng, trace);
  }

  /// Probabilities for a batch, shape [B].
  Tensor forward(std::span<const TokenSequence* const> batch, const Tensor& features,
                 const Neighborhoods& nb, bool training, Rng& rng) const {
    require(!batch.empty(), "forward: empty batch");
    GraphContext ctx;
    if (config_.uses_graph()) ctx = graph_context(features, nb, training, rng);
    std::vector<Tensor> probs;
    probs.reserve(batch.size());
    for (const auto* seq : batch)
      probs.push_back(predict(*seq, config_.uses_graph() ? &ctx : nullptr, training, rng));
    return reshape(probs.size() == 1 ? probs.front() : concat_cols(probs), {batch.size()});
  }

  ParamList parameters() const {
    ParamList out;
    if (config_.uses_graph()) gat_.collect("gat", out);
    if (config_.uses_encoder()) encoder_.collect("encoder", out);
    fusion_.collect("fusion", out);
    return out;
  }

  std::size_t parameter_count() const { return count_parameters(parameters()); }

  /// Learning-rate group membership: the GAT layer trains at its own rate.
  static bool in_gat_group(const std::string& name) { return name.rfind("gat.", 0) == 0; }

 private:
  ModelConfig config_;
  GatParams gat_;
  EncoderParams encoder_;
  FusionParams fusion_;
};

}  // namespace ctold

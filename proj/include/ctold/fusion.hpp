#pragma once

// Fuses a tweet's token embeddings with its author's graph embedding.
//
// X = [f_1 .. f_M, h'_1 .. h'_N, r] gets sinusoidal position encodings
// (tokens at 0..M-1, every user row at M), then
//   X' = LN_out(X + MultiHead(LN_in(X)))
// and the classifier pools ReLU(X') W + b over rows into one logit.

#include <cmath>
#include <string>
#include <vector>

#include "ctold/layers.hpp"

namespace ctold {

enum class Pooling { mean, cls };

struct FusionConfig {
  std::size_t d_model = 64;
  std::size_t heads = 4;
  std::size_t gat_head_dim = 8;  // width of incoming user rows
  double attention_dropout = 0.5;
  double hidden_dropout = 0.1;
  Pooling pooling = Pooling::mean;
  bool use_attention = true;
  bool uses_graph = true;
};

struct FusionParams {
  Tensor head_adapter;      // [gat_head_dim, d_model], shared by all head rows
  Tensor residual_adapter;  // [gat_head_dim, d_model]
  LayerNormParams norm_in, norm_out;
  MhaParams attention;
  LinearParams ffn;         // d_model -> d_model
  LinearParams classifier;  // d_model -> 1

  static FusionParams xavier(const FusionConfig& cfg, Rng& rng) {
    FusionParams p;
    if (cfg.uses_graph) {
      p.head_adapter = xavier_normal(cfg.gat_head_dim, cfg.d_model, rng);
      p.residual_adapter = xavier_normal(cfg.gat_head_dim, cfg.d_model, rng);
    }
    if (cfg.use_attention) {
      p.norm_in = LayerNormParams::identity(cfg.d_model);
      p.norm_out = LayerNormParams::identity(cfg.d_model);
      p.attention = MhaParams::xavier(cfg.d_model, cfg.heads, rng);
    }
    p.ffn = LinearParams::xavier(cfg.d_model, cfg.d_model, rng);
    p.classifier = LinearParams::xavier(cfg.d_model, 1, rng);
    return p;
  }

  void collect(const std::string& prefix, ParamList& out) const {
    if (head_adapter.defined()) out.push_back({prefix + ".head_adapter", head_adapter});
    if (residual_adapter.defined())
      out.push_back({prefix + ".residual_adapter", residual_adapter});
    if (attention.wq.defined()) {
      norm_in.collect(prefix + ".norm_in", out);
      attention.collect(prefix + ".attn", out);
      norm_out.collect(prefix + ".norm_out", out);
    }
    ffn.collect(prefix + ".ffn", out);
    classifier.collect(prefix + ".classifier", out);
  }
};

/// Rows of one tweet's fusion input.
struct FusionSequence {
  Tensor rows;                // [token_rows + user_rows, d_model]
  std::size_t token_rows = 0;
  std::size_t user_rows = 0;

  std::size_t length() const { return token_rows + user_rows; }
};

/// Tokens first, then the author's rows (heads then residual).  Either part
/// may be absent, but not both.
inline FusionSequence assemble(const Tensor& token_embeddings, const Tensor& user_rows) {
  require(token_embeddings.defined() || user_rows.defined(), "assemble: nothing to fuse");
  FusionSequence seq;
  std::vector<Tensor> parts;
  if (token_embeddings.defined()) {
    seq.token_rows = token_embeddings.rows();
    parts.push_back(token_embeddings);
  }
  if (user_rows.defined()) {
    seq.user_rows = user_rows.rows();
    parts.push_back(user_rows);
  }
  if (parts.size() == 2)
    require(parts[0].cols() == parts[1].cols(), "assemble: token and user widths differ");
  seq.rows = parts.size() == 1 ? parts.front() : concat_rows(parts);
  return seq;
}

/// PE(pos, 2i) = sin(pos / 10000^(2i/d)), PE(pos, 2i+1) = cos(same).
inline std::vector<double> sinusoidal_encoding(std::size_t position, std::size_t d) {
  std::vector<double> pe(d);
  for (std::size_t j = 0; j < d; ++j) {
    const double exponent = static_cast<double>(2 * (j / 2)) / static_cast<double>(d);
    const double angle = static_cast<double>(position) / std::pow(10000.0, exponent);
    pe[j] = (j % 2 == 0) ? std::sin(angle) : std::cos(angle);
  }
  return pe;
}

/// Token row t gets position t; all user rows share position token_rows.
inline FusionSequence add_position_encoding(const FusionSequence& seq) {
  const std::size_t d = seq.rows.cols();
  std::vector<double> pe;
  pe.reserve(seq.length() * d);
  for (std::size_t t = 0; t < seq.token_rows; ++t) {
    auto row = sinusoidal_encoding(t, d);
    pe.insert(pe.end(), row.begin(), row.end());
  }
  const auto user_pe = sinusoidal_encoding(seq.token_rows, d);
  for (std::size_t u = 0; u < seq.user_rows; ++u)
    pe.insert(pe.end(), user_pe.begin(), user_pe.end());
  FusionSequence out = seq;
  out.rows = add(seq.rows, Tensor({seq.length(), d}, std::move(pe)));
  return out;
}

inline Tensor fuse_attention(const Tensor& x, const FusionParams& p, const FusionConfig& cfg,
                             bool training, Rng& rng, AttentionTrace* trace = nullptr) {
  const Tensor attended =
      multi_head_attention(p.norm_in(x), p.attention, cfg.attention_dropout, training, rng, trace);
  return p.norm_out(add(x, attended));
}

/// Row-wise FFN, pooling, and a single logit.
inline Tensor classify_logit(const Tensor& x, const FusionParams& p, const FusionConfig& cfg,
                             bool training, Rng& rng, std::size_t token_rows) {
  const Tensor hidden = dropout(p.ffn(relu(x)), cfg.hidden_dropout, training, rng);
  const Tensor pooled = (cfg.pooling == Pooling::cls && token_rows > 0)
                            ? slice_rows(hidden, 0, 1)
                            : mean_rows(hidden);
  return reshape(p.classifier(pooled), {1});
}

inline Tensor classify(const Tensor& x, const FusionParams& p, const FusionConfig& cfg,
                       bool training, Rng& rng, std::size_t token_rows) {
  return sigmoid(classify_logit(x, p, cfg, training, rng, token_rows));
}

/// Full fusion path for one tweet.  Without the attention layer the tokens
/// are mean-pooled into one row and stacked with the user rows straight
/// into the FFN.
inline Tensor fusion_probability(const Tensor& token_embeddings, const Tensor& user_rows,
                                 const FusionParams& p, const FusionConfig& cfg, bool training,
                                 Rng& rng, AttentionTrace* trace = nullptr) {
  if (!cfg.use_attention) {
    std::vector<Tensor> parts;
    if (token_embeddings.defined()) parts.push_back(mean_rows(token_embeddings));
    if (user_rows.defined()) parts.push_back(user_rows);
    require(!parts.empty(), "fusion: nothing to classify");
    const Tensor rows = parts.size() == 1 ? parts.front() : concat_rows(parts);
    return classify(rows, p, cfg, training, rng, 0);
  }
  const auto seq = add_position_encoding(assemble(token_embeddings, user_rows));
  const Tensor fused = fuse_attention(seq.rows, p, cfg, training, rng, trace);
  return classify(fused, p, cfg, training, rng, seq.token_rows);
}

}  // namespace ctold

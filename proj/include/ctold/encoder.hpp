#pragma once

// Token + learned position embeddings followed by a stack of transformer
// encoder blocks; returns the last hidden layer, one row per token.

#include <span>
#include <string>
#include <vector>

#include "ctold/layers.hpp"

namespace ctold {

struct EncoderConfig {
  std::size_t vocab_size = 0;
  std::size_t max_len = 64;
  std::size_t d_model = 64;
  std::size_t heads = 4;
  std::size_t d_ff = 128;
  std::size_t layers = 2;
  double attention_dropout = 0.5;
  double hidden_dropout = 0.1;
  bool pre_norm = true;
};

struct EncoderBlockParams {
  MhaParams attention;
  LayerNormParams norm1, norm2;
  LinearParams ff1, ff2;

  static EncoderBlockParams xavier(const EncoderConfig& cfg, Rng& rng) {
    EncoderBlockParams b;
    b.attention = MhaParams::xavier(cfg.d_model, cfg.heads, rng);
    b.norm1 = LayerNormParams::identity(cfg.d_model);
    b.norm2 = LayerNormParams::identity(cfg.d_model);
    b.ff1 = LinearParams::xavier(cfg.d_model, cfg.d_ff, rng);
    b.ff2 = LinearParams::xavier(cfg.d_ff, cfg.d_model, rng);
    return b;
  }

  void collect(const std::string& prefix, ParamList& out) const {
    attention.collect(prefix + ".attn", out);
    norm1.collect(prefix + ".norm1", out);
    norm2.collect(prefix + ".norm2", out);
    ff1.collect(prefix + ".ff1", out);
    ff2.collect(prefix + ".ff2", out);
  }
};

struct EncoderParams {
  Tensor token_embedding;     // [vocab, d_model]
  Tensor position_embedding;  // [max_len, d_model]
  std::vector<EncoderBlockParams> blocks;
  LayerNormParams final_norm;  // pre-norm stacks only

  static EncoderParams xavier(const EncoderConfig& cfg, Rng& rng) {
    require(cfg.vocab_size > 0 && cfg.max_len > 0 && cfg.d_model > 0,
            "EncoderParams: vocab_size, max_len and d_model must be positive");
    require(cfg.d_model % cfg.heads == 0, "EncoderParams: d_model must divide by heads");
    EncoderParams p;
    p.token_embedding = xavier_normal(cfg.vocab_size, cfg.d_model, rng);
    p.position_embedding = xavier_normal(cfg.max_len, cfg.d_model, rng);
    for (std::size_t l = 0; l < cfg.layers; ++l)
      p.blocks.push_back(EncoderBlockParams::xavier(cfg, rng));
    if (cfg.pre_norm) p.final_norm = LayerNormParams::identity(cfg.d_model);
    return p;
  }

  void collect(const std::string& prefix, ParamList& out) const {
    out.push_back({prefix + ".token_embedding", token_embedding});
    out.push_back({prefix + ".position_embedding", position_embedding});
    for (std::size_t l = 0; l < blocks.size(); ++l)
      blocks[l].collect(prefix + ".block" + std::to_string(l), out);
    if (final_norm.gain.defined()) final_norm.collect(prefix + ".final_norm", out);
  }
};

/// Pre-norm:  x + MHA(LN1(x)), then + FFN(LN2(.)).
/// Post-norm: LN1(x + MHA(x)), then LN2(. + FFN(.)).
inline Tensor self_attention_block(const Tensor& x, const EncoderBlockParams& b,
                                   const EncoderConfig& cfg, bool training, Rng& rng,
                                   AttentionTrace* trace = nullptr) {
  auto ffn = [&](const Tensor& t) { return b.ff2(relu(b.ff1(t))); };
  auto hidden_drop = [&](const Tensor& t) {
    return dropout(t, cfg.hidden_dropout, training, rng);
  };
  if (cfg.pre_norm) {
    const Tensor a = add(x, hidden_drop(multi_head_attention(
                                b.norm1(x), b.attention, cfg.attention_dropout, training,
                                rng, trace)));
    return add(a, hidden_drop(ffn(b.norm2(a))));
  }
  const Tensor a = b.norm1(add(
      x, hidden_drop(multi_head_attention(x, b.attention, cfg.attention_dropout, training, rng,
                                          trace))));
  return b.norm2(add(a, hidden_drop(ffn(a))));
}

/// Last-hidden-layer embeddings F, shape [M, d_model].
inline Tensor encode_tokens(std::span<const int> token_ids, const EncoderParams& p,
                            const EncoderConfig& cfg, bool training, Rng& rng,
                            AttentionTrace* trace = nullptr) {
  require(!token_ids.empty(), "encode_tokens: empty sequence");
  require(token_ids.size() <= cfg.max_len, "encode_tokens: sequence longer than max_len");
  for (int id : token_ids)
    require(id >= 0 && static_cast<std::size_t>(id) < cfg.vocab_size,
            "encode_tokens: token id " + std::to_string(id) + " out of range");
  std::vector<std::size_t> positions(token_ids.size());
  for (std::size_t i = 0; i < positions.size(); ++i) positions[i] = i;
  Tensor x = add(embedding(p.token_embedding, token_ids),
                 gather_rows(p.position_embedding, positions));
  x = dropout(x, cfg.hidden_dropout, training, rng);
  for (const auto& block : p.blocks) x = self_attention_block(x, block, cfg, training, rng, trace);
  if (cfg.pre_norm) x = p.final_norm(x);
  return x;
}

}  // namespace ctold

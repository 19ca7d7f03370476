#pragma once

// Single-layer multi-head graph attention over a sparse neighbourhood list.
//
// Per head k:  z = h W^k,  e_ij = LeakyReLU(a^k . [z_i || z_j]) for j in N(i),
// alpha_ij = softmax_j(e_ij),  h'_i = sigma(sum_j alpha_ij z_j).
// The layer output for node i is the K head vectors followed by a residual
// row W_r h_i.

#include <string>
#include <vector>

#include "ctold/graph.hpp"
#include "ctold/layers.hpp"

namespace ctold {

enum class GatActivation { elu, identity };

struct GatConfig {
  std::size_t feature_dim = 2;
  std::size_t heads = 8;
  std::size_t head_dim = 8;
  bool residual = true;
  GatActivation activation = GatActivation::elu;
  double leaky_slope = 0.2;
  double attention_dropout = 0.5;

  std::size_t output_width() const { return (heads + (residual ? 1 : 0)) * head_dim; }
};

struct GatParams {
  std::vector<Tensor> projection;  // W^k: [feature_dim, head_dim]
  std::vector<Tensor> attention;   // a^k: [2 * head_dim, 1]
  Tensor residual;                 // W_r: [feature_dim, head_dim], undefined without residual

  static GatParams xavier(const GatConfig& cfg, Rng& rng) {
    require(cfg.heads >= 1 && cfg.head_dim >= 1 && cfg.feature_dim >= 1,
            "GatParams: heads, head_dim and feature_dim must be positive");
    GatParams p;
    for (std::size_t k = 0; k < cfg.heads; ++k) {
      p.projection.push_back(xavier_normal(cfg.feature_dim, cfg.head_dim, rng));
      p.attention.push_back(xavier_normal(2 * cfg.head_dim, 1, rng));
    }
    if (cfg.residual) p.residual = xavier_normal(cfg.feature_dim, cfg.head_dim, rng);
    return p;
  }

  void collect(const std::string& prefix, ParamList& out) const {
    for (std::size_t k = 0; k < projection.size(); ++k) {
      out.push_back({prefix + ".head" + std::to_string(k) + ".W", projection[k]});
      out.push_back({prefix + ".head" + std::to_string(k) + ".a", attention[k]});
    }
    if (residual.defined()) out.push_back({prefix + ".residual.W", residual});
  }
};

/// Edge sources aligned with Neighborhoods::cols.
inline std::vector<std::size_t> edge_sources(const Neighborhoods& nb) {
  std::vector<std::size_t> src(nb.num_arcs());
  for (std::size_t i = 0; i < nb.num_nodes(); ++i)
    for (std::size_t e = nb.offsets[i]; e < nb.offsets[i + 1]; ++e) src[e] = i;
  return src;
}

/// Normalized coefficients alpha, one per arc in `nb` order, shape [E, 1].
inline Tensor attention_coefficients(const Tensor& z, const Neighborhoods& nb,
                                     const Tensor& a, double leaky_slope = 0.2) {
  const std::size_t hd = z.cols();
  require(a.numel() == 2 * hd, "attention_coefficients: a must have 2*head_dim entries");
  require(z.rows() == nb.num_nodes(), "attention_coefficients: z rows != node count");
  const Tensor a2 = reshape(a, {2 * hd, 1});
  const Tensor src_score = matmul(z, slice_rows(a2, 0, hd));       // a_left . z_i
  const Tensor dst_score = matmul(z, slice_rows(a2, hd, 2 * hd));  // a_right . z_j
  const auto src = edge_sources(nb);
  const Tensor e = leaky_relu(add(gather_rows(src_score, src), gather_rows(dst_score, nb.cols)),
                              leaky_slope);
  return segment_softmax(e, nb.offsets);
}

struct GatOutput {
  std::vector<Tensor> heads;  // K tensors of [n, head_dim]
  Tensor residual;            // [n, head_dim] or undefined
  std::vector<Tensor> coefficients;  // per head, [E, 1], before dropout

  /// [n, (K + 1) * head_dim]: heads then residual.
  Tensor concatenated() const {
    std::vector<Tensor> parts = heads;
    if (residual.defined()) parts.push_back(residual);
    return parts.size() == 1 ? parts.front() : concat_cols(parts);
  }
};

inline GatOutput gat_forward(const Tensor& features, const Neighborhoods& nb,
                             const GatParams& params, const GatConfig& cfg, bool training,
                             Rng& rng) {
  require(features.rank() == 2 && features.cols() == cfg.feature_dim,
          "gat_forward: features must be [n, " + std::to_string(cfg.feature_dim) + "], got " +
              shape_str(features.shape()));
  require(features.rows() == nb.num_nodes(), "gat_forward: feature rows != node count");
  require(params.projection.size() == cfg.heads, "gat_forward: head count mismatch");
  GatOutput out;
  for (std::size_t k = 0; k < cfg.heads; ++k) {
    const Tensor z = matmul(features, params.projection[k]);
    Tensor alpha = attention_coefficients(z, nb, params.attention[k], cfg.leaky_slope);
    out.coefficients.push_back(alpha);
    alpha = dropout(alpha, cfg.attention_dropout, training, rng);
    Tensor h = segment_weighted_sum(alpha, z, nb.offsets, nb.cols);
    if (cfg.activation == GatActivation::elu) h = elu(h);
    out.heads.push_back(std::move(h));
  }
  if (cfg.residual) {
    require(params.residual.defined(), "gat_forward: residual projection missing");
    out.residual = matmul(features, params.residual);
  }
  return out;
}

}  // namespace ctold

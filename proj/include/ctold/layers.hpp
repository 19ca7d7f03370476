#pragma once

// Parameter bundles shared by the encoder and the fusion layer, plus scaled
// dot-product multi-head attention.

#include <cmath>
#include <string>
#include <vector>

#include "ctold/init.hpp"
#include "ctold/ops.hpp"

namespace ctold {

struct NamedParam {
  std::string name;
  Tensor tensor;
};

using ParamList = std::vector<NamedParam>;

struct LinearParams {
  Tensor weight;  // [in, out]
  Tensor bias;    // [out]

  static LinearParams xavier(std::size_t in, std::size_t out, Rng& rng) {
    return {xavier_normal(in, out, rng), Tensor::zeros({out}, true)};
  }
  Tensor operator()(const Tensor& x) const { return add(matmul(x, weight), bias); }
  void collect(const std::string& prefix, ParamList& out) const {
    out.push_back({prefix + ".weight", weight});
    out.push_back({prefix + ".bias", bias});
  }
};

struct LayerNormParams {
  Tensor gain;
  Tensor bias;
  double eps = 1e-5;

  static LayerNormParams identity(std::size_t d) {
    return {Tensor::full({d}, 1.0, true), Tensor::zeros({d}, true)};
  }
  Tensor operator()(const Tensor& x) const { return layer_norm(x, gain, bias, eps); }
  void collect(const std::string& prefix, ParamList& out) const {
    out.push_back({prefix + ".gain", gain});
    out.push_back({prefix + ".bias", bias});
  }
};

/// Q/K/V/O projections, all [d_model, d_model]; head h uses columns
/// [h*d_k, (h+1)*d_k) of Q, K and V.
struct MhaParams {
  Tensor wq, wk, wv, wo;
  std::size_t heads = 1;

  static MhaParams xavier(std::size_t d_model, std::size_t heads, Rng& rng) {
    require(heads >= 1 && d_model % heads == 0,
            "attention: d_model must be divisible by the head count");
    MhaParams p;
    p.wq = xavier_normal(d_model, d_model, rng);
    p.wk = xavier_normal(d_model, d_model, rng);
    p.wv = xavier_normal(d_model, d_model, rng);
    p.wo = xavier_normal(d_model, d_model, rng);
    p.heads = heads;
    return p;
  }
  void collect(const std::string& prefix, ParamList& out) const {
    out.push_back({prefix + ".wq", wq});
    out.push_back({prefix + ".wk", wk});
    out.push_back({prefix + ".wv", wv});
    out.push_back({prefix + ".wo", wo});
  }
};

struct AttentionTrace {
  std::vector<Tensor> probabilities;  // one [L, L] matrix per head (pre-dropout)
};

/// softmax(Q K^T / sqrt(d_k)) V per head, heads concatenated through W^O.
inline Tensor multi_head_attention(const Tensor& x, const MhaParams& p,
                                   double attention_dropout, bool training, Rng& rng,
                                   AttentionTrace* trace = nullptr) {
  const std::size_t d = x.cols();
  require(p.wq.dim(0) == d, "attention: input width does not match projections");
  const std::size_t dk = d / p.heads;
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(dk));
  const Tensor q = matmul(x, p.wq), k = matmul(x, p.wk), v = matmul(x, p.wv);
  std::vector<Tensor> heads;
  heads.reserve(p.heads);
  for (std::size_t h = 0; h < p.heads; ++h) {
    const Tensor qh = p.heads == 1 ? q : slice_cols(q, h * dk, (h + 1) * dk);
    const Tensor kh = p.heads == 1 ? k : slice_cols(k, h * dk, (h + 1) * dk);
    const Tensor vh = p.heads == 1 ? v : slice_cols(v, h * dk, (h + 1) * dk);
    Tensor probs = softmax_rows(scale(matmul(qh, transpose(kh)), inv_sqrt));
    if (trace) trace->probabilities.push_back(probs);
    probs = dropout(probs, attention_dropout, training, rng);
    heads.push_back(matmul(probs, vh));
  }
  const Tensor joined = p.heads == 1 ? heads.front() : concat_cols(heads);
  return matmul(joined, p.wo);
}

inline std::size_t count_parameters(const ParamList& params) {
  std::size_t n = 0;
  for (const auto& p : params) n += p.tensor.numel();
  return n;
}

}  // namespace ctold

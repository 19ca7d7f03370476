#pragma once

// Differentiable primitives over ctold::Tensor.
//
// Matrix ops take rank-2 tensors; rank-1 tensors are treated as one row where
// that is unambiguous (row-wise ops, bias broadcast).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "ctold/tensor.hpp"

namespace ctold {

using Rng = std::mt19937_64;

namespace detail {

inline void require_matrix(const Tensor& t, const char* op) {
  require(t.defined(), std::string(op) + ": undefined tensor");
  require(t.rank() == 2, std::string(op) + ": expected a matrix, got " +
                             shape_str(t.shape()));
}

template <class Fwd, class Deriv>
Tensor unary(const Tensor& x, const char* op, Fwd fwd, Deriv deriv) {
  auto in = x.data();
  std::vector<double> out(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = fwd(in[i]);
  return make_result(x.shape(), out, {x}, op,
                     [deriv, out](Node& self) {
                       auto* g = parent_grad(self, 0);
                       if (!g) return;
                       const auto& xin = self.parents[0]->data;
                       for (std::size_t i = 0; i < xin.size(); ++i)
                         (*g)[i] += self.grad[i] * deriv(xin[i], out[i]);
                     });
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Shape manipulation

inline Tensor reshape(const Tensor& x, Shape shape) {
  require(shape_numel(shape) == x.numel(),
          "reshape: " + shape_str(x.shape()) + " -> " + shape_str(shape));
  return detail::make_result(std::move(shape),
                             std::vector<double>(x.data().begin(), x.data().end()),
                             {x}, "reshape", [](detail::Node& self) {
                               auto* g = detail::parent_grad(self, 0);
                               if (!g) return;
                               for (std::size_t i = 0; i < g->size(); ++i)
                                 (*g)[i] += self.grad[i];
                             });
}

inline Tensor transpose(const Tensor& x) {
  detail::require_matrix(x, "transpose");
  const std::size_t r = x.dim(0), c = x.dim(1);
  std::vector<double> out(r * c);
  auto in = x.data();
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out[j * r + i] = in[i * c + j];
  return detail::make_result({c, r}, std::move(out), {x}, "transpose",
                             [r, c](detail::Node& self) {
                               auto* g = detail::parent_grad(self, 0);
                               if (!g) return;
                               for (std::size_t i = 0; i < r; ++i)
                                 for (std::size_t j = 0; j < c; ++j)
                                   (*g)[i * c + j] += self.grad[j * r + i];
                             });
}

/// Stacks matrices (or row vectors) with equal column count vertically.
inline Tensor concat_rows(const std::vector<Tensor>& parts) {
  require(!parts.empty(), "concat_rows: no inputs");
  const std::size_t c = parts.front().cols();
  std::size_t r = 0;
  for (const auto& p : parts) {
    require(p.cols() == c, "concat_rows: column mismatch " +
                               shape_str(p.shape()) + " vs width " +
                               std::to_string(c));
    r += p.rows();
  }
  std::vector<double> out;
  out.reserve(r * c);
  for (const auto& p : parts) out.insert(out.end(), p.data().begin(), p.data().end());
  return detail::make_result({r, c}, std::move(out), parts, "concat_rows",
                             [](detail::Node& self) {
                               std::size_t offset = 0;
                               for (std::size_t k = 0; k < self.parents.size(); ++k) {
                                 const std::size_t n = self.parents[k]->data.size();
                                 if (auto* g = detail::parent_grad(self, k))
                                   for (std::size_t i = 0; i < n; ++i)
                                     (*g)[i] += self.grad[offset + i];
                                 offset += n;
                               }
                             });
}

/// Joins matrices with equal row count side by side.
inline Tensor concat_cols(const std::vector<Tensor>& parts) {
  require(!parts.empty(), "concat_cols: no inputs");
  const std::size_t r = parts.front().rows();
  std::vector<std::size_t> widths;
  std::size_t c = 0;
  for (const auto& p : parts) {
    require(p.rows() == r, "concat_cols: row mismatch " + shape_str(p.shape()));
    widths.push_back(p.cols());
    c += p.cols();
  }
  std::vector<double> out(r * c);
  std::size_t col0 = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    auto in = parts[k].data();
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < widths[k]; ++j)
        out[i * c + col0 + j] = in[i * widths[k] + j];
    col0 += widths[k];
  }
  return detail::make_result({r, c}, std::move(out), parts, "concat_cols",
                             [r, c, widths](detail::Node& self) {
                               std::size_t col = 0;
                               for (std::size_t k = 0; k < widths.size(); ++k) {
                                 if (auto* g = detail::parent_grad(self, k))
                                   for (std::size_t i = 0; i < r; ++i)
                                     for (std::size_t j = 0; j < widths[k]; ++j)
                                       (*g)[i * widths[k] + j] += self.grad[i * c + col + j];
                                 col += widths[k];
                               }
                             });
}

/// Rows [begin, end) of a matrix.
inline Tensor slice_rows(const Tensor& x, std::size_t begin, std::size_t end) {
  detail::require_matrix(x, "slice_rows");
  require(begin < end && end <= x.dim(0), "slice_rows: bad range");
  const std::size_t c = x.dim(1);
  std::vector<double> out(x.data().begin() + begin * c, x.data().begin() + end * c);
  return detail::make_result({end - begin, c}, std::move(out), {x}, "slice_rows",
                             [begin, c](detail::Node& self) {
                               auto* g = detail::parent_grad(self, 0);
                               if (!g) return;
                               for (std::size_t i = 0; i < self.grad.size(); ++i)
                                 (*g)[begin * c + i] += self.grad[i];
                             });
}

/// Columns [begin, end) of a matrix.
inline Tensor slice_cols(const Tensor& x, std::size_t begin, std::size_t end) {
  detail::require_matrix(x, "slice_cols");
  require(begin < end && end <= x.dim(1), "slice_cols: bad range");
  const std::size_t r = x.dim(0), c = x.dim(1), w = end - begin;
  std::vector<double> out(r * w);
  auto in = x.data();
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < w; ++j) out[i * w + j] = in[i * c + begin + j];
  return detail::make_result({r, w}, std::move(out), {x}, "slice_cols",
                             [r, c, w, begin](detail::Node& self) {
                               auto* g = detail::parent_grad(self, 0);
                               if (!g) return;
                               for (std::size_t i = 0; i < r; ++i)
                                 for (std::size_t j = 0; j < w; ++j)
                                   (*g)[i * c + begin + j] += self.grad[i * w + j];
                             });
}

/// Selects rows of a matrix by index (embedding lookup when x is a table).
inline Tensor gather_rows(const Tensor& table, std::span<const std::size_t> indices) {
  detail::require_matrix(table, "gather_rows");
  require(!indices.empty(), "gather_rows: no indices");
  const std::size_t n = table.dim(0), c = table.dim(1);
  std::vector<std::size_t> idx(indices.begin(), indices.end());
  std::vector<double> out(idx.size() * c);
  auto in = table.data();
  for (std::size_t i = 0; i < idx.size(); ++i) {
    require(idx[i] < n, "gather_rows: index " + std::to_string(idx[i]) +
                            " out of range for " + std::to_string(n) + " rows");
    std::copy_n(in.begin() + idx[i] * c, c, out.begin() + i * c);
  }
  return detail::make_result({idx.size(), c}, std::move(out), {table},
                             "gather_rows", [idx, c](detail::Node& self) {
                               auto* g = detail::parent_grad(self, 0);
                               if (!g) return;
                               for (std::size_t i = 0; i < idx.size(); ++i)
                                 for (std::size_t j = 0; j < c; ++j)
                                   (*g)[idx[i] * c + j] += self.grad[i * c + j];
                             });
}

inline Tensor embedding(const Tensor& table, std::span<const int> ids) {
  std::vector<std::size_t> idx;
  idx.reserve(ids.size());
  for (int id : ids) {
    require(id >= 0 && static_cast<std::size_t>(id) < table.dim(0),
            "embedding: token id " + std::to_string(id) + " out of range");
    idx.push_back(static_cast<std::size_t>(id));
  }
  return gather_rows(table, idx);
}

// ---------------------------------------------------------------------------
// Linear algebra and arithmetic

inline Tensor matmul(const Tensor& a, const Tensor& b) {
  detail::require_matrix(a, "matmul");
  detail::require_matrix(b, "matmul");
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  require(b.dim(0) == k, "matmul: inner dimension mismatch " +
                             shape_str(a.shape()) + " x " + shape_str(b.shape()));
  std::vector<double> out(m * n, 0.0);
  auto A = a.data();
  auto B = b.data();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = A[i * k + p];
      if (aip == 0.0) continue;
      const double* brow = &B[p * n];
      double* orow = &out[i * n];
      for (std::size_t j = 0; j < n; ++j) orow[j] += aip * brow[j];
    }
  return detail::make_result({m, n}, std::move(out), {a, b}, "matmul",
                             [m, k, n](detail::Node& self) {
                               const auto& A = self.parents[0]->data;
                               const auto& B = self.parents[1]->data;
                               const auto& G = self.grad;
                               if (auto* ga = detail::parent_grad(self, 0))
                                 for (std::size_t i = 0; i < m; ++i)
                                   for (std::size_t p = 0; p < k; ++p) {
                                     double acc = 0.0;
                                     for (std::size_t j = 0; j < n; ++j)
                                       acc += G[i * n + j] * B[p * n + j];
                                     (*ga)[i * k + p] += acc;
                                   }
                               if (auto* gb = detail::parent_grad(self, 1))
                                 for (std::size_t i = 0; i < m; ++i)
                                   for (std::size_t p = 0; p < k; ++p) {
                                     const double aip = A[i * k + p];
                                     if (aip == 0.0) continue;
                                     for (std::size_t j = 0; j < n; ++j)
                                       (*gb)[p * n + j] += aip * G[i * n + j];
                                   }
                             });
}

/// Elementwise sum.  `b` may match `a` exactly or be a bias of length
/// cols(a), which is broadcast over rows.
inline Tensor add(const Tensor& a, const Tensor& b) {
  const bool same = a.shape() == b.shape();
  const bool bias = !same && b.rank() == 1 && b.numel() == a.cols();
  require(same || bias, "add: incompatible shapes " + shape_str(a.shape()) +
                            " + " + shape_str(b.shape()));
  const std::size_t c = a.cols();
  std::vector<double> out(a.data().begin(), a.data().end());
  auto B = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += same ? B[i] : B[i % c];
  return detail::make_result(a.shape(), std::move(out), {a, b}, "add",
                             [same, c](detail::Node& self) {
                               if (auto* ga = detail::parent_grad(self, 0))
                                 for (std::size_t i = 0; i < self.grad.size(); ++i)
                                   (*ga)[i] += self.grad[i];
                               if (auto* gb = detail::parent_grad(self, 1))
                                 for (std::size_t i = 0; i < self.grad.size(); ++i)
                                   (*gb)[same ? i : i % c] += self.grad[i];
                             });
}

inline Tensor sub(const Tensor& a, const Tensor& b) {
  require(a.shape() == b.shape(), "sub: shape mismatch");
  std::vector<double> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] - b[i];
  return detail::make_result(a.shape(), std::move(out), {a, b}, "sub",
                             [](detail::Node& self) {
                               if (auto* ga = detail::parent_grad(self, 0))
                                 for (std::size_t i = 0; i < self.grad.size(); ++i)
                                   (*ga)[i] += self.grad[i];
                               if (auto* gb = detail::parent_grad(self, 1))
                                 for (std::size_t i = 0; i < self.grad.size(); ++i)
                                   (*gb)[i] -= self.grad[i];
                             });
}

/// Elementwise (Hadamard) product of equal shapes.
inline Tensor mul(const Tensor& a, const Tensor& b) {
  require(a.shape() == b.shape(), "mul: shape mismatch " + shape_str(a.shape()) +
                                      " * " + shape_str(b.shape()));
  std::vector<double> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * b[i];
  return detail::make_result(a.shape(), std::move(out), {a, b}, "mul",
                             [](detail::Node& self) {
                               const auto& A = self.parents[0]->data;
                               const auto& B = self.parents[1]->data;
                               if (auto* ga = detail::parent_grad(self, 0))
                                 for (std::size_t i = 0; i < self.grad.size(); ++i)
                                   (*ga)[i] += self.grad[i] * B[i];
                               if (auto* gb = detail::parent_grad(self, 1))
                                 for (std::size_t i = 0; i < self.grad.size(); ++i)
                                   (*gb)[i] += self.grad[i] * A[i];
                             });
}

inline Tensor scale(const Tensor& x, double factor) {
  return detail::unary(
      x, "scale", [factor](double v) { return v * factor; },
      [factor](double, double) { return factor; });
}

inline Tensor add_scalar(const Tensor& x, double value) {
  return detail::unary(
      x, "add_scalar", [value](double v) { return v + value; },
      [](double, double) { return 1.0; });
}

// ---------------------------------------------------------------------------
// Elementwise nonlinearities

inline Tensor relu(const Tensor& x) {
  return detail::unary(
      x, "relu", [](double v) { return v > 0.0 ? v : 0.0; },
      [](double v, double) { return v > 0.0 ? 1.0 : 0.0; });
}

inline Tensor leaky_relu(const Tensor& x, double slope = 0.2) {
  require(slope > 0.0, "leaky_relu: slope must be positive");
  return detail::unary(
      x, "leaky_relu", [slope](double v) { return v > 0.0 ? v : slope * v; },
      [slope](double v, double) { return v > 0.0 ? 1.0 : slope; });
}

inline Tensor elu(const Tensor& x, double alpha = 1.0) {
  return detail::unary(
      x, "elu", [alpha](double v) { return v > 0.0 ? v : alpha * std::expm1(v); },
      [alpha](double v, double y) { return v > 0.0 ? 1.0 : y + alpha; });
}

inline Tensor sigmoid(const Tensor& x) {
  return detail::unary(
      x, "sigmoid",
      [](double v) {
        if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
        const double e = std::exp(v);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

inline Tensor log(const Tensor& x) {
  for (double v : x.data()) require(v > 0.0, "log: non-positive input");
  return detail::unary(
      x, "log", [](double v) { return std::log(v); },
      [](double v, double) { return 1.0 / v; });
}

inline Tensor exp(const Tensor& x) {
  return detail::unary(
      x, "exp", [](double v) { return std::exp(v); },
      [](double, double y) { return y; });
}

/// x^p elementwise.  Non-integer p requires x > 0.
inline Tensor pow(const Tensor& x, double p) {
  return detail::unary(
      x, "pow", [p](double v) { return std::pow(v, p); },
      [p](double v, double) { return p == 0.0 ? 0.0 : p * std::pow(v, p - 1.0); });
}

/// Clamps into [lo, hi]; the gradient is zero where clamping is active.
inline Tensor clamp(const Tensor& x, double lo, double hi) {
  require(lo <= hi, "clamp: empty interval");
  return detail::unary(
      x, "clamp", [lo, hi](double v) { return std::clamp(v, lo, hi); },
      [lo, hi](double v, double) { return (v < lo || v > hi) ? 0.0 : 1.0; });
}

// ---------------------------------------------------------------------------
// Reductions

inline Tensor sum(const Tensor& x) {
  double s = 0.0;
  for (double v : x.data()) s += v;
  return detail::make_result({1}, {s}, {x}, "sum", [](detail::Node& self) {
    auto* g = detail::parent_grad(self, 0);
    if (!g) return;
    for (auto& v : *g) v += self.grad[0];
  });
}

inline Tensor mean(const Tensor& x) {
  const double n = static_cast<double>(x.numel());
  return scale(sum(x), 1.0 / n);
}

/// Column means of a matrix, returned as a [1, cols] row.
inline Tensor mean_rows(const Tensor& x) {
  const std::size_t r = x.rows(), c = x.cols();
  std::vector<double> out(c, 0.0);
  auto in = x.data();
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out[j] += in[i * c + j];
  for (auto& v : out) v /= static_cast<double>(r);
  return detail::make_result({1, c}, std::move(out), {x}, "mean_rows",
                             [r, c](detail::Node& self) {
                               auto* g = detail::parent_grad(self, 0);
                               if (!g) return;
                               const double inv = 1.0 / static_cast<double>(r);
                               for (std::size_t i = 0; i < r; ++i)
                                 for (std::size_t j = 0; j < c; ++j)
                                   (*g)[i * c + j] += self.grad[j] * inv;
                             });
}

// ---------------------------------------------------------------------------
// Normalization

/// Softmax along the last axis (every row of a matrix, or the whole vector).
inline Tensor softmax_rows(const Tensor& x) {
  const std::size_t r = x.numel() / x.cols(), c = x.cols();
  std::vector<double> out(x.numel());
  auto in = x.data();
  for (std::size_t i = 0; i < r; ++i) {
    const double* row = &in[i * c];
    const double mx = *std::max_element(row, row + c);
    double z = 0.0;
    for (std::size_t j = 0; j < c; ++j) z += out[i * c + j] = std::exp(row[j] - mx);
    for (std::size_t j = 0; j < c; ++j) out[i * c + j] /= z;
  }
  return detail::make_result(x.shape(), out, {x}, "softmax",
                             [out, r, c](detail::Node& self) {
                               auto* g = detail::parent_grad(self, 0);
                               if (!g) return;
                               for (std::size_t i = 0; i < r; ++i) {
                                 double dot = 0.0;
                                 for (std::size_t j = 0; j < c; ++j)
                                   dot += self.grad[i * c + j] * out[i * c + j];
                                 for (std::size_t j = 0; j < c; ++j)
                                   (*g)[i * c + j] += out[i * c + j] * (self.grad[i * c + j] - dot);
                               }
                             });
}

/// Softmax along `axis` (0 or 1 for matrices; -1 means last).
inline Tensor softmax(const Tensor& x, int axis = -1) {
  const int last = static_cast<int>(x.rank()) - 1;
  if (axis < 0) axis += static_cast<int>(x.rank());
  require(axis >= 0 && axis <= last && x.rank() <= 2, "softmax: bad axis");
  if (axis == last) return softmax_rows(x);
  return transpose(softmax_rows(transpose(x)));
}

/// Normalizes each row over its last dimension, then applies gain and bias.
inline Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias,
                         double eps = 1e-5) {
  const std::size_t d = x.cols(), r = x.numel() / d;
  require(gain.numel() == d && bias.numel() == d,
          "layer_norm: gain/bias width must be " + std::to_string(d));
  require(eps > 0.0, "layer_norm: eps must be positive");
  std::vector<double> xhat(x.numel()), inv_std(r), out(x.numel());
  auto in = x.data();
  auto G = gain.data();
  auto B = bias.data();
  for (std::size_t i = 0; i < r; ++i) {
    double mu = 0.0;
    for (std::size_t j = 0; j < d; ++j) mu += in[i * d + j];
    mu /= static_cast<double>(d);
    double var = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double t = in[i * d + j] - mu;
      var += t * t;
    }
    var /= static_cast<double>(d);
    inv_std[i] = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < d; ++j) {
      xhat[i * d + j] = (in[i * d + j] - mu) * inv_std[i];
      out[i * d + j] = xhat[i * d + j] * G[j] + B[j];
    }
  }
  return detail::make_result(
      x.shape(), std::move(out), {x, gain, bias}, "layer_norm",
      [xhat, inv_std, r, d](detail::Node& self) {
        const auto& G = self.parents[1]->data;
        const auto& dy = self.grad;
        if (auto* gg = detail::parent_grad(self, 1))
          for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < d; ++j) (*gg)[j] += dy[i * d + j] * xhat[i * d + j];
        if (auto* gb = detail::parent_grad(self, 2))
          for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < d; ++j) (*gb)[j] += dy[i * d + j];
        if (auto* gx = detail::parent_grad(self, 0))
          for (std::size_t i = 0; i < r; ++i) {
            double m1 = 0.0, m2 = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
              const double dxh = dy[i * d + j] * G[j];
              m1 += dxh;
              m2 += dxh * xhat[i * d + j];
            }
            m1 /= static_cast<double>(d);
            m2 /= static_cast<double>(d);
            for (std::size_t j = 0; j < d; ++j) {
              const double dxh = dy[i * d + j] * G[j];
              (*gx)[i * d + j] += inv_std[i] * (dxh - m1 - xhat[i * d + j] * m2);
            }
          }
      });
}

// ---------------------------------------------------------------------------
// Regularization

/// Inverted dropout: in training mode each element is zeroed with
/// probability `rate` and survivors are scaled by 1/(1-rate).  Evaluation
/// mode returns `x` itself.
inline Tensor dropout(const Tensor& x, double rate, bool training, Rng& rng) {
  require(rate >= 0.0 && rate < 1.0, "dropout: rate must be in [0, 1)");
  if (!training || rate == 0.0) return x;
  std::bernoulli_distribution keep(1.0 - rate);
  const double factor = 1.0 / (1.0 - rate);
  std::vector<double> mask(x.numel());
  for (auto& m : mask) m = keep(rng) ? factor : 0.0;
  std::vector<double> out(x.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] * mask[i];
  return detail::make_result(x.shape(), std::move(out), {x}, "dropout",
                             [mask](detail::Node& self) {
                               auto* g = detail::parent_grad(self, 0);
                               if (!g) return;
                               for (std::size_t i = 0; i < mask.size(); ++i)
                                 (*g)[i] += self.grad[i] * mask[i];
                             });
}

inline Tensor dropout(const Tensor& x, double rate, bool training,
                      std::uint64_t seed) {
  Rng rng(seed);
  return dropout(x, rate, training, rng);
}

// ---------------------------------------------------------------------------
// Segment ops for sparse neighbourhood attention.  Segments are described by
// CSR offsets: segment i owns entries [offsets[i], offsets[i+1]).

/// Softmax within each segment of a flat score vector.
inline Tensor segment_softmax(const Tensor& scores,
                              std::span<const std::size_t> offsets) {
  require(offsets.size() >= 2 && offsets.back() == scores.numel(),
          "segment_softmax: offsets do not cover the scores");
  std::vector<std::size_t> off(offsets.begin(), offsets.end());
  std::vector<double> out(scores.numel());
  auto in = scores.data();
  for (std::size_t s = 0; s + 1 < off.size(); ++s) {
    const std::size_t b = off[s], e = off[s + 1];
    require(b < e, "segment_softmax: empty segment " + std::to_string(s));
    const double mx = *std::max_element(in.begin() + b, in.begin() + e);
    double z = 0.0;
    for (std::size_t k = b; k < e; ++k) z += out[k] = std::exp(in[k] - mx);
    for (std::size_t k = b; k < e; ++k) out[k] /= z;
  }
  return detail::make_result(scores.shape(), out, {scores}, "segment_softmax",
                             [out, off](detail::Node& self) {
                               auto* g = detail::parent_grad(self, 0);
                               if (!g) return;
                               for (std::size_t s = 0; s + 1 < off.size(); ++s) {
                                 double dot = 0.0;
                                 for (std::size_t k = off[s]; k < off[s + 1]; ++k)
                                   dot += self.grad[k] * out[k];
                                 for (std::size_t k = off[s]; k < off[s + 1]; ++k)
                                   (*g)[k] += out[k] * (self.grad[k] - dot);
                               }
                             });
}

/// out[s] = sum over entries k of segment s of weights[k] * values[targets[k]].
inline Tensor segment_weighted_sum(const Tensor& weights, const Tensor& values,
                                   std::span<const std::size_t> offsets,
                                   std::span<const std::size_t> targets) {
  detail::require_matrix(values, "segment_weighted_sum");
  require(weights.numel() == targets.size() && offsets.size() >= 2 &&
              offsets.back() == targets.size(),
          "segment_weighted_sum: inconsistent segment layout");
  const std::size_t segments = offsets.size() - 1, d = values.dim(1);
  std::vector<std::size_t> off(offsets.begin(), offsets.end());
  std::vector<std::size_t> tgt(targets.begin(), targets.end());
  for (auto t : tgt)
    require(t < values.dim(0), "segment_weighted_sum: target out of range");
  std::vector<double> out(segments * d, 0.0);
  auto W = weights.data();
  auto V = values.data();
  for (std::size_t s = 0; s < segments; ++s)
    for (std::size_t k = off[s]; k < off[s + 1]; ++k)
      for (std::size_t j = 0; j < d; ++j) out[s * d + j] += W[k] * V[tgt[k] * d + j];
  return detail::make_result(
      {segments, d}, std::move(out), {weights, values}, "segment_weighted_sum",
      [off, tgt, d](detail::Node& self) {
        const auto& W = self.parents[0]->data;
        const auto& V = self.parents[1]->data;
        auto* gw = detail::parent_grad(self, 0);
        auto* gv = detail::parent_grad(self, 1);
        for (std::size_t s = 0; s + 1 < off.size(); ++s)
          for (std::size_t k = off[s]; k < off[s + 1]; ++k) {
            const double* gout = &self.grad[s * d];
            if (gw) {
              double acc = 0.0;
              for (std::size_t j = 0; j < d; ++j) acc += gout[j] * V[tgt[k] * d + j];
              (*gw)[k] += acc;
            }
            if (gv)
              for (std::size_t j = 0; j < d; ++j) (*gv)[tgt[k] * d + j] += W[k] * gout[j];
          }
      });
}

}  // namespace ctold

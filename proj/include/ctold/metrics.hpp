#pragma once

// Focal loss and the binary evaluation suite: rank-sum AUC with mid-rank
// ties, accuracy, and macro precision / recall / F1 over both classes.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ctold/ops.hpp"

namespace ctold {

struct FocalParams {
  double alpha = 0.25;
  double gamma = 2.0;
};

inline constexpr double kProbabilityClamp = 1e-7;

/// Focal loss for a single prediction.
inline double focal_loss(double y_pred, int y_true, const FocalParams& params = {}) {
  require(y_true == 0 || y_true == 1, "focal_loss: label must be 0 or 1");
  const double p = std::clamp(y_pred, kProbabilityClamp, 1.0 - kProbabilityClamp);
  if (y_true == 1) return -params.alpha * std::pow(1.0 - p, params.gamma) * std::log(p);
  return -(1.0 - params.alpha) * std::pow(p, params.gamma) * std::log(1.0 - p);
}

/// Mean focal loss over a batch of probabilities (any shape, one per label).
inline Tensor focal_loss(const Tensor& probabilities, std::span<const int> labels,
                         const FocalParams& params = {}) {
  require(probabilities.numel() == labels.size() && !labels.empty(),
          "focal_loss: one label per prediction required");
  const std::size_t n = labels.size();
  std::vector<double> pos(n), neg(n);
  for (std::size_t i = 0; i < n; ++i) {
    require(labels[i] == 0 || labels[i] == 1, "focal_loss: label must be 0 or 1");
    pos[i] = labels[i] == 1 ? -params.alpha : 0.0;
    neg[i] = labels[i] == 0 ? -(1.0 - params.alpha) : 0.0;
  }
  const Tensor p = clamp(reshape(probabilities, {n}), kProbabilityClamp,
                         1.0 - kProbabilityClamp);
  const Tensor q = add_scalar(scale(p, -1.0), 1.0);
  const Tensor pos_term =
      mul(Tensor::vector(pos), mul(pow(q, params.gamma), log(p)));
  const Tensor neg_term =
      mul(Tensor::vector(neg), mul(pow(p, params.gamma), log(q)));
  return mean(add(pos_term, neg_term));
}

/// Rank-sum AUC.  Tied scores share the mean of their ranks.
inline double auc(std::span<const double> scores, std::span<const int> labels) {
  require(scores.size() == labels.size(), "auc: scores and labels differ in length");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double rank_sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double mid_rank = 0.5 * static_cast<double>(i + 1 + j);  // ranks i+1..j
    for (std::size_t k = i; k < j; ++k)
      if (labels[order[k]] == 1) rank_sum += mid_rank;
    i = j;
  }
  for (int y : labels) positives += y == 1 ? 1 : 0;
  const std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0)
    throw std::domain_error("auc: undefined without both classes");
  const double m = static_cast<double>(positives);
  return (rank_sum - m * (m + 1.0) / 2.0) / (m * static_cast<double>(negatives));
}

/// Counts from the offensive (label 1) class's point of view; the
/// non-offensive class's cells are the mirror image.
struct ConfusionMatrix {
  std::size_t tp = 0, fn = 0, fp = 0, tn = 0;

  std::size_t total() const { return tp + fn + fp + tn; }

  static ConfusionMatrix from_predictions(std::span<const int> predicted,
                                          std::span<const int> actual) {
    require(predicted.size() == actual.size(), "confusion: length mismatch");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < actual.size(); ++i) {
      if (actual[i] == 1) (predicted[i] == 1 ? cm.tp : cm.fn)++;
      else (predicted[i] == 1 ? cm.fp : cm.tn)++;
    }
    return cm;
  }
};

struct ClassMetrics {
  double precision = 0.0, recall = 0.0, f1 = 0.0;
};

struct MacroMetrics {
  double accuracy = 0.0;
  double precision = 0.0, recall = 0.0, f1 = 0.0;
  ClassMetrics positive, negative;
  std::vector<std::string> warnings;  // zero-denominator cells
};

namespace detail {

inline double safe_ratio(std::size_t num, std::size_t den, const char* what,
                         std::vector<std::string>& warnings) {
  if (den == 0) {
    warnings.emplace_back(std::string(what) + " has a zero denominator; set to 0");
    return 0.0;
  }
  return static_cast<double>(num) / static_cast<double>(den);
}

inline ClassMetrics class_metrics(std::size_t tp, std::size_t fn, std::size_t fp,
                                  const std::string& name,
                                  std::vector<std::string>& warnings) {
  ClassMetrics m;
  m.precision = safe_ratio(tp, tp + fp, (name + " precision").c_str(), warnings);
  m.recall = safe_ratio(tp, tp + fn, (name + " recall").c_str(), warnings);
  m.f1 = (m.precision + m.recall) > 0.0
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  return m;
}

}  // namespace detail

inline MacroMetrics macro_metrics(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw std::invalid_argument("macro_metrics: empty confusion matrix");
  MacroMetrics out;
  out.accuracy = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
  out.positive = detail::class_metrics(cm.tp, cm.fn, cm.fp, "class 1", out.warnings);
  // For class 0 the roles swap: its TP is tn, FN is fp, FP is fn.
  out.negative = detail::class_metrics(cm.tn, cm.fp, cm.fn, "class 0", out.warnings);
  out.precision = 0.5 * (out.positive.precision + out.negative.precision);
  out.recall = 0.5 * (out.positive.recall + out.negative.recall);
  out.f1 = 0.5 * (out.positive.f1 + out.negative.f1);
  return out;
}

struct MetricsReport {
  double auc = std::numeric_limits<double>::quiet_NaN();  // NaN when undefined
  double accuracy = 0.0, precision = 0.0, recall = 0.0, f1 = 0.0;
  ConfusionMatrix confusion;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["auc"] = std::isfinite(auc) ? nlohmann::json(auc) : nlohmann::json(nullptr);
    j["accuracy"] = accuracy;
    j["precision"] = precision;
    j["recall"] = recall;
    j["f1"] = f1;
    j["confusion"] = {{"tp", confusion.tp}, {"fn", confusion.fn},
                      {"fp", confusion.fp}, {"tn", confusion.tn}};
    return j;
  }

  static MetricsReport from_json(const nlohmann::json& j) {
    MetricsReport r;
    r.auc = j.at("auc").is_null() ? std::numeric_limits<double>::quiet_NaN()
                                  : j.at("auc").get<double>();
    r.accuracy = j.at("accuracy").get<double>();
    r.precision = j.at("precision").get<double>();
    r.recall = j.at("recall").get<double>();
    r.f1 = j.at("f1").get<double>();
    const auto& c = j.at("confusion");
    r.confusion = {c.at("tp").get<std::size_t>(), c.at("fn").get<std::size_t>(),
                   c.at("fp").get<std::size_t>(), c.at("tn").get<std::size_t>()};
    return r;
  }
};

/// Thresholds probabilities at `threshold` (>= is offensive) and computes
/// the full report.  AUC is left NaN when only one class is present.
inline MetricsReport evaluate(std::span<const double> probabilities,
                              std::span<const int> labels, double threshold = 0.5) {
  require(probabilities.size() == labels.size() && !labels.empty(),
          "evaluate: need one label per prediction");
  std::vector<int> predicted(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i)
    predicted[i] = probabilities[i] >= threshold ? 1 : 0;
  MetricsReport r;
  r.confusion = ConfusionMatrix::from_predictions(predicted, labels);
  const auto m = macro_metrics(r.confusion);
  r.accuracy = m.accuracy;
  r.precision = m.precision;
  r.recall = m.recall;
  r.f1 = m.f1;
  try {
    r.auc = auc(probabilities, labels);
  } catch (const std::domain_error&) {
  }
  return r;
}

}  // namespace ctold

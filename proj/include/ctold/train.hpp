#pragma once

// Training protocol: data preparation with test masking, joint Adam training
// with two learning-rate groups, early stopping on test macro-F1, and the
// replication, ablation and sweep drivers built on top.

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ctold/adam.hpp"
#include "ctold/config.hpp"
#include "ctold/corpus.hpp"
#include "ctold/graph.hpp"
#include "ctold/metrics.hpp"
#include "ctold/model.hpp"
#include "ctold/preprocess.hpp"
#include "ctold/synthetic.hpp"

namespace ctold {

class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Stops once `patience` consecutive epochs fail to beat the best score.
class EarlyStopping {
 public:
  explicit EarlyStopping(std::size_t patience) : patience_(patience) {
    require(patience >= 1, "EarlyStopping: patience must be >= 1");
  }

  /// Records one epoch's score; returns true when this epoch is the new best.
  bool observe(double score) {
    ++epochs_;
    if (epochs_ == 1 || score > best_) {
      best_ = score;
      best_epoch_ = epochs_;
      stale_ = 0;
      return true;
    }
    ++stale_;
    return false;
  }

  bool should_stop() const { return stale_ >= patience_; }
  double best_score() const { return best_; }
  std::size_t best_epoch() const { return best_epoch_; }  // 1-based
  std::size_t epochs_seen() const { return epochs_; }

 private:
  std::size_t patience_;
  std::size_t epochs_ = 0;
  std::size_t best_epoch_ = 0;
  std::size_t stale_ = 0;
  double best_ = -std::numeric_limits<double>::infinity();
};

/// Seeds for the independent random streams of one run.
struct RunSeeds {
  std::uint64_t split, init, batches, dropout;

  static RunSeeds from(std::uint64_t seed) {
    return {derive_seed(seed, 0), derive_seed(seed, 1), derive_seed(seed, 2),
            derive_seed(seed, 3)};
  }
};

/// Everything a run needs that does not depend on model parameters.
struct PreparedData {
  Corpus corpus;  // preprocessed
  Split split;
  Vocab vocab;
  SocialGraph graph;  // features from the training split only
  Tensor features;
  Neighborhoods neighborhoods;
  std::vector<TokenSequence> train, test;
};

inline Corpus preprocess_corpus(const Corpus& corpus,
                                const EmojiTable& table = EmojiTable::builtin()) {
  std::vector<RawTweet> tweets;
  tweets.reserve(corpus.tweets.size());
  for (const auto& t : corpus.tweets) tweets.push_back(preprocess(t, table));
  return Corpus::make(std::move(tweets), corpus.edges);
}

inline PreparedData prepare_data(const TrainConfig& cfg, const Corpus& raw) {
  PreparedData d;
  d.corpus = preprocess_corpus(raw);
  d.split = split_corpus(d.corpus, cfg.train_fraction, RunSeeds::from(cfg.seed).split,
                         cfg.stratified);
  require(!d.split.train.empty() && !d.split.test.empty(),
          "prepare_data: split leaves an empty side");
  std::vector<std::string> train_texts;
  for (auto i : d.split.train) train_texts.push_back(d.corpus.tweets[i].text);
  d.vocab = build_vocab(train_texts, cfg.min_freq, cfg.max_vocab);
  const auto variant = parse_graph_variant(cfg.graph_variant);
  d.graph = mask_test_information(build_graph(d.corpus), d.corpus, d.split, variant,
                                  parse_init_strategy(cfg.init_strategy), &d.vocab);
  d.features = d.graph.feature_tensor();
  d.neighborhoods = d.graph.neighborhoods(cfg.symmetric_neighborhood);
  auto encode_all = [&](const std::vector<std::size_t>& idx, std::vector<TokenSequence>& out) {
    for (auto i : idx) {
      const auto& t = d.corpus.tweets[i];
      out.push_back(encode(t, d.vocab, cfg.max_len, d.corpus.user_index(t.user_id)));
    }
  };
  encode_all(d.split.train, d.train);
  encode_all(d.split.test, d.test);
  return d;
}

/// The corpus named by the config: files when tweets_path is set,
/// otherwise the planted synthetic generator.
inline Corpus config_corpus(const TrainConfig& cfg) {
  if (!cfg.tweets_path.empty()) return load_corpus(cfg.tweets_path, cfg.edges_path);
  SyntheticConfig s;
  s.tweets = cfg.synthetic_tweets;
  s.users = cfg.synthetic_users;
  s.seed = cfg.synthetic_seed;
  return generate_synthetic(s).corpus();
}

struct RunResult {
  std::vector<double> epoch_loss;     // mean training loss per epoch
  std::vector<double> epoch_test_f1;  // monitored score per epoch
  MetricsReport test;                 // at the best epoch
  std::size_t best_epoch = 0;         // 1-based
  std::size_t epochs = 0;
  std::uint64_t seed = 0;
  std::string ablation;
  std::size_t parameter_count = 0;
  TrainConfig config;

  nlohmann::json to_json() const {
    return {{"seed", seed},
            {"ablation", ablation},
            {"epochs", epochs},
            {"best_epoch", best_epoch},
            {"parameter_count", parameter_count},
            {"epoch_loss", epoch_loss},
            {"epoch_test_f1", epoch_test_f1},
            {"test", test.to_json()},
            {"config", config_to_json(config)}};
  }

  static RunResult from_json(const nlohmann::json& j) {
    RunResult r;
    r.seed = j.at("seed").get<std::uint64_t>();
    r.ablation = j.at("ablation").get<std::string>();
    r.epochs = j.at("epochs").get<std::size_t>();
    r.best_epoch = j.at("best_epoch").get<std::size_t>();
    r.parameter_count = j.at("parameter_count").get<std::size_t>();
    r.epoch_loss = j.at("epoch_loss").get<std::vector<double>>();
    r.epoch_test_f1 = j.at("epoch_test_f1").get<std::vector<double>>();
    r.test = MetricsReport::from_json(j.at("test"));
    r.config = config_from_json(j.at("config"));
    return r;
  }
};

using ParameterSnapshot = std::vector<std::vector<double>>;

inline ParameterSnapshot snapshot(const ParamList& params) {
  ParameterSnapshot s;
  s.reserve(params.size());
  for (const auto& p : params) s.emplace_back(p.tensor.data().begin(), p.tensor.data().end());
  return s;
}

inline void restore(const ParamList& params, const ParameterSnapshot& s) {
  require(params.size() == s.size(), "restore: parameter count mismatch");
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto t = params[i].tensor;
    auto data = t.mutable_data();
    require(data.size() == s[i].size(), "restore: shape mismatch for " + params[i].name);
    std::copy(s[i].begin(), s[i].end(), data.begin());
  }
}

/// Probabilities for `seqs` in evaluation mode.
inline std::vector<double> predict_probabilities(const CtOldModel& model,
                                                 const std::vector<TokenSequence>& seqs,
                                                 const Tensor& features,
                                                 const Neighborhoods& nb) {
  Rng unused(0);
  std::vector<double> out;
  out.reserve(seqs.size());
  GraphContext ctx;
  if (model.config().uses_graph()) ctx = model.graph_context(features, nb, false, unused);
  for (const auto& seq : seqs) {
    const auto p = model.predict(seq, model.config().uses_graph() ? &ctx : nullptr, false, unused);
    out.push_back(p.item());
  }
  return out;
}

inline std::vector<int> labels_of(const std::vector<TokenSequence>& seqs) {
  std::vector<int> y;
  y.reserve(seqs.size());
  for (const auto& s : seqs) y.push_back(s.label);
  return y;
}

/// A trained model together with the data it was trained on.
struct TrainedModel {
  PreparedData data;
  CtOldModel model;
  RunResult result;
  ParameterSnapshot last_epoch;  // parameters after the final epoch
};

inline TrainedModel train_model(const TrainConfig& cfg, const Corpus& corpus) {
  cfg.validate();
  auto data = prepare_data(cfg, corpus);
  const auto seeds = RunSeeds::from(cfg.seed);
  CtOldModel model(cfg.model_config(data.vocab.size(), data.graph.feature_dim()), seeds.init);

  const auto params = model.parameters();
  std::vector<Tensor> gat_group, rest_group;
  for (const auto& p : params)
    (CtOldModel::in_gat_group(p.name) ? gat_group : rest_group).push_back(p.tensor);
  Adam optimizer;
  if (!gat_group.empty()) optimizer.add_group(gat_group, cfg.lr_gat);
  optimizer.add_group(rest_group, cfg.lr_rest);

  RunResult result;
  result.seed = cfg.seed;
  result.ablation = cfg.ablation;
  result.parameter_count = model.parameter_count();
  result.config = cfg;

  const auto test_labels = labels_of(data.test);
  BatchSampler sampler(data.train.size(), cfg.batch_size, seeds.batches, true);
  Rng dropout_rng(seeds.dropout);
  EarlyStopping stopper(cfg.early_stop_patience);
  ParameterSnapshot best;

  for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    double loss_sum = 0.0;
    const auto batches = sampler.epoch(epoch);
    for (std::size_t b = 0; b < batches.size(); ++b) {
      std::vector<const TokenSequence*> batch;
      std::vector<int> labels;
      for (auto i : batches[b]) {
        batch.push_back(&data.train[i]);
        labels.push_back(data.train[i].label);
      }
      const Tensor probs =
          model.forward(batch, data.features, data.neighborhoods, true, dropout_rng);
      auto diverged = [&](const char* what) {
        std::ostringstream os;
        os << "training diverged: non-finite " << what << " at epoch " << epoch + 1
           << ", batch " << b + 1;
        throw TrainingDiverged(os.str());
      };
      for (double p : probs.data())
        if (!std::isfinite(p)) diverged("prediction");
      const Tensor loss = focal_loss(probs, labels, cfg.focal());
      if (!std::isfinite(loss.item())) diverged("loss");
      optimizer.zero_grad();
      backward(loss);
      optimizer.step();
      loss_sum += loss.item();
    }
    result.epoch_loss.push_back(loss_sum / static_cast<double>(batches.size()));

    const auto probs =
        predict_probabilities(model, data.test, data.features, data.neighborhoods);
    const auto report = evaluate(probs, test_labels, cfg.threshold);
    result.epoch_test_f1.push_back(report.f1);
    if (stopper.observe(report.f1)) {
      result.test = report;
      best = snapshot(params);
    }
    if (stopper.should_stop()) break;
  }
  result.epochs = stopper.epochs_seen();
  result.best_epoch = stopper.best_epoch();

  ParameterSnapshot last = snapshot(params);
  restore(params, best);
  return {std::move(data), std::move(model), std::move(result), std::move(last)};
}

inline RunResult train(const TrainConfig& cfg, const Corpus& corpus) {
  return train_model(cfg, corpus).result;
}

inline RunResult ablate(TrainConfig cfg, AblationVariant variant, const Corpus& corpus) {
  cfg.ablation = to_string(variant);
  return train(cfg, corpus);
}

// ---------------------------------------------------------------------------
// Replication

struct MetricSummary {
  double auc = 0.0, accuracy = 0.0, precision = 0.0, recall = 0.0, f1 = 0.0;

  nlohmann::json to_json() const {
    auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); };
    return {{"auc", num(auc)},
            {"accuracy", num(accuracy)},
            {"precision", num(precision)},
            {"recall", num(recall)},
            {"f1", num(f1)}};
  }
};

struct ReplicationReport {
  std::vector<RunResult> runs;
  MetricSummary mean, std;  // sample standard deviation; 0 for a single run

  nlohmann::json to_json() const {
    nlohmann::json table = nlohmann::json::array();
    for (const auto& r : runs)
      table.push_back({{"seed", r.seed},
                       {"best_epoch", r.best_epoch},
                       {"epochs", r.epochs},
                       {"test", r.test.to_json()}});
    return {{"runs", std::move(table)}, {"mean", mean.to_json()}, {"std", std.to_json()}};
  }
};

inline ReplicationReport summarize(std::vector<RunResult> runs) {
  require(!runs.empty(), "summarize: no runs");
  ReplicationReport rep;
  rep.runs = std::move(runs);
  const double n = static_cast<double>(rep.runs.size());
  auto field = [&](auto getter, double& mean_out, double& std_out) {
    double s = 0.0;
    for (const auto& r : rep.runs) s += getter(r.test);
    mean_out = s / n;
    double ss = 0.0;
    for (const auto& r : rep.runs) ss += (getter(r.test) - mean_out) * (getter(r.test) - mean_out);
    std_out = rep.runs.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  };
  field([](const MetricsReport& m) { return m.auc; }, rep.mean.auc, rep.std.auc);
  field([](const MetricsReport& m) { return m.accuracy; }, rep.mean.accuracy, rep.std.accuracy);
  field([](const MetricsReport& m) { return m.precision; }, rep.mean.precision,
        rep.std.precision);
  field([](const MetricsReport& m) { return m.recall; }, rep.mean.recall, rep.std.recall);
  field([](const MetricsReport& m) { return m.f1; }, rep.mean.f1, rep.std.f1);
  return rep;
}

/// n runs with seeds base, base+1, ...; each seed drives split and init.
inline ReplicationReport replicate(const TrainConfig& cfg, const Corpus& corpus, std::size_t n) {
  require(n >= 1, "replicate: n must be >= 1");
  std::vector<RunResult> runs;
  for (std::size_t i = 0; i < n; ++i) {
    TrainConfig c = cfg;
    c.seed = cfg.seed + i;
    runs.push_back(train(c, corpus));
  }
  return summarize(std::move(runs));
}

inline ReplicationReport replicate(const TrainConfig& cfg, const Corpus& corpus) {
  return replicate(cfg, corpus, cfg.replications);
}

// ---------------------------------------------------------------------------
// Tables

struct TableRow {
  std::vector<std::pair<std::string, std::string>> settings;
  ReplicationReport report;
};

struct ResultTable {
  std::vector<TableRow> rows;

  std::string to_csv() const {
    std::ostringstream os;
    os.precision(10);
    if (rows.empty()) return "";
    for (const auto& [k, v] : rows.front().settings) os << k << ',';
    os << "auc,accuracy,precision,recall,f1,f1_std,runs\n";
    for (const auto& row : rows) {
      for (const auto& [k, v] : row.settings) os << v << ',';
      const auto& m = row.report.mean;
      if (std::isfinite(m.auc)) os << m.auc;
      os << ',' << m.accuracy << ',' << m.precision << ',' << m.recall << ',' << m.f1 << ','
         << row.report.std.f1 << ',' << row.report.runs.size() << '\n';
    }
    return os.str();
  }

  nlohmann::json to_json() const {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& row : rows) {
      nlohmann::json settings = nlohmann::json::object();
      for (const auto& [k, v] : row.settings) settings[k] = v;
      out.push_back({{"settings", settings}, {"report", row.report.to_json()}});
    }
    return out;
  }
};

/// The five single-module ablations followed by the full model.
inline ResultTable ablation_table(const TrainConfig& cfg, const Corpus& corpus) {
  ResultTable t;
  for (auto v : kAllAblations) {
    TrainConfig c = cfg;
    c.ablation = to_string(v);
    t.rows.push_back({{{"variant", to_string(v)}}, replicate(c, corpus)});
  }
  return t;
}

enum class SweepAxis { train_fraction, init_strategy, graph_variant };

inline SweepAxis parse_sweep_axis(const std::string& s) {
  if (s == "train_fraction") return SweepAxis::train_fraction;
  if (s == "init_strategy" || s == "init") return SweepAxis::init_strategy;
  if (s == "graph_variant" || s == "variant") return SweepAxis::graph_variant;
  throw std::invalid_argument("unknown sweep axis '" + s +
                              "' (expected train_fraction, init_strategy or graph_variant)");
}

/// The settings a sweep visits, in row order.
inline std::vector<TrainConfig> sweep_settings(const TrainConfig& cfg, SweepAxis axis) {
  std::vector<TrainConfig> out;
  switch (axis) {
    case SweepAxis::train_fraction:
      for (int i = 1; i <= 9; ++i) {
        TrainConfig c = cfg;
        c.train_fraction = i / 10.0;
        out.push_back(c);
      }
      break;
    case SweepAxis::init_strategy:
      for (double f : {0.1, 0.7})
        for (auto s : {InitStrategy::all0, InitStrategy::all1, InitStrategy::avg,
                       InitStrategy::nonoff}) {
          TrainConfig c = cfg;
          c.train_fraction = f;
          c.init_strategy = to_string(s);
          out.push_back(c);
        }
      break;
    case SweepAxis::graph_variant:
      for (auto a : {AblationVariant::no_encoder, AblationVariant::full})
        for (auto g : {GraphVariant::bow, GraphVariant::hard, GraphVariant::soft}) {
          TrainConfig c = cfg;
          c.ablation = to_string(a);
          c.graph_variant = to_string(g);
          out.push_back(c);
        }
      break;
  }
  return out;
}

inline std::vector<std::pair<std::string, std::string>> sweep_labels(const TrainConfig& c,
                                                                     SweepAxis axis) {
  std::ostringstream frac;
  frac << c.train_fraction;
  switch (axis) {
    case SweepAxis::train_fraction: return {{"train_fraction", frac.str()}};
    case SweepAxis::init_strategy:
      return {{"train_fraction", frac.str()}, {"init_strategy", c.init_strategy}};
    case SweepAxis::graph_variant:
      return {{"ablation", c.ablation}, {"graph_variant", c.graph_variant}};
  }
  return {};
}

inline ResultTable sweep(const TrainConfig& cfg, SweepAxis axis, const Corpus& corpus) {
  ResultTable t;
  for (const auto& c : sweep_settings(cfg, axis))
    t.rows.push_back({sweep_labels(c, axis), replicate(c, corpus)});
  return t;
}

}  // namespace ctold

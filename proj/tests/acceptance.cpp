// Prints one PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "oracles.hpp"

using namespace ctold;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool ok = true;
  std::ostringstream detail;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << " [" << what << "]";
    }
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const int raw = std::system((std::string(CTOLD_CLI_PATH) + " " + args).c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

TrainConfig synthetic_config() { return load_config(std::string(CTOLD_CONFIG_DIR) + "/synthetic.cfg"); }

ModelConfig micro_model() {
  ModelConfig m;
  m.gat = {.feature_dim = 2, .heads = 2, .head_dim = 2};
  m.encoder = {.vocab_size = 9, .max_len = 6, .d_model = 4, .heads = 2, .d_ff = 4, .layers = 1};
  m.fusion.heads = 2;
  return m;
}

void gradient_correctness(Outcome& o) {
  const auto t0 = Clock::now();
  double worst_primitive = 0.0;
  for (std::uint64_t seed = 1000; seed < 1003; ++seed)
    for (const auto& [name, err] : oracle::primitive_grad_errors(seed)) {
      o.expect(err < 1e-4, name + " rel err " + std::to_string(err));
      worst_primitive = std::max(worst_primitive, err);
    }
  const auto g = SocialGraph::build({"a", "b", "c"}, {{0, 1}, {1, 2}, {2, 0}});
  const Tensor features = Tensor::matrix(3, 2, {4.0, 1.0, 2.0, 0.0, 1.0, 1e-6});
  const auto nb = g.neighborhoods();
  double worst_composite = 0.0;
  for (auto variant : kAllAblations) {
    auto cfg = micro_model();
    cfg.variant = variant;
    const CtOldModel model(cfg, 11);
    const std::vector<TokenSequence> seqs{{{2, 3, 4}, 0, 1, "t0"}, {{2, 5, 6}, 2, 0, "t1"}};
    const std::vector<const TokenSequence*> batch{&seqs[0], &seqs[1]};
    const std::vector<int> labels{1, 0};
    std::vector<Tensor> params;
    for (const auto& np : model.parameters()) params.push_back(np.tensor);
    const double err = oracle::grad_check(
        [&] {
          Rng r(0);
          return focal_loss(model.forward(batch, features, nb, false, r), labels);
        },
        params);
    o.expect(err < 1e-3, "composite " + to_string(variant) + " rel err " + std::to_string(err));
    worst_composite = std::max(worst_composite, err);
  }
  const double secs = seconds_since(t0);
  o.expect(secs < 120.0, "runtime " + std::to_string(secs) + " s");
  o.detail << " primitives max " << worst_primitive << ", composite max " << worst_composite
           << ", " << secs << " s";
}

void gat_oracle(Outcome& o) {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto rg = oracle::random_graph(2 + seed % 5, 3, 100 + seed);
    GatConfig cfg{.feature_dim = 3, .heads = 3, .head_dim = 4};
    Rng rng(seed);
    const auto p = GatParams::xavier(cfg, rng);
    const auto out = gat_forward(rg.features, rg.graph.neighborhoods(), p, cfg, false, rng);
    std::vector<oracle::Mat> w, a;
    for (std::size_t k = 0; k < cfg.heads; ++k) {
      w.push_back(oracle::from_tensor(p.projection[k]));
      a.push_back(oracle::from_tensor(p.attention[k]));
    }
    const auto wr = oracle::from_tensor(p.residual);
    const auto dense = oracle::dense_gat(oracle::from_tensor(rg.features), rg.adj, w, a, &wr, true);
    for (std::size_t k = 0; k < cfg.heads; ++k)
      worst = std::max(worst, oracle::max_abs_diff(dense.heads[k], out.heads[k]));
    worst = std::max(worst, oracle::max_abs_diff(dense.residual, out.residual));
  }
  o.expect(worst <= 1e-10, "max abs diff " + std::to_string(worst));
  o.detail << " 10 graphs, max abs diff " << worst;
}

void attention_normalization(Outcome& o) {
  double worst = 0.0;
  auto rows_of = [&](const Tensor& probs) {
    for (std::size_t r = 0; r < probs.rows(); ++r) {
      double s = 0.0;
      for (std::size_t c = 0; c < probs.cols(); ++c) s += probs.at(r, c);
      worst = std::max(worst, std::abs(s - 1.0));
    }
  };
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto rg = oracle::random_graph(6, 3, 200 + seed, 0.5);
    GatConfig gcfg{.feature_dim = 3, .heads = 2, .head_dim = 4};
    Rng rng(seed);
    const auto gp = GatParams::xavier(gcfg, rng);
    const auto nb = rg.graph.neighborhoods();
    for (std::size_t k = 0; k < gcfg.heads; ++k) {
      const Tensor alpha =
          attention_coefficients(matmul(rg.features, gp.projection[k]), nb, gp.attention[k]);
      for (std::size_t i = 0; i < nb.num_nodes(); ++i) {
        double s = 0.0;
        for (std::size_t e = nb.offsets[i]; e < nb.offsets[i + 1]; ++e) s += alpha[e];
        worst = std::max(worst, std::abs(s - 1.0));
      }
    }
    EncoderConfig ecfg{.vocab_size = 20, .max_len = 16, .d_model = 8, .heads = 2, .d_ff = 8};
    const auto ep = EncoderParams::xavier(ecfg, rng);
    std::vector<int> ids{Vocab::kCls};
    for (std::size_t t = 0; t < 3 + seed; ++t) ids.push_back(3 + static_cast<int>((seed * 7 + t) % 17));
    AttentionTrace etrace;
    const Tensor tokens = encode_tokens(ids, ep, ecfg, false, rng, &etrace);
    for (const auto& p : etrace.probabilities) rows_of(p);
    FusionConfig fcfg{.d_model = 8, .heads = 4, .gat_head_dim = 4};
    const auto fp = FusionParams::xavier(fcfg, rng);
    std::mt19937_64 g(seed);
    AttentionTrace ftrace;
    fusion_probability(tokens, oracle::random_tensor({3, 8}, g, false), fp, fcfg, false, rng,
                       &ftrace);
    for (const auto& p : ftrace.probabilities) rows_of(p);
  }
  o.expect(worst <= 1e-9, "max row deviation " + std::to_string(worst));
  o.detail << " GAT, encoder and fusion rows, max |sum - 1| " << worst;
}

void focal_closed_form(Outcome& o) {
  const double pos = focal_loss(0.9, 1), neg = focal_loss(0.9, 0);
  const double pos_hand = 0.25 * 0.1 * 0.1 * -std::log(0.9);
  const double neg_hand = 0.75 * 0.81 * -std::log(0.1);
  o.expect(std::abs(pos - pos_hand) <= 1e-8, "y=1 case");
  o.expect(std::abs(neg - neg_hand) <= 1e-8, "y=0 case");
  // The quoted decimals carry 4 significant figures.
  o.expect(std::abs(pos - 2.634e-4) <= 5e-8, "y=1 quoted value");
  o.expect(std::abs(neg - 1.3988) <= 5e-5, "y=0 quoted value");
  double worst = 0.0;
  for (double p = 0.01; p < 1.0; p += 0.0137) {
    worst = std::max(worst, std::abs(focal_loss(p, 1, {0.5, 0.0}) + 0.5 * std::log(p)));
    worst = std::max(worst, std::abs(focal_loss(p, 0, {0.5, 0.0}) + 0.5 * std::log(1 - p)));
  }
  o.expect(worst <= 1e-10, "half cross-entropy reduction");
  o.detail << " " << pos << ", " << neg << ", reduction err " << worst;
}

void auc_oracle(Outcome& o) {
  std::mt19937_64 rng(2);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng() % 60;
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(rng() % 7) / 7.0;
      y[i] = static_cast<int>(rng() % 3 == 0);
    }
    y[0] = 1;
    y[1] = 0;
    worst = std::max(worst, std::abs(auc(s, y) - oracle::pairwise_auc(s, y)));
  }
  o.expect(worst <= 1e-12, "max diff " + std::to_string(worst));
  o.detail << " 100 tied score sets, max diff " << worst;
}

void metric_suite(Outcome& o) {
  const auto m = macro_metrics({.tp = 8, .fn = 2, .fp = 1, .tn = 9});
  o.expect(std::abs(m.f1 - 0.8496) <= 1e-4, "worked macro-F1 " + std::to_string(m.f1));
  o.expect(std::abs(m.accuracy - 0.85) <= 1e-12, "worked accuracy");
  std::mt19937_64 rng(3);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 50;
    std::vector<int> pred(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      pred[i] = static_cast<int>(rng() % 2);
      y[i] = static_cast<int>(rng() % 4 == 0);
    }
    const auto a = macro_metrics(ConfusionMatrix::from_predictions(pred, y));
    const auto b = oracle::per_sample_macro(pred, y);
    worst = std::max({worst, std::abs(a.accuracy - b.accuracy), std::abs(a.precision - b.precision),
                      std::abs(a.recall - b.recall), std::abs(a.f1 - b.f1)});
  }
  o.expect(worst <= 1e-12, "per-sample recount diff " + std::to_string(worst));
  o.detail << " macro-F1 " << m.f1 << ", recount max diff " << worst;
}

void leakage_and_masking(Outcome& o) {
  auto cfg = synthetic_config();
  cfg.max_epochs = 2;
  cfg.early_stop_patience = 2;
  const auto corpus = config_corpus(cfg);
  const auto data = prepare_data(cfg, corpus);
  const auto& c = data.corpus;
  std::vector<double> non(c.users.size(), 0.0), off(c.users.size(), 0.0);
  std::vector<bool> seen(c.users.size(), false);
  for (auto i : data.split.train) {
    const auto u = c.user_index(c.tweets[i].user_id);
    seen[u] = true;
    (c.tweets[i].label ? off[u] : non[u]) += 1.0;
  }
  const auto fill = init_unknown_features(parse_init_strategy(cfg.init_strategy),
                                          compute_train_stats(c, data.split.train));
  bool equal = data.graph.features().size() == 2 * c.users.size();
  for (std::size_t u = 0; equal && u < c.users.size(); ++u) {
    equal = data.graph.features()[2 * u] == (seen[u] ? non[u] : fill.non_offensive) &&
            data.graph.features()[2 * u + 1] == (seen[u] ? off[u] : fill.offensive);
  }
  o.expect(equal, "masked features differ from the training-split recount");

  auto tweets = corpus.tweets;
  for (auto i : data.split.test) tweets[i].label = 1 - tweets[i].label;
  const auto flipped = Corpus::make(tweets, corpus.edges);
  const auto a = train_model(cfg, corpus), b = train_model(cfg, flipped);
  o.expect(a.last_epoch == b.last_epoch, "parameters changed with test labels");
  o.expect(a.result.epoch_test_f1 != b.result.epoch_test_f1, "flip had no visible effect");
  o.detail << " " << c.users.size() << " users recounted; " << a.model.parameter_count()
           << " parameters identical after flipping " << data.split.test.size() << " test labels";
}

void end_to_end(Outcome& o) {
  const auto cfg = synthetic_config();
  const auto corpus = config_corpus(cfg);
  const auto t0 = Clock::now();
  const auto full = train(cfg, corpus);
  const double secs = seconds_since(t0);
  const auto text_free = ablate(cfg, AblationVariant::no_encoder, corpus);
  o.expect(full.test.f1 >= 0.85, "full F1 " + std::to_string(full.test.f1));
  o.expect(full.epochs <= 20, "epochs");
  o.expect(text_free.test.f1 < full.test.f1, "no_encoder not lower");
  o.expect(secs < 600.0, "runtime " + std::to_string(secs) + " s");
  o.detail << " full F1 " << full.test.f1 << " (best epoch " << full.best_epoch << " of "
           << full.epochs << ", " << secs << " s), no_encoder F1 " << text_free.test.f1;
}

void protocol_fidelity(Outcome& o) {
  EarlyStopping s(5);
  const std::vector<double> trace{0.6, 0.7, 0.7, 0.7, 0.7, 0.7, 0.7, 0.9};
  std::size_t observed = 0;
  for (double f : trace) {
    s.observe(f);
    ++observed;
    if (s.should_stop()) break;
  }
  o.expect(observed == 7 && s.best_epoch() == 2, "early stopping halted after " +
                                                     std::to_string(observed));
  TrainConfig tiny;
  tiny.synthetic_tweets = 200;
  tiny.synthetic_users = 30;
  tiny.gat_hidden = 8;
  tiny.gat_heads = 2;
  tiny.d_model = 8;
  tiny.encoder_heads = 2;
  tiny.encoder_layers = 1;
  tiny.d_ff = 8;
  tiny.fusion_heads = 2;
  tiny.max_len = 16;
  tiny.min_freq = 1;
  tiny.max_epochs = 1;
  tiny.early_stop_patience = 1;
  tiny.replications = 1;
  const auto corpus = config_corpus(tiny);
  std::ostringstream counts;
  const std::pair<SweepAxis, std::size_t> expected[] = {
      {SweepAxis::train_fraction, 9}, {SweepAxis::init_strategy, 8}, {SweepAxis::graph_variant, 6}};
  for (const auto& [axis, rows] : expected) {
    const auto table = sweep(tiny, axis, corpus);
    std::size_t csv_rows = 0;
    std::istringstream lines(table.to_csv());
    for (std::string line; std::getline(lines, line);) csv_rows += !line.empty();
    o.expect(table.rows.size() == rows && csv_rows == rows + 1, "sweep row count");
    counts << table.rows.size() << " ";
  }
  o.detail << " stopped after " << observed << " epochs (best " << s.best_epoch()
           << "); sweep rows " << counts.str();
}

void reproducibility(Outcome& o) {
  auto cfg = synthetic_config();
  cfg.max_epochs = 2;
  cfg.early_stop_patience = 2;
  const std::string dir = "/tmp/ctold_acceptance_";
  std::ofstream(dir + "run.cfg") << to_config_text(cfg);
  const int ra = run_cli("train --config " + dir + "run.cfg --out " + dir + "a.json");
  const int rb = run_cli("train --config " + dir + "run.cfg --out " + dir + "b.json");
  const auto a = slurp(dir + "a.json"), b = slurp(dir + "b.json");
  o.expect(ra == 0 && rb == 0, "CLI exit status");
  o.expect(!a.empty() && a == b, "result JSON differs");
  o.detail << " " << a.size() << " bytes, identical";
}

}  // namespace

int main() {
  const std::pair<const char*, void (*)(Outcome&)> criteria[] = {
      {"gradient-correctness", gradient_correctness},
      {"gat-oracle-equivalence", gat_oracle},
      {"attention-normalization", attention_normalization},
      {"focal-loss-closed-form", focal_closed_form},
      {"auc-rank-formula", auc_oracle},
      {"metric-suite", metric_suite},
      {"leakage-and-masking", leakage_and_masking},
      {"end-to-end-learning", end_to_end},
      {"protocol-fidelity", protocol_fidelity},
      {"reproducibility", reproducibility},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      check(o);
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail << " exception: " << e.what();
    }
    failures += o.ok ? 0 : 1;
    std::cout << (o.ok ? "PASS " : "FAIL ") << name << ":" << o.detail.str() << std::endl;
  }
  return failures == 0 ? 0 : 1;
}

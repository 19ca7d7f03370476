// Command-line front end: preprocessing, graph building, training,
// evaluation, ablations, sweeps and synthetic data generation.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ctold/ctold.hpp"

namespace {

using namespace ctold;

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

TrainConfig config_or_defaults(const std::string& path) {
  return path.empty() ? TrainConfig{} : load_config(path);
}

int run(int argc, char** argv) {
  CLI::App app{"Offensive language detection with community structure and text"};
  app.require_subcommand(1);

  // preprocess
  std::string pre_in, pre_emoji, pre_out;
  auto* pre = app.add_subcommand("preprocess", "normalize tweet texts");
  pre->add_option("--in", pre_in, "input tweets (JSONL)")->required();
  pre->add_option("--emoji", pre_emoji, "emoji table (TSV: emoji<TAB>phrase); builtin if omitted");
  pre->add_option("--out", pre_out, "output JSONL (stdout if omitted)");

  // build-graph
  std::string bg_tweets, bg_edges, bg_variant = "soft", bg_init = "nonoff", bg_out;
  double bg_fraction = 0.7;
  std::uint64_t bg_seed = 7;
  bool bg_no_mask = false;
  auto* bg = app.add_subcommand("build-graph", "build the social graph with node features");
  bg->add_option("--tweets", bg_tweets, "tweets (JSONL)")->required();
  bg->add_option("--edges", bg_edges, "follower<TAB>followee edges")->required();
  bg->add_option("--variant", bg_variant, "soft, hard or bow");
  bg->add_option("--init", bg_init, "all0, all1, avg or nonoff");
  bg->add_option("--train-fraction", bg_fraction, "share of tweets whose labels are visible");
  bg->add_option("--seed", bg_seed, "split seed");
  bg->add_flag("--no-mask", bg_no_mask, "use every tweet's label");
  bg->add_option("--out", bg_out, "output JSON (stdout if omitted)");

  // train
  std::string tr_config, tr_out, tr_ckpt;
  auto* tr = app.add_subcommand("train", "train one model");
  tr->add_option("--config", tr_config, "key = value config file");
  tr->add_option("--out", tr_out, "result JSON (stdout if omitted)");
  tr->add_option("--checkpoint", tr_ckpt, "also write the best-epoch checkpoint here");

  // eval
  std::string ev_ckpt, ev_tweets, ev_out;
  auto* ev = app.add_subcommand("eval", "score labelled tweets with a checkpoint");
  ev->add_option("--checkpoint", ev_ckpt, "checkpoint JSON")->required();
  ev->add_option("--tweets", ev_tweets, "tweets (JSONL)")->required();
  ev->add_option("--out", ev_out, "output JSON (stdout if omitted)");

  // ablate
  std::string ab_config, ab_variant = "all", ab_out;
  auto* ab = app.add_subcommand("ablate", "train with one module removed");
  ab->add_option("--config", ab_config, "key = value config file");
  ab->add_option("--variant", ab_variant,
                 "no_gat, no_encoder, no_gat_residual, single_head_gat, no_attention_layer, "
                 "full, or all for the table");
  ab->add_option("--out", ab_out, "JSON for one variant, CSV for all (stdout if omitted)");

  // sweep
  std::string sw_config, sw_axis, sw_out;
  auto* sw = app.add_subcommand("sweep", "train across a grid of settings");
  sw->add_option("--config", sw_config, "key = value config file");
  sw->add_option("--axis", sw_axis, "train_fraction, init_strategy or graph_variant")->required();
  sw->add_option("--out", sw_out, "output CSV (stdout if omitted)");

  // gen-synthetic
  SyntheticConfig gs;
  std::string gs_tweets_out = "synthetic_tweets.jsonl", gs_edges_out = "synthetic_edges.tsv";
  auto* gen = app.add_subcommand("gen-synthetic", "write a planted-signal corpus");
  gen->add_option("--tweets", gs.tweets, "number of tweets");
  gen->add_option("--users", gs.users, "number of users");
  gen->add_option("--seed", gs.seed, "generator seed");
  gen->add_option("--tweets-out", gs_tweets_out, "tweets JSONL path");
  gen->add_option("--edges-out", gs_edges_out, "edges TSV path");

  CLI11_PARSE(app, argc, argv);

  if (*pre) {
    const auto table = pre_emoji.empty() ? EmojiTable::builtin() : EmojiTable::from_tsv(pre_emoji);
    std::string out;
    for (const auto& t : read_tweets_jsonl(pre_in))
      out += tweet_to_json(preprocess(t, table)).dump() + "\n";
    write_text(pre_out, out);
  } else if (*bg) {
    const auto corpus = load_corpus(bg_tweets, bg_edges);
    const auto variant = parse_graph_variant(bg_variant);
    const auto init = parse_init_strategy(bg_init);
    Split split;
    if (bg_no_mask) {
      split.train.resize(corpus.tweets.size());
      std::iota(split.train.begin(), split.train.end(), 0);
    } else {
      split = split_corpus(corpus, bg_fraction, RunSeeds::from(bg_seed).split);
    }
    std::vector<std::string> texts;
    for (auto i : split.train) texts.push_back(corpus.tweets[i].text);
    const TrainConfig defaults;
    const auto vocab = build_vocab(texts, defaults.min_freq, defaults.max_vocab);
    auto graph = mask_test_information(build_graph(corpus), corpus, split, variant, init, &vocab);
    write_text(bg_out, graph_to_json(graph).dump() + "\n");
  } else if (*tr) {
    const auto cfg = config_or_defaults(tr_config);
    const auto trained = train_model(cfg, config_corpus(cfg));
    write_text(tr_out, trained.result.to_json().dump(2) + "\n");
    if (!tr_ckpt.empty()) save_checkpoint(tr_ckpt, checkpoint_to_json(trained));
  } else if (*ev) {
    const auto ckpt = load_checkpoint(ev_ckpt);
    write_text(ev_out, evaluate_checkpoint(ckpt, read_tweets_jsonl(ev_tweets)).to_json().dump(2) +
                           "\n");
  } else if (*ab) {
    const auto cfg = config_or_defaults(ab_config);
    const auto corpus = config_corpus(cfg);
    if (ab_variant == "all")
      write_text(ab_out, ablation_table(cfg, corpus).to_csv());
    else
      write_text(ab_out, ablate(cfg, parse_ablation(ab_variant), corpus).to_json().dump(2) + "\n");
  } else if (*sw) {
    const auto cfg = config_or_defaults(sw_config);
    write_text(sw_out, sweep(cfg, parse_sweep_axis(sw_axis), config_corpus(cfg)).to_csv());
  } else if (*gen) {
    const auto s = generate_synthetic(gs);
    write_tweets_jsonl(gs_tweets_out, s.tweets);
    write_edges_tsv(gs_edges_out, s.edges);
    std::cerr << "wrote " << s.tweets.size() << " tweets to " << gs_tweets_out << " and "
              << s.edges.size() << " edges to " << gs_edges_out << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

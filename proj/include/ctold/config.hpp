#pragma once

// Training configuration and its flat `key = value` file format.  Keys are
// exactly the field names below; `#` starts a comment.

#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ctold/graph.hpp"
#include "ctold/metrics.hpp"
#include "ctold/model.hpp"

namespace ctold {

struct TrainConfig {
  // protocol
  double train_fraction = 0.7;
  bool stratified = false;
  std::size_t batch_size = 64;
  std::size_t max_epochs = 20;
  std::size_t early_stop_patience = 5;
  double lr_gat = 1e-2;
  double lr_rest = 5e-5;
  double focal_alpha = 0.25;
  double focal_gamma = 2.0;
  std::string init_strategy = "nonoff";
  std::string graph_variant = "soft";
  std::string ablation = "full";
  std::uint64_t seed = 7;
  std::size_t replications = 10;
  double threshold = 0.5;

  // desk-scale model dimensions
  std::size_t gat_hidden = 64;
  std::size_t gat_heads = 8;
  std::size_t d_model = 64;
  std::size_t encoder_heads = 4;
  std::size_t encoder_layers = 2;
  std::size_t d_ff = 128;
  std::size_t fusion_heads = 4;
  std::size_t max_len = 64;
  std::size_t min_freq = 2;
  std::size_t max_vocab = 20000;
  double attention_dropout = 0.5;
  double hidden_dropout = 0.1;
  bool pre_norm = true;
  bool symmetric_neighborhood = false;
  std::string pooling = "mean";

  // data: files, or the synthetic generator when tweets_path is empty
  std::string tweets_path;
  std::string edges_path;
  std::size_t synthetic_tweets = 1000;
  std::size_t synthetic_users = 100;
  std::uint64_t synthetic_seed = 7;

  FocalParams focal() const { return {focal_alpha, focal_gamma}; }

  void validate() const {
    auto fail = [](const std::string& m) { throw std::invalid_argument("config: " + m); };
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) fail("train_fraction must be in (0,1)");
    if (batch_size == 0) fail("batch_size must be positive");
    if (max_epochs == 0) fail("max_epochs must be positive");
    if (early_stop_patience == 0) fail("early_stop_patience must be positive");
    if (early_stop_patience > max_epochs) fail("early_stop_patience must not exceed max_epochs");
    if (!(lr_gat > 0.0) || !(lr_rest > 0.0)) fail("learning rates must be positive");
    if (!(focal_alpha > 0.0 && focal_alpha < 1.0)) fail("focal_alpha must be in (0,1)");
    if (focal_gamma < 0.0) fail("focal_gamma must be non-negative");
    if (replications == 0) fail("replications must be positive");
    if (gat_heads == 0 || gat_hidden == 0 || gat_hidden % gat_heads != 0)
      fail("gat_hidden must be a positive multiple of gat_heads");
    if (d_model == 0 || encoder_heads == 0 || d_model % encoder_heads != 0)
      fail("d_model must be a positive multiple of encoder_heads");
    if (fusion_heads == 0 || d_model % fusion_heads != 0)
      fail("d_model must be a positive multiple of fusion_heads");
    if (d_ff == 0 || max_len == 0 || min_freq == 0) fail("d_ff, max_len, min_freq must be positive");
    if (!(attention_dropout >= 0.0 && attention_dropout < 1.0) ||
        !(hidden_dropout >= 0.0 && hidden_dropout < 1.0))
      fail("dropout rates must be in [0,1)");
    if (pooling != "mean" && pooling != "cls") fail("pooling must be mean or cls");
    if (synthetic_tweets == 0 || synthetic_users == 0) fail("synthetic sizes must be positive");
    parse_init_strategy(init_strategy);
    parse_graph_variant(graph_variant);
    parse_ablation(ablation);
  }

  ModelConfig model_config(std::size_t vocab_size, std::size_t feature_dim) const {
    ModelConfig m;
    m.variant = parse_ablation(ablation);
    m.gat.feature_dim = feature_dim;
    m.gat.heads = gat_heads;
    m.gat.head_dim = gat_hidden / gat_heads;
    m.gat.attention_dropout = attention_dropout;
    m.encoder.vocab_size = vocab_size;
    m.encoder.max_len = max_len;
    m.encoder.d_model = d_model;
    m.encoder.heads = encoder_heads;
    m.encoder.d_ff = d_ff;
    m.encoder.layers = encoder_layers;
    m.encoder.attention_dropout = attention_dropout;
    m.encoder.hidden_dropout = hidden_dropout;
    m.encoder.pre_norm = pre_norm;
    m.fusion.heads = fusion_heads;
    m.fusion.attention_dropout = attention_dropout;
    m.fusion.hidden_dropout = hidden_dropout;
    m.fusion.pooling = pooling == "cls" ? Pooling::cls : Pooling::mean;
    return m;
  }
};

namespace detail {

// Field table shared by the parser, the key=value writer and JSON export.
template <class Visitor>
void visit_fields(TrainConfig& c, Visitor&& v) {
  v("train_fraction", c.train_fraction);
  v("stratified", c.stratified);
  v("batch_size", c.batch_size);
  v("max_epochs", c.max_epochs);
  v("early_stop_patience", c.early_stop_patience);
  v("lr_gat", c.lr_gat);
  v("lr_rest", c.lr_rest);
  v("focal_alpha", c.focal_alpha);
  v("focal_gamma", c.focal_gamma);
  v("init_strategy", c.init_strategy);
  v("graph_variant", c.graph_variant);
  v("ablation", c.ablation);
  v("seed", c.seed);
  v("replications", c.replications);
  v("threshold", c.threshold);
  v("gat_hidden", c.gat_hidden);
  v("gat_heads", c.gat_heads);
  v("d_model", c.d_model);
  v("encoder_heads", c.encoder_heads);
  v("encoder_layers", c.encoder_layers);
  v("d_ff", c.d_ff);
  v("fusion_heads", c.fusion_heads);
  v("max_len", c.max_len);
  v("min_freq", c.min_freq);
  v("max_vocab", c.max_vocab);
  v("attention_dropout", c.attention_dropout);
  v("hidden_dropout", c.hidden_dropout);
  v("pre_norm", c.pre_norm);
  v("symmetric_neighborhood", c.symmetric_neighborhood);
  v("pooling", c.pooling);
  v("tweets_path", c.tweets_path);
  v("edges_path", c.edges_path);
  v("synthetic_tweets", c.synthetic_tweets);
  v("synthetic_users", c.synthetic_users);
  v("synthetic_seed", c.synthetic_seed);
}

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline void parse_value(const std::string& text, double& out) {
  std::size_t used = 0;
  out = std::stod(text, &used);
  if (used != text.size()) throw std::invalid_argument("not a number");
}

inline void parse_value(const std::string& text, std::size_t& out) {
  if (text.empty() || text[0] == '-') throw std::invalid_argument("not a non-negative integer");
  std::size_t used = 0;
  out = std::stoull(text, &used);
  if (used != text.size()) throw std::invalid_argument("not an integer");
}

inline void parse_value(const std::string& text, bool& out) {
  if (text == "true" || text == "1") out = true;
  else if (text == "false" || text == "0") out = false;
  else throw std::invalid_argument("not a boolean");
}

inline void parse_value(const std::string& text, std::string& out) { out = text; }

inline std::string format_value(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}
inline std::string format_value(std::size_t v) { return std::to_string(v); }
inline std::string format_value(bool v) { return v ? "true" : "false"; }
inline std::string format_value(const std::string& v) { return v; }

}  // namespace detail

/// Parses `key = value` lines on top of the defaults.  Unknown keys,
/// duplicate keys and malformed values are errors.
inline TrainConfig parse_config(const std::string& text, const std::string& source = "config") {
  TrainConfig cfg;
  std::map<std::string, std::string> seen;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const auto where = source + ":" + std::to_string(line_no) + ": ";
    if (eq == std::string::npos) throw std::invalid_argument(where + "expected key = value");
    const auto key = detail::trim(line.substr(0, eq));
    const auto value = detail::trim(line.substr(eq + 1));
    if (!seen.emplace(key, value).second)
      throw std::invalid_argument(where + "duplicate key '" + key + "'");
    bool known = false;
    detail::visit_fields(cfg, [&](const char* name, auto& field) {
      if (key != name) return;
      known = true;
      try {
        detail::parse_value(value, field);
      } catch (const std::exception&) {
        throw std::invalid_argument(where + "bad value '" + value + "' for " + key);
      }
    });
    if (!known) throw std::invalid_argument(where + "unknown key '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

inline TrainConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

inline std::string to_config_text(TrainConfig cfg) {
  std::string out;
  detail::visit_fields(cfg, [&](const char* name, const auto& field) {
    out += std::string(name) + " = " + detail::format_value(field) + "\n";
  });
  return out;
}

inline nlohmann::json config_to_json(TrainConfig cfg) {
  nlohmann::json j = nlohmann::json::object();
  detail::visit_fields(cfg, [&](const char* name, const auto& field) { j[name] = field; });
  return j;
}

inline TrainConfig config_from_json(const nlohmann::json& j) {
  TrainConfig cfg;
  detail::visit_fields(cfg, [&](const char* name, auto& field) {
    if (j.contains(name)) j.at(name).get_to(field);
  });
  cfg.validate();
  return cfg;
}

}  // namespace ctold

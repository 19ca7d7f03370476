#include <gtest/gtest.h>

#include <set>

#include "oracles.hpp"

using namespace ctold;

namespace {

std::vector<double> values(const Tensor& t) { return {t.data().begin(), t.data().end()}; }

FusionConfig small_fusion(std::size_t d = 4, std::size_t heads = 1) {
  return {.d_model = d, .heads = heads, .gat_head_dim = 3};
}

ModelConfig small_model(AblationVariant variant = AblationVariant::full) {
  ModelConfig m;
  m.variant = variant;
  m.gat = {.feature_dim = 2, .heads = 2, .head_dim = 2};
  m.encoder = {.vocab_size = 9, .max_len = 6, .d_model = 4, .heads = 2, .d_ff = 4, .layers = 1};
  m.fusion.heads = 2;
  return m;
}

struct MicroGraph {
  SocialGraph graph = SocialGraph::build({"a", "b", "c"}, {{0, 1}, {1, 2}, {2, 0}});
  Tensor features = Tensor::matrix(3, 2, {4.0, 1.0, 2.0, 0.0, 1.0, 1e-6});
  Neighborhoods nb = graph.neighborhoods();
};

void copy_into(const Tensor& from, Tensor& to) {
  auto dst = to.mutable_data();
  std::copy(from.data().begin(), from.data().end(), dst.begin());
}

}  // namespace

TEST(PositionEncoding, SinusoidValues) {
  const auto p0 = sinusoidal_encoding(0, 8);
  for (std::size_t j = 0; j < 8; ++j) EXPECT_EQ(p0[j], j % 2 == 0 ? 0.0 : 1.0);
  const auto p3 = sinusoidal_encoding(3, 64);
  EXPECT_NEAR(p3[0], 0.14112, 1e-5);
  EXPECT_EQ(p3[0], std::sin(3.0));
  EXPECT_EQ(p3[1], std::cos(3.0));
  EXPECT_NEAR(p3[2], std::sin(3.0 / std::pow(10000.0, 2.0 / 64.0)), 1e-15);
}

TEST(PositionEncoding, UserRowsShareTokenCountPosition) {
  const auto seq = add_position_encoding(assemble(Tensor::zeros({3, 6}), Tensor::zeros({4, 6})));
  ASSERT_EQ(seq.length(), 7u);
  for (std::size_t t = 0; t < 3; ++t) {
    const auto pe = sinusoidal_encoding(t, 6);
    for (std::size_t c = 0; c < 6; ++c) EXPECT_EQ(seq.rows.at(t, c), pe[c]);
  }
  const auto user_pe = sinusoidal_encoding(3, 6);
  for (std::size_t u = 3; u < 7; ++u)
    for (std::size_t c = 0; c < 6; ++c) EXPECT_EQ(seq.rows.at(u, c), user_pe[c]);
}

TEST(Assemble, LengthAndOrder) {
  std::mt19937_64 g(1);
  const Tensor tokens = oracle::random_tensor({5, 4}, g, false);
  const Tensor users = oracle::random_tensor({9, 4}, g, false);  // 8 heads + residual
  const auto seq = assemble(tokens, users);
  EXPECT_EQ(seq.length(), 14u);
  EXPECT_EQ(seq.token_rows, 5u);
  for (std::size_t c = 0; c < 4; ++c) {
    EXPECT_EQ(seq.rows.at(0, c), tokens.at(0, c));
    EXPECT_EQ(seq.rows.at(5, c), users.at(0, c));
    EXPECT_EQ(seq.rows.at(13, c), users.at(8, c));
  }
  EXPECT_EQ(assemble(tokens, Tensor{}).length(), 5u);
  EXPECT_THROW(assemble(Tensor{}, Tensor{}), ContractViolation);
  EXPECT_THROW(assemble(tokens, Tensor::zeros({2, 3})), ContractViolation);
}

TEST(FuseAttention, ThreeRowDenseOracle) {
  const auto cfg = small_fusion();
  Rng rng(2);
  auto p = FusionParams::xavier(cfg, rng);
  std::mt19937_64 g(3);
  p.norm_in = {oracle::random_tensor({4}, g, true, 0.5, 1.5), oracle::random_tensor({4}, g)};
  p.norm_out = {oracle::random_tensor({4}, g, true, 0.5, 1.5), oracle::random_tensor({4}, g)};
  const Tensor x = oracle::random_tensor({3, 4}, g, false);
  const Tensor y = fuse_attention(x, p, cfg, false, rng);
  using namespace oracle;
  const Mat xm = from_tensor(x);
  const Mat attended = dense_mha(layer_norm(xm, values(p.norm_in.gain), values(p.norm_in.bias)),
                                 from_tensor(p.attention.wq), from_tensor(p.attention.wk),
                                 from_tensor(p.attention.wv), from_tensor(p.attention.wo), 1);
  const Mat expect =
      layer_norm(plus(xm, attended), values(p.norm_out.gain), values(p.norm_out.bias));
  EXPECT_LT(max_abs_diff(expect, y), 1e-10);
}

TEST(FuseAttention, SingleRowAttendsToItself) {
  const auto cfg = small_fusion(4, 2);
  Rng rng(4);
  const auto p = FusionParams::xavier(cfg, rng);
  std::mt19937_64 g(5);
  const Tensor x = oracle::random_tensor({1, 4}, g, false);
  AttentionTrace trace;
  const Tensor y = fuse_attention(x, p, cfg, false, rng, &trace);
  for (const auto& probs : trace.probabilities) EXPECT_EQ(probs[0], 1.0);
  using namespace oracle;
  const Mat v = mul(mul(layer_norm(from_tensor(x), values(p.norm_in.gain), values(p.norm_in.bias)),
                        from_tensor(p.attention.wv)),
                    from_tensor(p.attention.wo));
  const Mat expect =
      layer_norm(plus(from_tensor(x), v), values(p.norm_out.gain), values(p.norm_out.bias));
  EXPECT_LT(max_abs_diff(expect, y), 1e-12);
}

TEST(FuseAttention, ProbabilityRowsSumToOne) {
  const auto cfg = small_fusion(8, 4);
  Rng rng(6);
  const auto p = FusionParams::xavier(cfg, rng);
  std::mt19937_64 g(7);
  AttentionTrace trace;
  fuse_attention(oracle::random_tensor({11, 8}, g, false), p, cfg, false, rng, &trace);
  ASSERT_EQ(trace.probabilities.size(), 4u);
  for (const auto& probs : trace.probabilities)
    for (std::size_t r = 0; r < probs.rows(); ++r) {
      double s = 0.0;
      for (std::size_t c = 0; c < probs.cols(); ++c) s += probs.at(r, c);
      EXPECT_NEAR(s, 1.0, 1e-9);
    }
}

TEST(Classify, ZeroLogitIsHalf) {
  const auto cfg = small_fusion();
  Rng rng(8);
  auto p = FusionParams::xavier(cfg, rng);
  p.classifier.weight = Tensor::zeros({4, 1}, true);
  p.classifier.bias = Tensor::zeros({1}, true);
  std::mt19937_64 g(9);
  EXPECT_EQ(classify(oracle::random_tensor({3, 4}, g, false), p, cfg, false, rng, 3).item(), 0.5);
}

TEST(Classify, DeadReluGivesBiasBroadcast) {
  const auto cfg = small_fusion();
  Rng rng(10);
  auto p = FusionParams::xavier(cfg, rng);
  p.ffn.bias = Tensor::vector({0.3, -0.2, 0.5, 0.1});
  const Tensor x = Tensor::matrix(2, 4, {-1, -2, -3, -4, -0.5, -0.1, -7, -2});
  double logit = p.classifier.bias[0];
  for (std::size_t c = 0; c < 4; ++c) logit += p.ffn.bias[c] * p.classifier.weight[c];
  EXPECT_NEAR(classify_logit(x, p, cfg, false, rng, 2).item(), logit, 1e-15);
}

TEST(Classify, ClsPoolingUsesFirstRow) {
  auto cfg = small_fusion();
  Rng rng(11);
  const auto p = FusionParams::xavier(cfg, rng);
  std::mt19937_64 g(12);
  const Tensor x = oracle::random_tensor({3, 4}, g, false);
  const double mean_logit = classify_logit(x, p, cfg, false, rng, 3).item();
  cfg.pooling = Pooling::cls;
  const double cls_logit = classify_logit(x, p, cfg, false, rng, 3).item();
  EXPECT_EQ(cls_logit, classify_logit(slice_rows(x, 0, 1), p, cfg, false, rng, 1).item());
  EXPECT_NE(cls_logit, mean_logit);
}

TEST(FusionProbability, TokenOrderMattersUserRowOrderDoesNot) {
  const auto cfg = small_fusion(4, 2);
  Rng rng(13);
  const auto p = FusionParams::xavier(cfg, rng);
  std::mt19937_64 g(14);
  const Tensor tokens = oracle::random_tensor({3, 4}, g, false);
  const Tensor users = oracle::random_tensor({3, 4}, g, false);
  const std::size_t swap_tokens[] = {1, 0, 2}, swap_users[] = {2, 0, 1};
  const double base = fusion_probability(tokens, users, p, cfg, false, rng).item();
  const double tok = fusion_probability(gather_rows(tokens, swap_tokens), users, p, cfg, false, rng)
                         .item();
  const double usr = fusion_probability(tokens, gather_rows(users, swap_users), p, cfg, false, rng)
                         .item();
  EXPECT_GT(std::abs(base - tok), 1e-9);
  EXPECT_NEAR(base, usr, 1e-14);
}

TEST(FusionProbability, WithoutAttentionLayer) {
  auto cfg = small_fusion();
  cfg.use_attention = false;
  Rng rng(15);
  const auto p = FusionParams::xavier(cfg, rng);
  EXPECT_FALSE(p.attention.wq.defined());
  std::mt19937_64 g(16);
  const Tensor tokens = oracle::random_tensor({4, 4}, g, false);
  const Tensor users = oracle::random_tensor({2, 4}, g, false);
  using namespace oracle;
  Mat rows(3, 4);
  for (std::size_t c = 0; c < 4; ++c) {
    for (std::size_t t = 0; t < 4; ++t) rows(0, c) += tokens.at(t, c) / 4.0;
    rows(1, c) = users.at(0, c);
    rows(2, c) = users.at(1, c);
  }
  const Mat hidden = add_bias(mul(relu(rows), from_tensor(p.ffn.weight)), values(p.ffn.bias));
  double logit = p.classifier.bias[0];
  for (std::size_t c = 0; c < 4; ++c)
    logit += (hidden(0, c) + hidden(1, c) + hidden(2, c)) / 3.0 * p.classifier.weight[c];
  EXPECT_NEAR(fusion_probability(tokens, users, p, cfg, false, rng).item(),
              1.0 / (1.0 + std::exp(-logit)), 1e-14);
}

TEST(Model, BatchShapesAndRange) {
  MicroGraph mg;
  const CtOldModel model(small_model(), 1);
  const std::vector<TokenSequence> seqs{{{2, 3, 4}, 0, 1, "t0"}, {{2, 5}, 1, 0, "t1"},
                                        {{2, 6, 7, 8}, 2, 0, "t2"}, {{2}, 0, 0, "t3"}};
  std::vector<const TokenSequence*> batch;
  for (const auto& s : seqs) batch.push_back(&s);
  Rng rng(2);
  const Tensor probs = model.forward(batch, mg.features, mg.nb, false, rng);
  ASSERT_EQ(probs.shape(), (Shape{4}));
  for (double v : probs.data()) {
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
  const Tensor train_probs = model.forward(batch, mg.features, mg.nb, true, rng);
  for (double v : train_probs.data()) EXPECT_TRUE(std::isfinite(v));
}

TEST(Model, AuthorRowsSelectedByIndex) {
  MicroGraph mg;
  const CtOldModel model(small_model(), 3);
  Rng rng(4);
  const auto ctx = model.graph_context(mg.features, mg.nb, false, rng);
  const Tensor a1 = model.user_rows(ctx, 1), a2 = model.user_rows(ctx, 1);
  EXPECT_EQ(a1.shape(), (Shape{3, 4}));  // 2 heads + residual
  EXPECT_EQ(values(a1), values(a2));
  EXPECT_NE(values(a1), values(model.user_rows(ctx, 2)));
  for (std::size_t k = 0; k < 2; ++k)
    for (std::size_t c = 0; c < 4; ++c) EXPECT_EQ(a1.at(k, c), ctx.head_rows.at(k * 3 + 1, c));
  EXPECT_THROW(model.user_rows(ctx, 3), ContractViolation);
}

TEST(Model, NoEncoderDependsOnlyOnAuthor) {
  MicroGraph mg;
  const CtOldModel model(small_model(AblationVariant::no_encoder), 5);
  Rng rng(6);
  const auto ctx = model.graph_context(mg.features, mg.nb, false, rng);
  const TokenSequence a{{2, 3, 4}, 1, 0, "x"}, b{{2, 8}, 1, 1, "y"}, c{{2, 3, 4}, 0, 0, "z"};
  EXPECT_EQ(model.predict(a, &ctx, false, rng).item(), model.predict(b, &ctx, false, rng).item());
  EXPECT_NE(model.predict(a, &ctx, false, rng).item(), model.predict(c, &ctx, false, rng).item());
}

TEST(Model, NoGatEqualsFullWithUserRowsRemoved) {
  const CtOldModel full(small_model(), 7);
  const CtOldModel no_gat(small_model(AblationVariant::no_gat), 8);
  // Copy every shared parameter (encoder and fusion, minus the adapters).
  std::map<std::string, Tensor> by_name;
  for (const auto& np : full.parameters()) by_name.emplace(np.name, np.tensor);
  for (auto np : no_gat.parameters()) {
    ASSERT_TRUE(by_name.count(np.name)) << np.name;
    copy_into(by_name.at(np.name), np.tensor);
  }
  const TokenSequence seq{{2, 3, 7, 4}, 0, 0, "t"};
  Rng rng(9);
  const double expect = fusion_probability(full.token_embeddings(seq, false, rng), Tensor{},
                                           full.fusion_params(), full.config().fusion, false, rng)
                            .item();
  EXPECT_EQ(no_gat.predict(seq, nullptr, false, rng).item(), expect);
}

TEST(Model, ParameterNamesAndCounts) {
  const CtOldModel full(small_model(), 1), no_gat(small_model(AblationVariant::no_gat), 1);
  EXPECT_LT(no_gat.parameter_count(), full.parameter_count());
  std::set<std::string> names;
  for (const auto& np : full.parameters()) EXPECT_TRUE(names.insert(np.name).second) << np.name;
  EXPECT_TRUE(names.count("gat.residual.W"));
  EXPECT_TRUE(names.count("fusion.head_adapter"));
  for (const auto& np : no_gat.parameters()) EXPECT_FALSE(CtOldModel::in_gat_group(np.name));
}

TEST(Model, FullGradientCheckOnMicroBatch) {
  MicroGraph mg;
  const CtOldModel model(small_model(), 11);
  const std::vector<TokenSequence> seqs{{{2, 3, 4}, 0, 1, "t0"}, {{2, 5, 6}, 2, 0, "t1"}};
  const std::vector<const TokenSequence*> batch{&seqs[0], &seqs[1]};
  const std::vector<int> labels{1, 0};
  std::vector<Tensor> params;
  for (const auto& np : model.parameters()) params.push_back(np.tensor);
  auto loss = [&] {
    Rng r(0);
    return focal_loss(model.forward(batch, mg.features, mg.nb, false, r), labels);
  };
  EXPECT_LT(oracle::grad_check(loss, params), 1e-3);
}

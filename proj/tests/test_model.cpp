#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "enatt/gradcheck.hpp"
#include "enatt/head.hpp"
#include "enatt/model.hpp"

using namespace enatt;

namespace {

double sigma(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double selu_ref(double x) {
  return x > 0.0 ? kSeluLambda * x
                 : kSeluLambda * kSeluAlpha * (std::exp(x) - 1.0);
}

ModelConfig tiny_config(int variant) {
  ModelConfig cfg;
  cfg.vocab_size = 10;
  cfg.n_domains = 5;
  cfg.d_emb = 4;
  cfg.d_hidden = 4;
  cfg.d_ff = 6;
  cfg.dropout_rate = 0.2;
  cfg.flags = variant_flags(variant);
  return cfg;
}

ModelParams make_model(const ModelConfig& cfg, uint64_t seed) {
  ModelParams m;
  Rng rng(seed);
  m.init(cfg, rng);
  return m;
}

}  // namespace

TEST_CASE("variant table matches the ablation grid") {
  CHECK(variant_flags(1).attention == AttnMode::Softmax);
  CHECK_FALSE(variant_flags(1).supervised);
  CHECK(variant_flags(2).attention == AttnMode::Sigmoid);
  CHECK_FALSE(variant_flags(2).supervised);
  CHECK(variant_flags(3).supervised);
  CHECK_FALSE(variant_flags(3).distilled);
  CHECK(variant_flags(4).supervised);
  CHECK(variant_flags(4).distilled);
  CHECK_FALSE(variant_flags(4).enablement_bias);
  CHECK(variant_flags(5).attention == AttnMode::Softmax);
  CHECK(variant_flags(5).enablement_bias);
  CHECK(variant_flags(6).distilled);
  CHECK(variant_flags(6).enablement_bias);
  CHECK_THROWS_AS(variant_flags(0), std::invalid_argument);
  CHECK_THROWS_AS(variant_flags(7), std::invalid_argument);
  for (int k = 1; k <= kNumVariants; ++k)
    for (int j = 1; j < k; ++j) CHECK(variant_label(k) != variant_label(j));
}

TEST_CASE("zero enablement bias is a no-op") {
  HeadParams p;
  Rng rng(3);
  p.init(4, 6, 3, rng);
  const std::vector<int> enabled = {0, 2};
  Graph g1, g2;
  auto mk = [&](Graph& g, bool bias) {
    NodeRef u = g.constant(Array::vec({0.1, -0.2}));
    NodeRef c = g.constant(Array::vec({0.3, 0.4}));
    auto out = predict(g, u, c, enabled, p, bias);
    auto v = g.value(out.confidences);
    return std::vector<double>(v.begin(), v.end());
  };
  CHECK(mk(g1, false) == mk(g2, true));  // b_enb initializes to zero
}

TEST_CASE("positive enablement bias lifts exactly the enabled domains") {
  HeadParams p;
  Rng rng(5);
  p.init(4, 6, 4, rng);
  const std::vector<int> enabled = {1, 3};
  auto run = [&](bool bias) {
    Graph g;
    NodeRef u = g.constant(Array::vec({0.1, -0.2}));
    NodeRef c = g.constant(Array::vec({0.3, 0.4}));
    auto out = predict(g, u, c, enabled, p, bias);
    auto l = g.value(out.logits);
    auto o = g.value(out.confidences);
    return std::make_pair(std::vector<double>(l.begin(), l.end()),
                          std::vector<double>(o.begin(), o.end()));
  };
  auto [l0, o0] = run(false);
  p.b_enb.value.set(0, 0.75);
  auto [l1, o1] = run(true);
  for (int i = 0; i < 4; ++i) {
    const bool is_enabled = i == 1 || i == 3;
    if (is_enabled) {
      CHECK(l1[static_cast<size_t>(i)] ==
            doctest::Approx(l0[static_cast<size_t>(i)] + 0.75).epsilon(1e-15));
      CHECK(o1[static_cast<size_t>(i)] > o0[static_cast<size_t>(i)]);
    } else {
      CHECK(l1[static_cast<size_t>(i)] == l0[static_cast<size_t>(i)]);
      CHECK(o1[static_cast<size_t>(i)] == o0[static_cast<size_t>(i)]);
    }
  }
}

TEST_CASE("two-domain head matches a hand evaluation") {
  HeadParams p;
  Rng rng(1);
  p.init(2, 2, 2, rng);
  p.W1.value = Array::mat(2, 2, {0.5, -0.25, 1.0, 0.75});
  p.b1.value = Array::vec({0.1, -0.2});
  p.W2.value = Array::mat(2, 2, {0.3, 0.6, -0.4, 0.2});
  p.b2.value = Array::vec({0.05, -0.15});

  const double u0 = 0.3, c0 = 0.5;
  Graph g;
  auto out = predict(g, g.constant(Array::vec({u0})),
                     g.constant(Array::vec({c0})), std::vector<int>{}, p, false);
  // hand evaluation of W2.selu(W1.[u;c] + b1) + b2
  const double h0 = selu_ref(0.5 * u0 + -0.25 * c0 + 0.1);
  const double h1 = selu_ref(1.0 * u0 + 0.75 * c0 + -0.2);
  const double l0 = 0.3 * h0 + 0.6 * h1 + 0.05;
  const double l1 = -0.4 * h0 + 0.2 * h1 - 0.15;
  auto o = g.value(out.confidences);
  CHECK(o[0] == doctest::Approx(sigma(l0)).epsilon(1e-12));
  CHECK(o[1] == doctest::Approx(sigma(l1)).epsilon(1e-12));
}

TEST_CASE("confidences are independent scores, not a distribution") {
  Graph g;
  NodeRef logits = g.constant(Array::vec({2.0, 2.0, 2.0}));
  NodeRef conf = g.sigmoid(logits);
  double sum = 0.0;
  for (double v : g.value(conf)) sum += v;
  CHECK(sum > 1.0);
}

TEST_CASE("main loss oracle cases") {
  {
    Graph g;  // n = 1, o = 0.5, y = 1 -> ln 2
    NodeRef conf = g.sigmoid(g.constant(Array::vec({0.0})));
    CHECK(g.scalar(main_loss(g, conf, 0)) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-12));
  }
  {
    Graph g;  // n = 2, o = (0.9, 0.1), y = (1, 0) -> -2 ln 0.9
    const double s9 = std::log(9.0);
    NodeRef conf = g.sigmoid(g.constant(Array::vec({s9, -s9})));
    CHECK(g.scalar(main_loss(g, conf, 0)) ==
          doctest::Approx(-2.0 * std::log(0.9)).epsilon(1e-9));
    CHECK(g.scalar(main_loss(g, conf, 0)) == doctest::Approx(0.210721).epsilon(1e-5));
  }
  {
    Graph g;  // near-perfect prediction: loss under the clamped floor
    NodeRef conf = g.sigmoid(g.constant(Array::vec({40.0, -40.0, -40.0})));
    CHECK(g.scalar(main_loss(g, conf, 0)) <= 3.0 * 1e-11);
  }
  {
    Graph g;
    NodeRef conf = g.sigmoid(g.constant(Array::vec({0.0, 0.0})));
    CHECK_THROWS_AS(main_loss(g, conf, 2), std::invalid_argument);
    CHECK_THROWS_AS(main_loss(g, conf, -1), std::invalid_argument);
  }
}

TEST_CASE("ranking is a permutation with lower-id tie-breaks") {
  const std::vector<double> conf = {0.5, 0.7, 0.5, 0.2};
  auto r = rank_domains(conf);
  CHECK(r == std::vector<int>{1, 0, 2, 3});
  auto p = make_prediction(conf);
  CHECK(p.ranking == r);
  CHECK(p.confidences == conf);

  std::vector<int> sorted = r;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("plain variants reduce the total to the main loss") {
  for (int variant : {1, 2}) {
    ModelConfig cfg = tiny_config(variant);
    ModelParams m = make_model(cfg, 42);
    Graph g;
    const std::vector<int> ids = {2, 7, 4};
    const std::vector<int> enabled = {1, 3};
    auto r = total_loss(g, m, cfg, ids, 1, enabled, 3, 0.01, 16.0, nullptr,
                        nullptr);
    CHECK_FALSE(r.aux_built);
    CHECK(r.loss_a == kNoNode);
    CHECK(r.loss_d == kNoNode);
    CHECK(r.total == r.loss_m);
  }
}

TEST_CASE("supervised variant adds the scheduled supervision term") {
  ModelConfig cfg = tiny_config(3);
  ModelParams m = make_model(cfg, 42);
  const std::vector<int> ids = {2, 7, 4};
  const std::vector<int> enabled = {1, 3};
  for (int t : {0, 1, 5, 24}) {
    Graph g;
    auto r = total_loss(g, m, cfg, ids, 1, enabled, t, 0.01, 16.0, nullptr,
                        nullptr);
    CHECK(r.aux_built);
    CHECK(r.loss_d == kNoNode);
    const double lm = g.scalar(r.loss_m);
    const double la = g.scalar(r.loss_a);
    const double expect = lm + 0.01 * (1.0 - beta_schedule(t)) * la;
    CHECK(g.scalar(r.total) == doctest::Approx(expect).epsilon(1e-14));
  }
}

TEST_CASE("distilled and supervised variants coincide at epoch zero") {
  ModelConfig cfg3 = tiny_config(3);
  ModelConfig cfg4 = tiny_config(4);
  ModelParams m3 = make_model(cfg3, 99);
  ModelParams m4 = make_model(cfg4, 99);
  const std::vector<int> ids = {1, 8, 3, 5};
  const std::vector<int> enabled = {0, 2, 4};
  Graph g3, g4;
  auto r3 = total_loss(g3, m3, cfg3, ids, 2, enabled, 0, 0.01, 16.0, nullptr,
                       nullptr);
  auto r4 = total_loss(g4, m4, cfg4, ids, 2, enabled, 0, 0.01, 16.0, nullptr,
                       nullptr);
  CHECK(g4.scalar(r4.total) == doctest::Approx(g3.scalar(r3.total)).epsilon(1e-12));
  CHECK(r4.loss_d == kNoNode);  // schedule keeps the snapshot out at t = 0
}

TEST_CASE("distillation past epoch zero requires a snapshot") {
  ModelConfig cfg = tiny_config(4);
  ModelParams m = make_model(cfg, 7);
  const std::vector<int> ids = {1, 2};
  const std::vector<int> enabled = {0, 1};
  Graph g;
  CHECK_THROWS_AS(
      total_loss(g, m, cfg, ids, 0, enabled, 1, 0.01, 16.0, nullptr, nullptr),
      std::runtime_error);

  DistillSnapshot snap;
  snap.capture(m, 0);
  Graph g2;
  auto r = total_loss(g2, m, cfg, ids, 0, enabled, 1, 0.01, 16.0, &snap, nullptr);
  CHECK(r.aux_built);
  CHECK(r.loss_d != kNoNode);
  CHECK(g2.scalar(r.loss_d) > 0.0);
  const double lm = g2.scalar(r.loss_m);
  const double la = g2.scalar(r.loss_a);
  const double ld = g2.scalar(r.loss_d);
  const double beta = beta_schedule(1);
  const double expect = lm + 0.01 * ((1.0 - beta) * la + beta * ld);
  CHECK(g2.scalar(r.total) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("snapshot values stay frozen through student updates") {
  ModelConfig cfg = tiny_config(4);
  ModelParams m = make_model(cfg, 13);
  DistillSnapshot snap;
  snap.capture(m, 2);
  CHECK(snap.source_epoch == 2);
  const std::uint64_t before = snap.checksum();

  const std::vector<int> ids = {3, 6};
  Array u1 = snap.utterance_vector(ids);
  // student moves; snapshot must not
  for (auto& v : m.table.value.values()) v += 0.25;
  for (auto& v : m.encoder.embedding.value.values()) v -= 0.125;
  Graph g;
  auto r = total_loss(g, m, cfg, ids, 0, std::vector<int>{0, 1}, 1, 0.01, 16.0,
                      &snap, nullptr);
  g.backward(r.total);
  CHECK(snap.checksum() == before);
  Array u2 = snap.utterance_vector(ids);
  for (int i = 0; i < u1.size(); ++i) CHECK(u1[i] == u2[i]);

  DistillSnapshot fresh;
  CHECK(fresh.empty());
  CHECK_THROWS_AS(fresh.utterance_vector(ids), std::runtime_error);
}

TEST_CASE("model parameters enumerate in a fixed, complete order") {
  ModelConfig cfg = tiny_config(6);
  ModelParams m = make_model(cfg, 21);
  auto ps = m.all_params();
  // embedding + 2 x 11 gate blocks + table + 5 head params
  CHECK(ps.size() == 1 + 22 + 1 + 5);
  CHECK(ps.front() == &m.encoder.embedding);
  CHECK(ps[23] == &m.table);
  CHECK(ps.back() == &m.head.b_enb);

  const std::uint64_t h1 = params_checksum(ps);
  CHECK(params_checksum(ps) == h1);
  m.head.b2.value.set(0, m.head.b2.value[0] + 1e-9);
  CHECK(params_checksum(ps) != h1);
}

TEST_CASE("full model gradient check with dropout and distillation") {
  ModelConfig cfg = tiny_config(4);
  ModelParams m = make_model(cfg, 31);
  DistillSnapshot snap;
  snap.capture(m, 0);
  // separate the snapshot from the live weights
  Rng drift(77);
  for (auto& v : m.table.value.values()) v += drift.uniform(-0.05, 0.05);

  Rng mask_rng(5);
  DropoutMasks masks = DropoutMasks::sample(cfg.d_emb, cfg.d_hidden, 0.2, mask_rng);
  const std::vector<int> ids = {2, 9, 4};
  const std::vector<int> enabled = {1, 3};
  auto params = m.all_params();
  params.pop_back();  // b_enb is outside this variant's graph
  auto report = grad_check(params, [&](Graph& g) {
    auto r = total_loss(g, m, cfg, ids, 1, enabled, 1, 0.01, 16.0, &snap, &masks);
    return r.total;
  });
  INFO(report.to_string());
  CHECK(report.pass);
}

TEST_CASE("biased variant gradient check including the bias scalar") {
  ModelConfig cfg = tiny_config(6);
  ModelParams m = make_model(cfg, 37);
  DistillSnapshot snap;
  snap.capture(m, 0);
  m.head.b_enb.value.set(0, 0.3);
  const std::vector<int> ids = {1, 6, 8};
  const std::vector<int> enabled = {0, 2, 4};
  auto params = m.all_params();
  auto report = grad_check(params, [&](Graph& g) {
    auto r = total_loss(g, m, cfg, ids, 2, enabled, 2, 0.01, 16.0, &snap, nullptr);
    return r.total;
  });
  INFO(report.to_string());
  CHECK(report.pass);
}

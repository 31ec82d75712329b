// Training loop, enablement randomization, checkpoint persistence, and the
// distillation snapshot protocol.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "enatt/checkpoint.hpp"
#include "enatt/datagen.hpp"
#include "enatt/trainer.hpp"

using namespace enatt;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(static_cast<bool>(in));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TinySetup {
  DomainCatalog catalog;
  Corpus corpus;
  Vocabulary vocab;
};

// 10 domains, 200 train / 50 dev examples. Small enabled sets keep the
// attention stage cheap.
TinySetup tiny_setup(std::uint64_t seed = 7) {
  TinySetup s;
  s.catalog = build_catalog(10, seed);
  RegimeSpec regime;
  regime.inclusion_ratio = 0.9;
  regime.mean_enabled = 4.0;
  regime.train_size = 200;
  regime.dev_size = 50;
  regime.test_size = 0;
  regime.seed = seed;
  s.corpus = generate_corpus(s.catalog, regime);
  s.vocab = corpus_vocabulary(s.corpus.train);
  return s;
}

// Small dimensions so loop-behavior tests stay fast.
TrainConfig tiny_config(int variant, int epochs, std::uint64_t seed = 11) {
  TrainConfig cfg;
  cfg.variant = variant;
  cfg.epochs = epochs;
  cfg.seed = seed;
  cfg.batch_size = 32;
  cfg.lr = 0.005;
  cfg.d_emb = 12;
  cfg.d_hidden = 12;
  cfg.d_ff = 24;
  cfg.dropout_rate = 0.1;
  return cfg;
}

}  // namespace

TEST_CASE("train config serializes and parses field for field") {
  TrainConfig cfg;
  cfg.epochs = 7;
  cfg.batch_size = 17;
  cfg.lr = 0.0033;
  cfg.clip_threshold = 2.5;
  cfg.clip_mode = ClipMode::Value;
  cfg.alpha = 0.125;
  cfg.temperature = 8.0;
  cfg.randomization_prob = 0.25;
  cfg.dropout_rate = 0.05;
  cfg.seed = 987654321;
  cfg.variant = 6;
  cfg.d_emb = 9;
  cfg.d_hidden = 13;
  cfg.d_ff = 21;
  cfg.dtype = Dtype::F32;
  cfg.embeddings_path = "some/vectors.txt";
  cfg.freeze_embeddings = true;

  const TrainConfig back = parse_train_config(cfg.to_string());
  CHECK(back.epochs == cfg.epochs);
  CHECK(back.batch_size == cfg.batch_size);
  CHECK(back.lr == cfg.lr);
  CHECK(back.clip_threshold == cfg.clip_threshold);
  CHECK(back.clip_mode == cfg.clip_mode);
  CHECK(back.alpha == cfg.alpha);
  CHECK(back.temperature == cfg.temperature);
  CHECK(back.randomization_prob == cfg.randomization_prob);
  CHECK(back.dropout_rate == cfg.dropout_rate);
  CHECK(back.seed == cfg.seed);
  CHECK(back.variant == cfg.variant);
  CHECK(back.d_emb == cfg.d_emb);
  CHECK(back.d_hidden == cfg.d_hidden);
  CHECK(back.d_ff == cfg.d_ff);
  CHECK(back.dtype == cfg.dtype);
  CHECK(back.embeddings_path == cfg.embeddings_path);
  CHECK(back.freeze_embeddings == cfg.freeze_embeddings);
}

TEST_CASE("train config parsing tolerates comments and rejects junk") {
  const TrainConfig cfg = parse_train_config(
      "# a comment\n"
      "\n"
      "epochs = 3\n"
      "  lr=0.5  \n");
  CHECK(cfg.epochs == 3);
  CHECK(cfg.lr == 0.5);
  CHECK(cfg.batch_size == 128);  // untouched fields keep their defaults

  CHECK_THROWS_WITH_AS(parse_train_config("no_such_knob = 4\n"),
                       doctest::Contains("no_such_knob"),
                       std::invalid_argument);
  CHECK_THROWS_AS(parse_train_config("epochs 3\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_train_config("lr = abc\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_train_config("epochs = 3x\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_train_config("dtype = f16\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_train_config("clip_mode = soft\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_train_config("freeze_embeddings = yes\n"),
                  std::invalid_argument);
}

TEST_CASE("train config loads from a file") {
  const std::string path = "tmp_train_config.txt";
  {
    std::ofstream out(path);
    out << "epochs = 2\nvariant = 4\n";
  }
  const TrainConfig cfg = load_train_config(path);
  CHECK(cfg.epochs == 2);
  CHECK(cfg.variant == 4);
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_train_config("no_such_config_file.txt"),
                  std::runtime_error);
}

TEST_CASE("enablement randomization: probability 0 keeps the original set") {
  Rng rng(5);
  const std::vector<int> enabled{1, 4, 7};
  RandomizationCounters rc;
  for (int i = 0; i < 200; ++i)
    CHECK(randomize_enablement(enabled, 10, 0.0, rng, &rc) == enabled);
  CHECK(rc.considered == 200);
  CHECK(rc.replaced == 0);
}

TEST_CASE("enablement randomization: probability 1 resamples same-size "
          "distinct sets") {
  Rng rng(6);
  const std::vector<int> enabled{1, 4, 7};
  RandomizationCounters rc;
  bool saw_different = false;
  for (int i = 0; i < 400; ++i) {
    const auto out = randomize_enablement(enabled, 10, 1.0, rng, &rc);
    REQUIRE(out.size() == enabled.size());
    CHECK(std::is_sorted(out.begin(), out.end()));
    const std::set<int> uniq(out.begin(), out.end());
    CHECK(uniq.size() == out.size());
    for (int e : out) {
      CHECK(e >= 0);
      CHECK(e < 10);
    }
    if (out != enabled) saw_different = true;
  }
  CHECK(rc.replaced == 400);
  CHECK(saw_different);

  // Full-catalog set: the only distinct replacement is the set itself.
  const std::vector<int> all{0, 1, 2, 3};
  CHECK(randomize_enablement(all, 4, 1.0, rng, nullptr) == all);
  // Empty set: replacement is empty too.
  CHECK(randomize_enablement({}, 4, 1.0, rng, nullptr).empty());
}

TEST_CASE("enablement randomization: replacement ids are uniform") {
  // With probability 1 and k = 1 over 5 domains, each id should appear about
  // n/5 times.
  Rng rng(17);
  std::vector<int> counts(5, 0);
  const std::vector<int> enabled{2};
  const int n = 20000;
  for (int i = 0; i < n; ++i)
    ++counts[static_cast<size_t>(
        randomize_enablement(enabled, 5, 1.0, rng, nullptr)[0])];
  for (int c : counts) CHECK(std::abs(c - n / 5) < 350);
}

TEST_CASE("enablement randomization: frequency at 0.5 is 0.5 within 0.02 "
          "over 10k draws") {
  Rng rng(8);
  const std::vector<int> enabled{0, 3};
  RandomizationCounters rc;
  for (int i = 0; i < 10000; ++i)
    randomize_enablement(enabled, 12, 0.5, rng, &rc);
  CHECK(rc.considered == 10000);
  const double freq =
      static_cast<double>(rc.replaced) / static_cast<double>(rc.considered);
  CHECK(freq == doctest::Approx(0.5).epsilon(0.04));  // 0.5 +- 0.02 absolute
  CHECK(std::abs(freq - 0.5) <= 0.02);
}

TEST_CASE("enablement randomization rejects bad arguments") {
  Rng rng(9);
  CHECK_THROWS_AS(randomize_enablement({0}, 3, -0.1, rng, nullptr),
                  std::invalid_argument);
  CHECK_THROWS_AS(randomize_enablement({0}, 3, 1.1, rng, nullptr),
                  std::invalid_argument);
  CHECK_THROWS_AS(randomize_enablement({0, 1, 2}, 2, 0.5, rng, nullptr),
                  std::invalid_argument);
}

TEST_CASE("overfit sanity: sigmoid-attention model memorizes a tiny corpus") {
  TinySetup s = tiny_setup();
  TrainConfig cfg = tiny_config(/*variant=*/2, /*epochs=*/25);
  cfg.batch_size = 16;
  cfg.lr = 0.01;
  cfg.dropout_rate = 0.0;
  cfg.randomization_prob = 0.0;
  cfg.d_emb = 16;
  cfg.d_hidden = 16;
  cfg.d_ff = 32;

  TrainResult r = train(cfg, s.catalog, s.corpus.train, s.corpus.dev, s.vocab);
  REQUIRE(r.report.epochs.size() == 25);
  const MetricsReport on_train = evaluate_dataset(
      r.best.params, r.best.meta.config, s.corpus.train, r.best.vocab);
  CHECK(on_train.top1 >= 0.99);
  // Best-epoch bookkeeping: the recorded best must be the first epoch
  // attaining the maximum dev top-1 (ties keep the earlier epoch).
  double best = -1.0;
  int expect = -1;
  for (const EpochRow& row : r.report.epochs)
    if (row.dev.top1 > best) {
      best = row.dev.top1;
      expect = row.epoch;
    }
  CHECK(r.report.best_epoch == expect);
  CHECK(r.best.meta.epoch == expect);
  CHECK(r.report.best_dev.top1 == best);
  // A saturating run plateaus, so the tie path is actually exercised.
  int at_max = 0;
  for (const EpochRow& row : r.report.epochs)
    if (row.dev.top1 == best) ++at_max;
  CHECK(at_max >= 2);
}

TEST_CASE("same seed and config give byte-identical checkpoints") {
  TinySetup s = tiny_setup();
  const TrainConfig cfg = tiny_config(/*variant=*/4, /*epochs=*/3);
  TrainResult a = train(cfg, s.catalog, s.corpus.train, s.corpus.dev, s.vocab);
  TrainResult b = train(cfg, s.catalog, s.corpus.train, s.corpus.dev, s.vocab);
  save_checkpoint("tmp_ck_a.bin", a.best);
  save_checkpoint("tmp_ck_b.bin", b.best);
  const std::string bytes_a = read_file("tmp_ck_a.bin");
  const std::string bytes_b = read_file("tmp_ck_b.bin");
  CHECK(bytes_a == bytes_b);
  CHECK(!bytes_a.empty());
  // The run reports match too.
  CHECK(a.report.to_string() == b.report.to_string());

  // A different seed moves the weights.
  TrainConfig other = cfg;
  other.seed += 1;
  TrainResult c =
      train(other, s.catalog, s.corpus.train, s.corpus.dev, s.vocab);
  save_checkpoint("tmp_ck_c.bin", c.best);
  CHECK(read_file("tmp_ck_c.bin") != bytes_a);
  std::remove("tmp_ck_a.bin");
  std::remove("tmp_ck_b.bin");
  std::remove("tmp_ck_c.bin");
}

TEST_CASE("checkpoint round trip restores metrics, weights, and behavior") {
  TinySetup s = tiny_setup();
  const TrainConfig cfg = tiny_config(/*variant=*/3, /*epochs=*/2);
  TrainResult r = train(cfg, s.catalog, s.corpus.train, s.corpus.dev, s.vocab);

  const std::string path = "tmp_ck_round.bin";
  save_checkpoint(path, r.best);
  Checkpoint back = load_checkpoint(path);

  CHECK(back.meta.variant == cfg.variant);
  CHECK(back.meta.epoch == r.best.meta.epoch);
  CHECK(back.meta.dev.count == r.best.meta.dev.count);
  CHECK(std::abs(back.meta.dev.top1 - r.best.meta.dev.top1) <= 1e-12);
  CHECK(std::abs(back.meta.dev.mrr - r.best.meta.dev.mrr) <= 1e-12);
  CHECK(std::abs(back.meta.dev.top3 - r.best.meta.dev.top3) <= 1e-12);
  CHECK(back.vocab.size() == r.best.vocab.size());
  CHECK(back.domain_names == r.best.domain_names);

  // Every stored array is bit-identical.
  auto orig = r.best.params.all_params();
  auto loaded = back.params.all_params();
  REQUIRE(orig.size() == loaded.size());
  for (size_t i = 0; i < orig.size(); ++i) {
    REQUIRE(orig[i]->value.size() == loaded[i]->value.size());
    const auto a = orig[i]->value.values();
    const auto b = loaded[i]->value.values();
    for (size_t j = 0; j < a.size(); ++j) CHECK(a[j] == b[j]);
  }

  // Re-evaluating the loaded model reproduces the stored dev metrics.
  const MetricsReport again =
      evaluate_dataset(back.params, back.meta.config, s.corpus.dev, back.vocab);
  CHECK(std::abs(again.top1 - back.meta.dev.top1) <= 1e-12);
  CHECK(std::abs(again.mrr - back.meta.dev.mrr) <= 1e-12);
  CHECK(std::abs(again.top3 - back.meta.dev.top3) <= 1e-12);

  // Saving the loaded checkpoint reproduces the file byte for byte.
  save_checkpoint("tmp_ck_round2.bin", back);
  CHECK(read_file("tmp_ck_round2.bin") == read_file(path));
  std::remove("tmp_ck_round2.bin");
  std::remove(path.c_str());
}

TEST_CASE("checkpoint loader rejects tampered files") {
  TinySetup s = tiny_setup();
  const TrainConfig cfg = tiny_config(/*variant=*/2, /*epochs=*/1);
  TrainResult r = train(cfg, s.catalog, s.corpus.train, s.corpus.dev, s.vocab);
  const std::string path = "tmp_ck_tamper.bin";
  save_checkpoint(path, r.best);
  const std::string good = read_file(path);

  auto write_bytes = [&](const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  };

  // Wrong magic line.
  write_bytes("not-a-checkpoint\n" + good.substr(good.find('\n') + 1));
  CHECK_THROWS_WITH_AS(load_checkpoint(path),
                       doctest::Contains("unrecognized header"),
                       std::runtime_error);

  // Tampered dims no longer match the stored config hash.
  {
    std::string bad = good;
    const size_t pos = bad.find("ff 24");
    REQUIRE(pos != std::string::npos);
    bad.replace(pos, 5, "ff 25");
    write_bytes(bad);
    CHECK_THROWS_WITH_AS(load_checkpoint(path),
                         doctest::Contains("config hash"), std::runtime_error);
  }

  // Truncated payload.
  write_bytes(good.substr(0, good.size() - 64));
  CHECK_THROWS_WITH_AS(load_checkpoint(path), doctest::Contains("truncated"),
                       std::runtime_error);

  std::remove(path.c_str());
  CHECK_THROWS_AS(load_checkpoint("no_such_checkpoint.bin"),
                  std::runtime_error);
}

TEST_CASE("plain variants never build auxiliary losses; supervised ones do") {
  TinySetup s = tiny_setup();
  for (int variant : {1, 2, 5}) {
    CAPTURE(variant);
    const TrainConfig cfg = tiny_config(variant, /*epochs=*/1);
    TrainResult r =
        train(cfg, s.catalog, s.corpus.train, s.corpus.dev, s.vocab);
    for (const EpochRow& row : r.report.epochs) {
      CHECK(row.aux_built == 0);
      CHECK(row.mean_loss_a == 0.0);
      CHECK(row.mean_loss_d == 0.0);
    }
  }
  for (int variant : {3, 4, 6}) {
    CAPTURE(variant);
    const TrainConfig cfg = tiny_config(variant, /*epochs=*/2);
    TrainResult r =
        train(cfg, s.catalog, s.corpus.train, s.corpus.dev, s.vocab);
    for (const EpochRow& row : r.report.epochs) {
      CHECK(row.aux_built == static_cast<std::uint64_t>(s.corpus.train.size()));
      CHECK(row.mean_loss_a > 0.0);
    }
  }
}

TEST_CASE("distillation starts at epoch 1 and never needs a cold snapshot") {
  TinySetup s = tiny_setup();
  const TrainConfig cfg = tiny_config(/*variant=*/4, /*epochs=*/3);
  // Epoch 0 must run even though no snapshot exists yet (its schedule weight
  // is exactly zero); later epochs have one by construction.
  TrainResult r = train(cfg, s.catalog, s.corpus.train, s.corpus.dev, s.vocab);
  REQUIRE(r.report.epochs.size() == 3);
  CHECK(r.report.epochs[0].mean_loss_d == 0.0);
  CHECK(r.report.epochs[1].mean_loss_d > 0.0);
  CHECK(r.report.epochs[2].mean_loss_d > 0.0);
}

TEST_CASE("snapshot arrays stay frozen between refresh events") {
  TinySetup s = tiny_setup();
  TrainConfig cfg = tiny_config(/*variant=*/4, /*epochs=*/8, /*seed=*/13);
  TrainResult r = train(cfg, s.catalog, s.corpus.train, s.corpus.dev, s.vocab);
  REQUIRE(r.report.epochs.size() == 8);
  bool saw_hold = false;
  for (size_t i = 0; i < r.report.epochs.size(); ++i) {
    const EpochRow& row = r.report.epochs[i];
    CHECK(row.snapshot_epoch >= 0);  // epoch 0 always improves over nothing
    if (row.improved) {
      CHECK(row.snapshot_epoch == row.epoch);
    } else {
      REQUIRE(i > 0);
      // An epoch of optimizer updates ran; the snapshot must be bitwise
      // untouched.
      CHECK(row.snapshot_epoch == r.report.epochs[i - 1].snapshot_epoch);
      CHECK(row.snapshot_checksum == r.report.epochs[i - 1].snapshot_checksum);
      saw_hold = true;
    }
  }
  CHECK(r.report.epochs[0].improved);
  CHECK(r.report.epochs[0].snapshot_epoch == 0);
  // The run must actually contain a non-improving epoch for the freeze check
  // to have bitten (a dev set of 50 examples plateaus quickly).
  CHECK(saw_hold);
}

TEST_CASE("divergent training aborts with epoch and step context") {
  TinySetup s = tiny_setup();
  TrainConfig cfg = tiny_config(/*variant=*/2, /*epochs=*/3);
  cfg.lr = 1e200;  // one Adam step throws every touched weight to ~1e200
  cfg.batch_size = 1;
  cfg.dropout_rate = 0.0;
  CHECK_THROWS_WITH_AS(
      train(cfg, s.catalog, s.corpus.train, s.corpus.dev, s.vocab),
      doctest::Contains("epoch"), std::runtime_error);
}

TEST_CASE("clip engagement rate is reported per epoch") {
  TinySetup s = tiny_setup();
  TrainConfig cfg = tiny_config(/*variant=*/2, /*epochs=*/1);

  cfg.clip_threshold = 1e18;  // never engages
  TrainResult loose =
      train(cfg, s.catalog, s.corpus.train, s.corpus.dev, s.vocab);
  CHECK(loose.report.epochs[0].clip_rate == 0.0);

  cfg.clip_threshold = 1e-12;  // always engages
  TrainResult tight =
      train(cfg, s.catalog, s.corpus.train, s.corpus.dev, s.vocab);
  CHECK(tight.report.epochs[0].clip_rate == 1.0);
}

TEST_CASE("training validates its inputs") {
  TinySetup s = tiny_setup();
  const TrainConfig good = tiny_config(2, 1);

  TrainConfig bad = good;
  bad.variant = 7;
  CHECK_THROWS_AS(train(bad, s.catalog, s.corpus.train, s.corpus.dev, s.vocab),
                  std::invalid_argument);
  bad = good;
  bad.epochs = 0;
  CHECK_THROWS_AS(train(bad, s.catalog, s.corpus.train, s.corpus.dev, s.vocab),
                  std::invalid_argument);
  bad = good;
  bad.dropout_rate = 1.0;
  CHECK_THROWS_AS(train(bad, s.catalog, s.corpus.train, s.corpus.dev, s.vocab),
                  std::invalid_argument);
  bad = good;
  bad.randomization_prob = -0.5;
  CHECK_THROWS_AS(train(bad, s.catalog, s.corpus.train, s.corpus.dev, s.vocab),
                  std::invalid_argument);
  CHECK_THROWS_AS(train(good, s.catalog, {}, s.corpus.dev, s.vocab),
                  std::invalid_argument);
  CHECK_THROWS_AS(train(good, s.catalog, s.corpus.train, {}, s.vocab),
                  std::invalid_argument);

  // Ground truth outside the catalog.
  auto broken = s.corpus.train;
  broken[0].ground_truth = 99;
  CHECK_THROWS_AS(train(good, s.catalog, broken, s.corpus.dev, s.vocab),
                  std::invalid_argument);
}

TEST_CASE("frozen embeddings keep pretrained rows verbatim") {
  TinySetup s = tiny_setup();
  // Pick two vocabulary words and give them recognizable vectors.
  const std::string w1 = s.vocab.token(2);
  const std::string w2 = s.vocab.token(3);
  const std::string emb_path = "tmp_pretrained.txt";
  TrainConfig cfg = tiny_config(/*variant=*/2, /*epochs=*/1);
  {
    std::ofstream out(emb_path);
    out << w1;
    for (int j = 0; j < cfg.d_emb; ++j) out << ' ' << 0.25;
    out << '\n' << w2;
    for (int j = 0; j < cfg.d_emb; ++j) out << ' ' << -0.5;
    out << '\n';
  }
  cfg.embeddings_path = emb_path;
  cfg.freeze_embeddings = true;
  TrainResult r = train(cfg, s.catalog, s.corpus.train, s.corpus.dev, s.vocab);

  const Array& emb = r.best.params.encoder.embedding.value;
  for (int j = 0; j < cfg.d_emb; ++j) {
    CHECK(emb.at(2, j) == 0.25);
    CHECK(emb.at(3, j) == -0.5);
  }
  // Unfrozen training moves those rows away from the file values.
  cfg.freeze_embeddings = false;
  TrainResult moved =
      train(cfg, s.catalog, s.corpus.train, s.corpus.dev, s.vocab);
  const Array& emb2 = moved.best.params.encoder.embedding.value;
  bool changed = false;
  for (int j = 0; j < cfg.d_emb; ++j)
    if (emb2.at(2, j) != 0.25 || emb2.at(3, j) != -0.5) changed = true;
  CHECK(changed);
  std::remove(emb_path.c_str());
}

TEST_CASE("run report carries the resolved config and per-epoch rows") {
  TinySetup s = tiny_setup();
  const TrainConfig cfg = tiny_config(/*variant=*/3, /*epochs=*/2);
  TrainResult r = train(cfg, s.catalog, s.corpus.train, s.corpus.dev, s.vocab);
  const std::string text = r.report.to_string();
  CHECK(text.find("variant = 3") != std::string::npos);
  CHECK(text.find("dev_top1") != std::string::npos);
  CHECK(text.find("best_epoch = ") != std::string::npos);
  // One data row per epoch.
  size_t rows = 0;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty() && line[0] >= '0' && line[0] <= '9') ++rows;
  CHECK(rows == 2);

  // Randomization instrumentation made it into the rows.
  for (const EpochRow& row : r.report.epochs) {
    CHECK(row.considered == s.corpus.train.size());
    CHECK(row.replaced > 0);
    CHECK(row.replaced < row.considered);
  }

  // Progress callbacks observe the same rows.
  std::vector<int> seen;
  TrainResult again = train(cfg, s.catalog, s.corpus.train, s.corpus.dev,
                            s.vocab, [&](const EpochRow& row) {
                              seen.push_back(row.epoch);
                            });
  CHECK(seen == std::vector<int>{0, 1});
}

TEST_CASE("evaluation is repeatable and uses the true enabled sets") {
  TinySetup s = tiny_setup();
  const TrainConfig cfg = tiny_config(/*variant=*/2, /*epochs=*/1);
  TrainResult r = train(cfg, s.catalog, s.corpus.train, s.corpus.dev, s.vocab);
  const MetricsReport m1 = evaluate_dataset(r.best.params, r.best.meta.config,
                                            s.corpus.dev, r.best.vocab);
  const MetricsReport m2 = evaluate_dataset(r.best.params, r.best.meta.config,
                                            s.corpus.dev, r.best.vocab);
  CHECK(m1.top1 == m2.top1);
  CHECK(m1.mrr == m2.mrr);
  CHECK(m1.top3 == m2.top3);
  CHECK(m1.count == static_cast<int>(s.corpus.dev.size()));
  CHECK(m1.top1 <= m1.mrr);
  CHECK(m1.top1 <= m1.top3);
}

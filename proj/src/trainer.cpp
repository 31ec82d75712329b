#include "enatt/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace enatt {

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf);
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  size_t pos = 0;
  double d;
  try {
    d = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "': bad number '" + v +
                                "'");
  }
  if (pos != v.size())
    throw std::invalid_argument("config key '" + key + "': bad number '" + v +
                                "'");
  return d;
}

long long parse_int(const std::string& key, const std::string& v) {
  size_t pos = 0;
  long long i;
  try {
    i = std::stoll(v, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "': bad integer '" + v +
                                "'");
  }
  if (pos != v.size())
    throw std::invalid_argument("config key '" + key + "': bad integer '" + v +
                                "'");
  return i;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw std::invalid_argument("config key '" + key +
                              "': expected true or false, got '" + v + "'");
}

}  // namespace

std::string TrainConfig::to_string() const {
  std::ostringstream out;
  out << "epochs = " << epochs << '\n';
  out << "batch_size = " << batch_size << '\n';
  out << "lr = " << fmt_double(lr) << '\n';
  out << "clip_threshold = " << fmt_double(clip_threshold) << '\n';
  out << "clip_mode = " << (clip_mode == ClipMode::Norm ? "norm" : "value")
      << '\n';
  out << "alpha = " << fmt_double(alpha) << '\n';
  out << "temperature = " << fmt_double(temperature) << '\n';
  out << "randomization_prob = " << fmt_double(randomization_prob) << '\n';
  out << "dropout_rate = " << fmt_double(dropout_rate) << '\n';
  out << "seed = " << seed << '\n';
  out << "variant = " << variant << '\n';
  out << "d_emb = " << d_emb << '\n';
  out << "d_hidden = " << d_hidden << '\n';
  out << "d_ff = " << d_ff << '\n';
  out << "dtype = " << (dtype == Dtype::F32 ? "f32" : "f64") << '\n';
  out << "embeddings_path = " << embeddings_path << '\n';
  out << "freeze_embeddings = " << (freeze_embeddings ? "true" : "false")
      << '\n';
  return out.str();
}

TrainConfig parse_train_config(const std::string& text) {
  TrainConfig cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected 'key = value', got '" + s + "'");
    std::string key = trim(s.substr(0, eq));
    std::string val = trim(s.substr(eq + 1));
    if (key == "epochs")
      cfg.epochs = static_cast<int>(parse_int(key, val));
    else if (key == "batch_size")
      cfg.batch_size = static_cast<int>(parse_int(key, val));
    else if (key == "lr")
      cfg.lr = parse_double(key, val);
    else if (key == "clip_threshold")
      cfg.clip_threshold = parse_double(key, val);
    else if (key == "clip_mode") {
      if (val == "norm")
        cfg.clip_mode = ClipMode::Norm;
      else if (val == "value")
        cfg.clip_mode = ClipMode::Value;
      else
        throw std::invalid_argument(
            "config key 'clip_mode': expected norm or value, got '" + val +
            "'");
    } else if (key == "alpha")
      cfg.alpha = parse_double(key, val);
    else if (key == "temperature")
      cfg.temperature = parse_double(key, val);
    else if (key == "randomization_prob")
      cfg.randomization_prob = parse_double(key, val);
    else if (key == "dropout_rate")
      cfg.dropout_rate = parse_double(key, val);
    else if (key == "seed")
      cfg.seed = static_cast<std::uint64_t>(parse_int(key, val));
    else if (key == "variant")
      cfg.variant = static_cast<int>(parse_int(key, val));
    else if (key == "d_emb")
      cfg.d_emb = static_cast<int>(parse_int(key, val));
    else if (key == "d_hidden")
      cfg.d_hidden = static_cast<int>(parse_int(key, val));
    else if (key == "d_ff")
      cfg.d_ff = static_cast<int>(parse_int(key, val));
    else if (key == "dtype") {
      if (val == "f64")
        cfg.dtype = Dtype::F64;
      else if (val == "f32")
        cfg.dtype = Dtype::F32;
      else
        throw std::invalid_argument(
            "config key 'dtype': expected f64 or f32, got '" + val + "'");
    } else if (key == "embeddings_path")
      cfg.embeddings_path = val;
    else if (key == "freeze_embeddings")
      cfg.freeze_embeddings = parse_bool(key, val);
    else
      throw std::invalid_argument("unknown config key '" + key + "' on line " +
                                  std::to_string(line_no));
  }
  return cfg;
}

TrainConfig load_train_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_train_config: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_train_config(ss.str());
}

std::vector<int> randomize_enablement(const std::vector<int>& enabled,
                                      int n_domains, double probability,
                                      Rng& rng,
                                      RandomizationCounters* counters) {
  if (probability < 0.0 || probability > 1.0)
    throw std::invalid_argument(
        "randomize_enablement: probability must lie in [0, 1]");
  if (static_cast<int>(enabled.size()) > n_domains)
    throw std::invalid_argument(
        "randomize_enablement: enabled set larger than the catalog");
  if (counters) ++counters->considered;
  if (!rng.bernoulli(probability)) return enabled;
  if (counters) ++counters->replaced;
  // Partial Fisher-Yates: the first k entries of a shuffle of 0..n-1 are a
  // uniform sample of k distinct ids.
  const int k = static_cast<int>(enabled.size());
  std::vector<int> pool(static_cast<size_t>(n_domains));
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < k; ++i) {
    const int j = rng.uniform_int(i, n_domains - 1);
    std::swap(pool[static_cast<size_t>(i)], pool[static_cast<size_t>(j)]);
  }
  std::vector<int> out(pool.begin(), pool.begin() + k);
  std::sort(out.begin(), out.end());
  return out;
}

MetricsReport evaluate_dataset(ModelParams& params, const ModelConfig& cfg,
                               std::span<const Example> data,
                               const Vocabulary& vocab) {
  Graph g(cfg.dtype);
  std::vector<std::vector<int>> rankings;
  std::vector<int> truths;
  rankings.reserve(data.size());
  truths.reserve(data.size());
  for (const Example& ex : data) {
    g.reset();
    const auto ids = token_ids(vocab, ex.tokens);
    const auto fr = model_forward(g, params, cfg, ids, ex.enabled, nullptr);
    const auto conf = g.value(fr.pred.confidences);
    rankings.push_back(rank_domains(conf));
    truths.push_back(ex.ground_truth);
  }
  return compute_metrics(rankings, truths);
}

std::string RunReport::to_string() const {
  std::ostringstream out;
  out << "# resolved config\n" << config.to_string();
  out << "# per-epoch\n";
  out << "epoch\tloss_m\tloss_a\tloss_d\ttotal\tclip_rate\tclamp_events\t"
         "aux_built\treplaced\tconsidered\tdev_top1\tdev_mrr\tdev_top3\t"
         "improved\tsnapshot_epoch\n";
  for (const EpochRow& r : epochs) {
    out << r.epoch << '\t' << fmt_double(r.mean_loss_m) << '\t'
        << fmt_double(r.mean_loss_a) << '\t' << fmt_double(r.mean_loss_d)
        << '\t' << fmt_double(r.mean_total) << '\t' << fmt_double(r.clip_rate)
        << '\t' << r.clamp_events << '\t' << r.aux_built << '\t' << r.replaced
        << '\t' << r.considered << '\t' << fmt_double(r.dev.top1) << '\t'
        << fmt_double(r.dev.mrr) << '\t' << fmt_double(r.dev.top3) << '\t'
        << (r.improved ? 1 : 0) << '\t' << r.snapshot_epoch << '\n';
  }
  out << "# best\n";
  out << "best_epoch = " << best_epoch << '\n';
  out << "best_dev_top1 = " << fmt_double(best_dev.top1) << '\n';
  out << "best_dev_mrr = " << fmt_double(best_dev.mrr) << '\n';
  out << "best_dev_top3 = " << fmt_double(best_dev.top3) << '\n';
  return out.str();
}

namespace {

void validate_train_inputs(const TrainConfig& cfg, const DomainCatalog& catalog,
                           std::span<const Example> train_set,
                           std::span<const Example> dev_set) {
  if (cfg.epochs < 1) throw std::invalid_argument("train: epochs must be >= 1");
  if (cfg.batch_size < 1)
    throw std::invalid_argument("train: batch_size must be >= 1");
  if (!(cfg.lr > 0.0)) throw std::invalid_argument("train: lr must be > 0");
  if (!(cfg.clip_threshold > 0.0))
    throw std::invalid_argument("train: clip_threshold must be > 0");
  if (cfg.alpha < 0.0) throw std::invalid_argument("train: alpha must be >= 0");
  if (!(cfg.temperature > 0.0))
    throw std::invalid_argument("train: temperature must be > 0");
  if (cfg.randomization_prob < 0.0 || cfg.randomization_prob > 1.0)
    throw std::invalid_argument(
        "train: randomization_prob must lie in [0, 1]");
  if (cfg.dropout_rate < 0.0 || cfg.dropout_rate >= 1.0)
    throw std::invalid_argument("train: dropout_rate must lie in [0, 1)");
  if (cfg.variant < 1 || cfg.variant > kNumVariants)
    throw std::invalid_argument("train: variant must lie in 1..6");
  if (cfg.d_emb < 1 || cfg.d_hidden < 1 || cfg.d_ff < 1)
    throw std::invalid_argument("train: model dimensions must be >= 1");
  if (train_set.empty())
    throw std::invalid_argument("train: empty training set");
  if (dev_set.empty())
    throw std::invalid_argument(
        "train: empty dev set (needed for best-checkpoint selection)");
  const int n = catalog.n();
  auto check = [&](std::span<const Example> data, const char* split) {
    for (const Example& ex : data) {
      if (ex.ground_truth < 0 || ex.ground_truth >= n)
        throw std::invalid_argument(std::string("train: ") + split +
                                    " example with ground truth outside the "
                                    "catalog");
      for (int e : ex.enabled)
        if (e < 0 || e >= n)
          throw std::invalid_argument(std::string("train: ") + split +
                                      " example with enabled id outside the "
                                      "catalog");
      if (ex.tokens.empty())
        throw std::invalid_argument(std::string("train: ") + split +
                                    " example with no tokens");
    }
  };
  check(train_set, "train");
  check(dev_set, "dev");
}

}  // namespace

TrainResult train(const TrainConfig& cfg, const DomainCatalog& catalog,
                  std::span<const Example> train_set,
                  std::span<const Example> dev_set, const Vocabulary& vocab,
                  const ProgressFn& progress) {
  validate_train_inputs(cfg, catalog, train_set, dev_set);

  ModelConfig mcfg;
  mcfg.vocab_size = vocab.size();
  mcfg.n_domains = catalog.n();
  mcfg.d_emb = cfg.d_emb;
  mcfg.d_hidden = cfg.d_hidden;
  mcfg.d_ff = cfg.d_ff;
  mcfg.dropout_rate = cfg.dropout_rate;
  mcfg.dtype = cfg.dtype;
  mcfg.flags = variant_flags(cfg.variant);

  ModelParams params;
  {
    Rng init_rng(split_seed(cfg.seed, 0));
    params.init(mcfg, init_rng);
  }
  if (!cfg.embeddings_path.empty())
    load_pretrained_embeddings(cfg.embeddings_path, vocab,
                               params.encoder.embedding);

  std::vector<Param*> trainable = params.all_params();
  if (cfg.freeze_embeddings)
    std::erase(trainable, &params.encoder.embedding);

  AdamState adam;
  adam.lr = cfg.lr;
  adam.init(trainable);

  Rng shuffle_rng(split_seed(cfg.seed, 1));
  Rng enable_rng(split_seed(cfg.seed, 2));
  Rng dropout_rng(split_seed(cfg.seed, 3));

  // Token ids are fixed per example; look them up once.
  std::vector<std::vector<int>> train_ids;
  train_ids.reserve(train_set.size());
  for (const Example& ex : train_set)
    train_ids.push_back(token_ids(vocab, ex.tokens));

  std::vector<std::string> domain_names;
  domain_names.reserve(static_cast<size_t>(catalog.n()));
  for (const Domain& d : catalog.domains) domain_names.push_back(d.name);

  DistillSnapshot snapshot;
  Graph g(cfg.dtype);
  std::vector<size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), size_t{0});

  TrainResult result;
  result.report.config = cfg;
  double best_top1 = -1.0;

  for (int t = 0; t < cfg.epochs; ++t) {
    shuffle_rng.shuffle(order);
    double sum_m = 0.0, sum_a = 0.0, sum_d = 0.0, sum_total = 0.0;
    std::uint64_t steps = 0, clipped_steps = 0, aux_built = 0;
    const std::uint64_t clamp_base = g.clamp_events;
    RandomizationCounters rc;

    for (size_t start = 0; start < order.size();
         start += static_cast<size_t>(cfg.batch_size)) {
      const size_t stop =
          std::min(order.size(), start + static_cast<size_t>(cfg.batch_size));
      const double batch_n = static_cast<double>(stop - start);
      for (Param* p : trainable) p->zero_grad();

      for (size_t b = start; b < stop; ++b) {
        const size_t idx = order[b];
        const Example& ex = train_set[idx];
        g.reset();
        const std::vector<int> enabled = randomize_enablement(
            ex.enabled, mcfg.n_domains, cfg.randomization_prob, enable_rng,
            &rc);
        const DropoutMasks masks = DropoutMasks::sample(
            mcfg.d_emb, mcfg.d_hidden, cfg.dropout_rate, dropout_rng);
        const ForwardResult fr =
            total_loss(g, params, mcfg, train_ids[idx], ex.ground_truth,
                       enabled, t, cfg.alpha, cfg.temperature, &snapshot,
                       &masks);
        const double total = g.scalar(fr.total);
        if (!std::isfinite(total))
          throw std::runtime_error(
              "train: loss diverged (non-finite) at epoch " +
              std::to_string(t) + ", step " + std::to_string(steps) +
              ", example " + std::to_string(idx));
        sum_total += total;
        sum_m += g.scalar(fr.loss_m);
        if (fr.loss_a != kNoNode) sum_a += g.scalar(fr.loss_a);
        if (fr.loss_d != kNoNode) sum_d += g.scalar(fr.loss_d);
        if (fr.aux_built) ++aux_built;
        // Mean-over-batch loss: scale each example's contribution before the
        // backward sweep.
        g.backward(g.scale_shift(fr.total, 1.0 / batch_n, 0.0));
      }

      const double scale =
          clip_gradients(trainable, cfg.clip_threshold, cfg.clip_mode);
      if (scale < 1.0) ++clipped_steps;
      adam_step(trainable, adam);
      ++steps;
    }

    EpochRow row;
    row.epoch = t;
    const double n_ex = static_cast<double>(train_set.size());
    row.mean_loss_m = sum_m / n_ex;
    row.mean_loss_a = sum_a / n_ex;
    row.mean_loss_d = sum_d / n_ex;
    row.mean_total = sum_total / n_ex;
    row.clip_rate = steps ? static_cast<double>(clipped_steps) /
                                static_cast<double>(steps)
                          : 0.0;
    row.clamp_events = g.clamp_events - clamp_base;
    row.aux_built = aux_built;
    row.replaced = rc.replaced;
    row.considered = rc.considered;
    row.dev = evaluate_dataset(params, mcfg, dev_set, vocab);
    row.improved = row.dev.top1 > best_top1;

    if (row.improved) {
      best_top1 = row.dev.top1;
      result.report.best_epoch = t;
      result.report.best_dev = row.dev;
      result.best.meta.variant = cfg.variant;
      result.best.meta.epoch = t;
      result.best.meta.dev = row.dev;
      result.best.meta.config = mcfg;
      result.best.meta.config_hash = config_fingerprint(mcfg, cfg.variant);
      result.best.params = params;
      result.best.vocab = vocab;
      result.best.domain_names = domain_names;
      snapshot.capture(params, t);
    }
    row.snapshot_epoch = snapshot.source_epoch;
    row.snapshot_checksum = snapshot.empty() ? 0 : snapshot.checksum();

    result.report.epochs.push_back(row);
    if (progress) progress(row);
  }

  return result;
}

}  // namespace enatt

#include "enatt/ablate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace enatt {

namespace {

MetricsReport mean_of(std::span<const MetricsReport> xs) {
  MetricsReport m;
  if (xs.empty()) return m;
  for (const auto& x : xs) {
    m.top1 += x.top1;
    m.mrr += x.mrr;
    m.top3 += x.top3;
    m.count += x.count;
  }
  const double k = static_cast<double>(xs.size());
  m.top1 /= k;
  m.mrr /= k;
  m.top3 /= k;
  return m;
}

MetricsReport stdev_of(std::span<const MetricsReport> xs,
                       const MetricsReport& mean) {
  MetricsReport s;
  if (xs.size() < 2) return s;
  for (const auto& x : xs) {
    s.top1 += (x.top1 - mean.top1) * (x.top1 - mean.top1);
    s.mrr += (x.mrr - mean.mrr) * (x.mrr - mean.mrr);
    s.top3 += (x.top3 - mean.top3) * (x.top3 - mean.top3);
  }
  const double k = static_cast<double>(xs.size() - 1);
  s.top1 = std::sqrt(s.top1 / k);
  s.mrr = std::sqrt(s.mrr / k);
  s.top3 = std::sqrt(s.top3 / k);
  return s;
}

std::string cell_text(const AblationCell& cell, double MetricsReport::*field) {
  if (cell.per_seed.empty()) return "FAILED";
  std::string out = format_pct(cell.mean.*field);
  if (cell.per_seed.size() >= 2) out += "+-" + format_pct(cell.stdev.*field);
  if (cell.failed) out += "*";
  return out;
}

void pad_to(std::string& line, size_t width) {
  if (line.size() < width) line.append(width - line.size(), ' ');
}

}  // namespace

std::string AblationGrid::to_string() const {
  std::ostringstream out;
  const size_t label_w = 42;
  const size_t col_w = 15;

  std::string h1 = "model";
  pad_to(h1, label_w);
  std::string h2;
  pad_to(h2, label_w);
  for (const auto& name : regime_names) {
    std::string group = name;
    pad_to(group, 3 * col_w);
    h1 += group;
    for (const char* metric : {"Top1", "MRR", "Top3"}) {
      std::string c = metric;
      pad_to(c, col_w);
      h2 += c;
    }
  }
  out << h1 << '\n' << h2 << '\n';

  const size_t n_variants = cells.empty() ? 0 : cells[0].size();
  for (size_t v = 0; v < n_variants; ++v) {
    const AblationCell& first = cells[0][v];
    std::string line = "(" + std::to_string(first.variant) + ") " + first.label;
    pad_to(line, label_w);
    for (size_t r = 0; r < cells.size(); ++r) {
      const AblationCell& cell = cells[r][v];
      for (auto field : {&MetricsReport::top1, &MetricsReport::mrr,
                         &MetricsReport::top3}) {
        std::string c = cell_text(cell, field);
        pad_to(c, col_w);
        line += c;
      }
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out << line << '\n';
  }

  // Failure footnotes.
  for (size_t r = 0; r < cells.size(); ++r)
    for (const AblationCell& cell : cells[r])
      if (cell.failed)
        out << "* (" << cell.variant << ") on " << regime_names[r]
            << " failed: " << cell.failure << '\n';

  out << "seeds:";
  for (auto s : seeds) out << ' ' << s;
  out << '\n';

  const auto checks = directional_checks(*this);
  if (!checks.empty()) {
    out << "trend checks (mean top-1):\n";
    for (const auto& c : checks) {
      out << "  [" << (c.holds ? "ok" : "INVERTED") << "] " << c.regime
          << ": (" << c.stronger << ") " << format_pct(c.stronger_mean)
          << " >= (" << c.weaker << ") " << format_pct(c.weaker_mean) << '\n';
    }
  }
  return out.str();
}

std::vector<DirectionalCheck> directional_checks(const AblationGrid& grid) {
  std::vector<DirectionalCheck> out;
  int unbiased = -1, biased = -1;
  for (size_t r = 0; r < grid.regime_names.size(); ++r) {
    if (grid.regime_names[r].find("unbiased") != std::string::npos) {
      if (unbiased < 0) unbiased = static_cast<int>(r);
    } else if (biased < 0) {
      biased = static_cast<int>(r);
    }
  }
  auto cell_of = [&](int regime, int variant) -> const AblationCell* {
    if (regime < 0) return nullptr;
    for (const AblationCell& c : grid.cells[static_cast<size_t>(regime)])
      if (c.variant == variant && !c.per_seed.empty()) return &c;
    return nullptr;
  };
  auto add = [&](int regime, int weaker, int stronger) {
    const AblationCell* w = cell_of(regime, weaker);
    const AblationCell* s = cell_of(regime, stronger);
    if (!w || !s) return;
    DirectionalCheck c;
    c.regime = grid.regime_names[static_cast<size_t>(regime)];
    c.weaker = weaker;
    c.stronger = stronger;
    c.weaker_mean = w->mean.top1;
    c.stronger_mean = s->mean.top1;
    c.holds = c.stronger_mean >= c.weaker_mean;
    out.push_back(c);
  };
  add(unbiased, 1, 2);  // sigmoid over softmax
  add(unbiased, 2, 4);  // supervision + distillation over plain sigmoid
  add(unbiased, 1, 4);  // combined effect
  add(biased, 4, 6);    // enablement bias helps when enablement is biased
  return out;
}

AblationGrid ablate(const AblationConfig& cfg, const DomainCatalog& catalog,
                    std::span<const AblationDataset> regimes,
                    const AblationLogFn& log) {
  if (regimes.empty())
    throw std::invalid_argument("ablate: no regimes to run");
  if (cfg.seeds.empty())
    throw std::invalid_argument("ablate: no seeds to run");
  if (cfg.variants.empty())
    throw std::invalid_argument("ablate: no variants to run");
  for (int v : cfg.variants)
    if (v < 1 || v > kNumVariants)
      throw std::invalid_argument("ablate: variant out of range");

  AblationGrid grid;
  grid.seeds = cfg.seeds;
  for (const AblationDataset& regime : regimes)
    grid.regime_names.push_back(regime.name);

  for (const AblationDataset& regime : regimes) {
    const Vocabulary vocab = corpus_vocabulary(regime.train);
    std::vector<AblationCell> row;
    for (int variant : cfg.variants) {
      AblationCell cell;
      cell.variant = variant;
      cell.label = variant_label(variant);
      for (std::uint64_t seed : cfg.seeds) {
        TrainConfig run = cfg.base;
        run.variant = variant;
        run.seed = seed;
        const auto start = std::chrono::steady_clock::now();
        try {
          TrainResult r =
              train(run, catalog, regime.train, regime.dev, vocab);
          const MetricsReport test = evaluate_dataset(
              r.best.params, r.best.meta.config, regime.test, r.best.vocab);
          cell.per_seed.push_back(test);
          if (log) {
            const double secs =
                std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - start)
                    .count();
            char buf[256];
            std::snprintf(buf, sizeof buf,
                          "%s | (%d) %s | seed %llu | dev %s | test %s | %.1fs",
                          regime.name.c_str(), variant, cell.label.c_str(),
                          static_cast<unsigned long long>(seed),
                          format_pct(r.best.meta.dev.top1).c_str(),
                          format_pct(test.top1).c_str(), secs);
            log(buf);
          }
        } catch (const std::exception& e) {
          cell.failed = true;
          if (cell.failure.empty()) cell.failure = e.what();
          if (log)
            log(regime.name + " | (" + std::to_string(variant) + ") " +
                cell.label + " | seed " + std::to_string(seed) +
                " | FAILED: " + e.what());
        }
      }
      cell.mean = mean_of(cell.per_seed);
      cell.stdev = stdev_of(cell.per_seed, cell.mean);
      row.push_back(std::move(cell));
    }
    grid.cells.push_back(std::move(row));
  }
  return grid;
}

// ---------------------------------------------------------------------------

std::string AttentionDump::to_string() const {
  std::ostringstream out;
  if (!notice.empty()) {
    out << notice << '\n';
    return out.str();
  }
  for (const AttentionDumpEntry& e : entries) {
    out << "utterance: " << e.text << '\n';
    out << "truth: " << e.ground_truth << '\n';
    std::string head = "  enabled domain";
    pad_to(head, 26);
    for (size_t m = 0; m < model_labels.size(); ++m) {
      std::string c = model_labels[m];
      pad_to(c, 36);
      head += c;
    }
    while (!head.empty() && head.back() == ' ') head.pop_back();
    out << head << '\n';
    for (size_t d = 0; d < e.domains.size(); ++d) {
      std::string line = "  " + e.domains[d];
      pad_to(line, 26);
      for (size_t m = 0; m < e.weights.size(); ++m) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.4f", e.weights[m][d]);
        std::string c = buf;
        pad_to(c, 36);
        line += c;
      }
      while (!line.empty() && line.back() == ' ') line.pop_back();
      out << line << '\n';
    }
    std::string verdict = "  correct:";
    for (bool c : e.correct) verdict += c ? " yes" : " no";
    out << verdict << '\n' << '\n';
  }
  return out.str();
}

AttentionDump dump_attention(std::span<Checkpoint> checkpoints,
                             std::span<const Example> data,
                             const DomainCatalog& catalog, int k) {
  if (checkpoints.empty())
    throw std::invalid_argument("dump_attention: no checkpoints given");
  if (k < 1) throw std::invalid_argument("dump_attention: k must be >= 1");
  for (const Checkpoint& ck : checkpoints)
    if (ck.meta.config.n_domains != catalog.n())
      throw std::invalid_argument(
          "dump_attention: checkpoint domain count disagrees with the "
          "catalog");

  AttentionDump dump;
  for (const Checkpoint& ck : checkpoints)
    dump.model_labels.push_back("(" + std::to_string(ck.meta.variant) + ") " +
                                variant_label(ck.meta.variant));

  // One graph per model so each forward runs in its checkpoint's precision.
  std::vector<Graph> graphs;
  graphs.reserve(checkpoints.size());
  for (const Checkpoint& ck : checkpoints)
    graphs.emplace_back(ck.meta.config.dtype);

  for (const Example& ex : data) {
    if (static_cast<int>(dump.entries.size()) >= k) break;
    std::vector<bool> correct;
    std::vector<std::vector<double>> weights;
    for (size_t m = 0; m < checkpoints.size(); ++m) {
      Checkpoint& ck = checkpoints[m];
      Graph& g = graphs[m];
      g.reset();
      const auto ids = token_ids(ck.vocab, ex.tokens);
      const ForwardResult fr = model_forward(g, ck.params, ck.meta.config,
                                             ids, ex.enabled, nullptr);
      const auto ranking = rank_domains(g.value(fr.pred.confidences));
      correct.push_back(ranking[0] == ex.ground_truth);
      if (fr.attn.weights != kNoNode) {
        const auto w = g.value(fr.attn.weights);
        weights.emplace_back(w.begin(), w.end());
      } else {
        weights.emplace_back();
      }
    }
    bool qualifies = correct.back();
    for (size_t m = 0; m + 1 < correct.size(); ++m)
      if (correct[m]) qualifies = false;
    if (!qualifies) continue;

    AttentionDumpEntry entry;
    std::ostringstream text;
    for (size_t i = 0; i < ex.tokens.size(); ++i)
      text << (i ? " " : "") << ex.tokens[i];
    entry.text = text.str();
    entry.ground_truth =
        catalog.domains[static_cast<size_t>(ex.ground_truth)].name;
    for (int e : ex.enabled)
      entry.domains.push_back(catalog.domains[static_cast<size_t>(e)].name);
    entry.weights = std::move(weights);
    entry.correct = std::move(correct);
    dump.entries.push_back(std::move(entry));
  }
  if (dump.entries.empty())
    dump.notice =
        "no examples were correctly classified by the last model and missed "
        "by every other";
  return dump;
}

}  // namespace enatt

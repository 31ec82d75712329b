#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "enatt/checkpoint.hpp"
#include "enatt/datagen.hpp"
#include "enatt/trainer.hpp"

namespace enatt {

// One regime's splits, e.g. the 90% and 70% ground-truth-inclusion corpora.
// Both regimes of a comparison must come from the same catalog.
struct AblationDataset {
  std::string name;  // column-group header, e.g. "biased (p=0.90)"
  std::vector<Example> train, dev, test;
};

// Grid cell: one model variant on one regime, aggregated over seeds.
struct AblationCell {
  int variant = 0;
  std::string label;
  std::vector<MetricsReport> per_seed;  // successful seeds only
  MetricsReport mean;
  MetricsReport stdev;  // sample standard deviation (0 with one seed)
  bool failed = false;  // at least one seed aborted
  std::string failure;  // first abort message
};

struct AblationConfig {
  TrainConfig base;  // variant and seed are overwritten per run
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  std::vector<int> variants = {1, 2, 3, 4, 5, 6};
};

// Expected mean-top-1 ordering on one regime: `stronger` should do at least
// as well as `weaker`. `holds` is the flag the report prints.
struct DirectionalCheck {
  std::string regime;
  int weaker = 0;
  int stronger = 0;
  double weaker_mean = 0.0;
  double stronger_mean = 0.0;
  bool holds = false;
};

struct AblationGrid {
  std::vector<std::string> regime_names;
  std::vector<std::uint64_t> seeds;
  std::vector<std::vector<AblationCell>> cells;  // [regime][variant index]

  // Two-decimal percentage table with one row per variant and a
  // Top1/MRR/Top3 column group per regime, plus the directional-check lines.
  std::string to_string() const;
};

// Trend checks between variants present in the grid: sigmoid over softmax
// and distillation over plain sigmoid on the unconstrained-enablement
// regime, enablement bias on the biased regime. Regime assignment follows
// the grid's regime names (the one containing "unbiased" vs the rest).
std::vector<DirectionalCheck> directional_checks(const AblationGrid& grid);

using AblationLogFn = std::function<void(const std::string&)>;

// Trains every (regime, variant, seed) combination on the regime's train
// split with best-dev selection, evaluates on its test split, and aggregates
// mean +- sample stdev per metric. A run that aborts (e.g. divergence) marks
// its cell failed; remaining runs proceed. Deterministic for fixed seeds.
AblationGrid ablate(const AblationConfig& cfg, const DomainCatalog& catalog,
                    std::span<const AblationDataset> regimes,
                    const AblationLogFn& log = nullptr);

// ---------------------------------------------------------------------------

// Per-example attention comparison across checkpoints: the weight each model
// assigns to every enabled domain.
struct AttentionDumpEntry {
  std::string text;
  std::string ground_truth;
  std::vector<std::string> domains;           // enabled-domain names
  std::vector<std::vector<double>> weights;   // [model][enabled index]
  std::vector<bool> correct;                  // per model: ranked truth first?
};

struct AttentionDump {
  std::vector<std::string> model_labels;
  std::vector<AttentionDumpEntry> entries;
  std::string notice;  // set when no example qualifies

  std::string to_string() const;
};

// Selects up to k examples that the LAST checkpoint classifies correctly
// (truth ranked first) while every other checkpoint misses them, then dumps
// each model's attention weights over the enabled set. With a single
// checkpoint the selection degenerates to "correctly predicted". All
// checkpoints must agree with the catalog on the domain count.
AttentionDump dump_attention(std::span<Checkpoint> checkpoints,
                             std::span<const Example> data,
                             const DomainCatalog& catalog, int k);

}  // namespace enatt

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "enatt/checkpoint.hpp"
#include "enatt/datagen.hpp"
#include "enatt/metrics.hpp"
#include "enatt/model.hpp"
#include "enatt/optim.hpp"

namespace enatt {

// Every knob of a training run. Serializes field-for-field as `key = value`
// lines (to_string / parse_train_config round-trip); an unknown key in a
// config file is an error so typos fail loudly instead of silently using a
// default.
struct TrainConfig {
  int epochs = 25;
  int batch_size = 128;
  double lr = 0.0002;
  double clip_threshold = 5.0;
  ClipMode clip_mode = ClipMode::Norm;
  double alpha = 0.01;        // weight of the auxiliary attention losses
  double temperature = 16.0;  // soft-target temperature
  double randomization_prob = 0.5;
  double dropout_rate = 0.2;
  std::uint64_t seed = 1;
  int variant = 2;  // grid position 1..6 (see variant_flags)
  int d_emb = 50;
  int d_hidden = 64;
  int d_ff = 128;
  Dtype dtype = Dtype::F64;
  std::string embeddings_path;     // optional pretrained vectors, text format
  bool freeze_embeddings = false;  // exclude embedding rows from updates

  std::string to_string() const;
};

TrainConfig parse_train_config(const std::string& text);
TrainConfig load_train_config(const std::string& path);

// Instrumentation for the enablement-randomization path: `considered` counts
// calls, `replaced` counts coins that fired.
struct RandomizationCounters {
  std::uint64_t considered = 0;
  std::uint64_t replaced = 0;
};

// With the given probability, replaces `enabled` by a uniformly sampled set
// of distinct domain ids of the same size over [0, n_domains); otherwise
// returns the original set unchanged. Training-path helper only: evaluation
// cannot reach it (evaluate_dataset takes no RNG at all).
std::vector<int> randomize_enablement(const std::vector<int>& enabled,
                                      int n_domains, double probability,
                                      Rng& rng,
                                      RandomizationCounters* counters);

// Eval-mode metrics over a dataset: no dropout, the example's true enabled
// set, ranking by confidence with ties broken toward the lower id.
MetricsReport evaluate_dataset(ModelParams& params, const ModelConfig& cfg,
                               std::span<const Example> data,
                               const Vocabulary& vocab);

// One row of the run report. Loss means are over the epoch's training
// examples; a term a variant never builds stays 0.
struct EpochRow {
  int epoch = -1;
  double mean_loss_m = 0.0;
  double mean_loss_a = 0.0;
  double mean_loss_d = 0.0;
  double mean_total = 0.0;
  double clip_rate = 0.0;  // fraction of optimizer steps that were rescaled
  std::uint64_t clamp_events = 0;  // probability saturations this epoch
  std::uint64_t aux_built = 0;     // forwards that constructed an aux loss
  std::uint64_t replaced = 0;      // enablement replacements this epoch
  std::uint64_t considered = 0;    // enablement coins this epoch
  MetricsReport dev;
  bool improved = false;  // best-dev checkpoint was refreshed after this epoch
  // State of the distillation snapshot after this epoch's refresh decision;
  // between refreshes the checksum must not move (updates never write into
  // the snapshot).
  int snapshot_epoch = -1;
  std::uint64_t snapshot_checksum = 0;
};

struct RunReport {
  TrainConfig config;
  std::vector<EpochRow> epochs;
  int best_epoch = -1;
  MetricsReport best_dev;

  // Resolved config followed by one tab-separated row per epoch.
  std::string to_string() const;
};

struct TrainResult {
  Checkpoint best;  // best-dev checkpoint; also the distillation teacher
  RunReport report;
};

using ProgressFn = std::function<void(const EpochRow&)>;

// The full training loop: seeded shuffle, minibatches, enablement
// randomization, per-variant loss, global-norm clipping, Adam, and best-dev
// checkpointing with distillation-snapshot refresh (strict improvement only,
// so ties keep the earlier epoch). Deterministic for a given config: RNG
// streams are derived from the seed per concern (init / shuffle / enablement
// / dropout). Throws std::runtime_error with epoch and step context if the
// loss stops being finite.
TrainResult train(const TrainConfig& cfg, const DomainCatalog& catalog,
                  std::span<const Example> train_set,
                  std::span<const Example> dev_set, const Vocabulary& vocab,
                  const ProgressFn& progress = nullptr);

}  // namespace enatt

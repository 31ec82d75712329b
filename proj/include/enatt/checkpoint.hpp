#pragma once

#include <string>
#include <vector>

#include "enatt/metrics.hpp"
#include "enatt/model.hpp"
#include "enatt/vocab.hpp"

namespace enatt {

// Everything needed to restore bit-identical eval behavior: model arrays,
// dimensions, variant, vocabulary, and domain names, plus the dev metrics of
// the epoch the weights came from.
struct CheckpointMeta {
  int format_version = 1;
  int variant = 2;
  int epoch = -1;
  MetricsReport dev;
  ModelConfig config;
  std::uint64_t config_hash = 0;
};

struct Checkpoint {
  CheckpointMeta meta;
  ModelParams params;
  Vocabulary vocab;
  std::vector<std::string> domain_names;
};

// Stable fingerprint of the dimension/variant configuration (FNV-1a over the
// canonical header line). Stored in the file and re-verified on load.
std::uint64_t config_fingerprint(const ModelConfig& cfg, int variant);

// Versioned container: text header (version, variant, metrics, dims, config
// hash, shape table, vocabulary, domain names) followed by the raw arrays as
// little-endian 64-bit floats in the fixed parameter order. Identical
// checkpoints produce identical bytes.
void save_checkpoint(const std::string& path, Checkpoint& ck);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace enatt

#pragma once

#include <span>
#include <string>
#include <vector>

#include "enatt/attention.hpp"
#include "enatt/encoder.hpp"
#include "enatt/head.hpp"

namespace enatt {

// The six model configurations of the ablation grid, by what they enable.
struct VariantFlags {
  AttnMode attention = AttnMode::Sigmoid;
  bool supervised = false;        // adds the supervised attention loss
  bool distilled = false;         // adds the self-distillation loss
  bool enablement_bias = false;   // adds b_enb to enabled-domain logits
};

// Grid positions 1..6:
//   1 softmax                      4 sigmoid+supervised+distilled
//   2 sigmoid                      5 softmax+bias
//   3 sigmoid+supervised           6 sigmoid+supervised+distilled+bias
VariantFlags variant_flags(int k);
std::string variant_label(int k);
inline constexpr int kNumVariants = 6;

struct ModelConfig {
  int vocab_size = 0;
  int n_domains = 0;
  int d_emb = 50;
  int d_hidden = 64;
  int d_ff = 128;
  double dropout_rate = 0.2;
  Dtype dtype = Dtype::F64;
  VariantFlags flags;

  int u_dim() const { return 2 * d_hidden; }
};

struct ModelParams {
  EncoderParams encoder;
  Param table;  // enablement vectors, n_domains x 2*d_hidden
  HeadParams head;

  void init(const ModelConfig& cfg, Rng& rng);
  // Every parameter in fixed, documented order (the checkpoint layout):
  // embedding, forward-direction gates, backward-direction gates, table,
  // head W1, b1, W2, b2, b_enb.
  std::vector<Param*> all_params();
};

// FNV-1a over the raw bytes of all parameter values; used for snapshot
// immutability checks and config/weight fingerprints.
std::uint64_t params_checksum(std::span<Param* const> params);

// Frozen copy of the encoder and enablement table from the best-dev epoch so
// far. Used only through eval-mode forwards on its private scratch graph;
// nothing ever calls backward on it, so no gradient can reach these values.
struct DistillSnapshot {
  EncoderParams encoder;
  Param table;
  int source_epoch = -1;

  void capture(ModelParams& m, int epoch);
  bool empty() const { return source_epoch < 0; }
  // Eval-mode utterance vector under the frozen parameters.
  Array utterance_vector(std::span<const int> token_ids);
  std::uint64_t checksum();

 private:
  Graph scratch_;
};

// Node handles for one example's forward pass and loss terms. Loss nodes that
// a variant does not build stay kNoNode.
struct ForwardResult {
  NodeRef u = kNoNode;
  AttentionResult attn;
  PredictionNodes pred;
  NodeRef loss_m = kNoNode;
  NodeRef loss_a = kNoNode;
  NodeRef loss_d = kNoNode;
  NodeRef total = kNoNode;
  bool aux_built = false;
};

// Prediction-only forward (used by evaluation; always the true enabled set,
// no dropout).
ForwardResult model_forward(Graph& g, ModelParams& m, const ModelConfig& cfg,
                            std::span<const int> token_ids,
                            std::span<const int> enabled,
                            const DropoutMasks* masks);

// Full training loss for one example at epoch t:
//   total = L_m + alpha * ((1 - beta^t) L_a + beta^t L_d)
// with terms dropped per the variant flags. Distillation with beta^t > 0
// requires a snapshot; at t = 0 the schedule itself makes the snapshot
// unnecessary. Throws std::runtime_error if the snapshot is missing while its
// weight is positive.
ForwardResult total_loss(Graph& g, ModelParams& m, const ModelConfig& cfg,
                         std::span<const int> token_ids, int ground_truth,
                         std::span<const int> enabled, int t, double alpha,
                         double temperature, DistillSnapshot* snapshot,
                         const DropoutMasks* masks);

}  // namespace enatt

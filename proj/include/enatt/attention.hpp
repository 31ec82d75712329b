#pragma once

#include <span>
#include <vector>

#include "enatt/graph.hpp"

namespace enatt {

enum class AttnMode { Sigmoid, Softmax };

// Floor/ceiling applied to every probability that feeds a log term.
inline constexpr double kProbEps = 1e-12;

// Attention over the enabled-domain set. `enabled` is stored sorted and
// deduplicated; with an empty set the summary is a zero vector and the
// score/weight nodes are absent (kNoNode).
struct AttentionResult {
  std::vector<int> enabled;
  AttnMode mode = AttnMode::Sigmoid;
  NodeRef scores = kNoNode;   // s_e = u . v_e, one per enabled domain
  NodeRef weights = kNoNode;  // a_e: sigmoid(s_e) or softmax over s
  NodeRef summary = kNoNode;  // c = sum_e a_e * v_e
};

// Temperature-softened targets computed from a frozen parameter snapshot.
// Plain numbers (not graph nodes), so no gradient can reach the snapshot.
struct SoftTargets {
  std::vector<int> enabled;    // sorted, must match the student's set
  std::vector<double> values;  // one target per enabled domain, each in (0,1)
  double temperature = 0.0;
  int source_epoch = -1;
};

// Scores each enabled domain against u via the rows of `table`
// (n x dim(u) matrix node), turns scores into weights per `mode`, and forms
// the weighted summary vector. Throws on domain ids outside [0, n).
AttentionResult attend(Graph& g, NodeRef u, std::span<const int> enabled,
                       NodeRef table, int n_domains, AttnMode mode);

// Binary cross-entropy of the attention weights against the one-hot
// ground-truth indicator over the enabled set. Empty set -> 0. Weights are
// clamped to [kProbEps, 1-kProbEps] before the logs (clamp events counted by
// the graph).
NodeRef supervised_attention_loss(Graph& g, const AttentionResult& result,
                                  int ground_truth);

// Soft targets from snapshot values: sigmoid((u_snap . v_e_snap) / T) per
// enabled domain. u_snap and table_snap are frozen arrays. T must be > 0.
SoftTargets soft_targets(const Array& u_snap, std::span<const int> enabled,
                         const Array& table_snap, double temperature);

// Binary cross-entropy of the current (temperature-1) attention weights
// against the soft targets. The enabled sets must match exactly.
NodeRef distillation_loss(Graph& g, const AttentionResult& result,
                          const SoftTargets& targets);

// Distillation ramp: beta^t = 1 - 0.95^t for epoch t >= 0.
double beta_schedule(int t);

// alpha * ((1 - beta^t) * L_a + beta^t * L_d). Either loss node may be
// kNoNode, in which case its term is dropped (weight applied to 0).
NodeRef combined_aux_loss(Graph& g, NodeRef loss_a, NodeRef loss_d, int t,
                          double alpha);

}  // namespace enatt

#pragma once

#include <span>
#include <vector>

#include "enatt/graph.hpp"
#include "enatt/rng.hpp"

namespace enatt {

// Two-layer scoring head over [u ; c] with SeLU in the middle and one
// independent sigmoid confidence per domain, plus an optional learned scalar
// bias added to every enabled domain's logit.
struct HeadParams {
  Param W1, b1;   // (d_ff x 4*d_hidden), (d_ff)
  Param W2, b2;   // (n x d_ff), (n)
  Param b_enb;    // single learned scalar (length-1 vector)
  int n_domains = 0;
  int d_ff = 0;

  void init(int u_dim_times2, int d_ff_width, int n, Rng& rng,
            Dtype dt = Dtype::F64);
  // Fixed order: W1, b1, W2, b2, b_enb. b_enb is always present (it stays at
  // zero and receives no gradient unless the bias variant wires it in).
  void collect(std::vector<Param*>& out);
};

struct PredictionNodes {
  NodeRef logits = kNoNode;       // n-vector
  NodeRef confidences = kNoNode;  // sigmoid(logits), each in (0,1)
};

// logits = W2 . selu(W1 . [u;c] + b1) + b2; when with_bias, the b_enb scalar
// is added to each enabled domain's logit. `enabled` must be sorted unique
// ids inside [0, n).
PredictionNodes predict(Graph& g, NodeRef u, NodeRef c,
                        std::span<const int> enabled, HeadParams& p,
                        bool with_bias);

// Binary cross-entropy of the per-domain confidences against the one-hot
// ground-truth vector. Probabilities are clamped as in the attention losses.
// Throws if ground_truth is outside the catalog.
NodeRef main_loss(Graph& g, NodeRef confidences, int ground_truth);

// Eval-side view of one forward pass: raw confidences plus the full ranking,
// descending by confidence with ties broken toward the lower domain id.
struct Prediction {
  std::vector<double> confidences;
  std::vector<int> ranking;
};

std::vector<int> rank_domains(std::span<const double> confidences);
Prediction make_prediction(std::span<const double> confidences);

}  // namespace enatt

#pragma once

#include <cstdint>

#include "enatt/gradcheck.hpp"
#include "enatt/model.hpp"

namespace enatt {

// A self-contained end-to-end gradient-check fixture: a small model with a
// fixed utterance, enabled set, dropout masks, and an independently
// initialized teacher snapshot, so every loss term a variant can build is on
// the tape. All inputs are derived from `seed`, so a given spec is fully
// reproducible.
struct ModelCheckSpec {
  int vocab_size = 50;
  int n_domains = 6;
  int d_emb = 8;
  int d_hidden = 8;
  int d_ff = 16;
  int n_enabled = 2;
  int seq_len = 5;
  int variant = 4;
  int epoch = 1;  // schedule position; >= 1 makes distillation active
  double alpha = 0.01;
  double temperature = 16.0;
  double dropout_rate = 0.2;
  std::uint64_t seed = 91;
  double tolerance = 1e-4;
};

// Compares every analytic parameter gradient of the spec'd model against
// central finite differences in 64-bit.
GradCheckReport model_grad_check(const ModelCheckSpec& spec);

}  // namespace enatt

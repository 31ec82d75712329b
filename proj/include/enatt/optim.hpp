#pragma once

#include <span>
#include <vector>

#include "enatt/array.hpp"
#include "enatt/graph.hpp"
#include "enatt/rng.hpp"

namespace enatt {

enum class ClipMode { Norm, Value };

// Global gradient clipping. Norm mode: if the global L2 norm g of all
// gradients exceeds threshold, every gradient is scaled by threshold/g.
// Value mode clamps each component to [-threshold, threshold]. Returns the
// scale applied (1.0 when untouched; value mode always reports 1.0).
double clip_gradients(std::span<Param* const> params, double threshold,
                      ClipMode mode = ClipMode::Norm);

struct AdamState {
  double lr = 0.0002;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long step = 0;
  std::vector<Array> m;
  std::vector<Array> v;

  bool initialized() const { return !m.empty(); }
  void init(std::span<Param* const> params);
};

// Standard Adam update with bias correction, in parameter registration order.
void adam_step(std::span<Param* const> params, AdamState& state);

// Uniform in +-sqrt(6 / (fan_in + fan_out)). A 1-D shape (n) is treated as
// fans (n, 1).
Array xavier_init(int rows, int cols, Rng& rng, Dtype dt = Dtype::F64);
Array xavier_init(int len, Rng& rng, Dtype dt = Dtype::F64);

}  // namespace enatt

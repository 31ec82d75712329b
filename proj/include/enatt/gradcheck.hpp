#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "enatt/graph.hpp"

namespace enatt {

// Builds a loss graph over the parameters it closes over. Must be
// deterministic: the same parameter values always produce the same loss.
using GraphBuilder = std::function<NodeRef(Graph&)>;

struct GradCheckEntry {
  std::string param;
  double max_rel_err = 0.0;
  int worst_index = -1;
  double analytic = 0.0;
  double numeric = 0.0;
  bool finite = true;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  double max_rel_err = 0.0;
  double tolerance = 0.0;
  bool pass = true;

  std::string to_string() const;
};

struct GradCheckOptions {
  double tolerance = 1e-4;
  double h = 1e-5;
};

// Central-difference comparison of the given analytic gradients against
// (L(v+h) - L(v-h)) / 2h per parameter component. Relative error uses
// |a - n| / max(|a|, |n|, 1e-3) so near-zero gradients are held to an
// absolute standard instead of exploding.
GradCheckReport compare_against_fd(std::span<Param* const> params,
                                   const GraphBuilder& build,
                                   std::span<const Array> analytic,
                                   const GradCheckOptions& opts = {});

// backward() on the built graph, then compare_against_fd. 64-bit mode only.
GradCheckReport grad_check(std::span<Param* const> params,
                           const GraphBuilder& build,
                           const GradCheckOptions& opts = {});

}  // namespace enatt

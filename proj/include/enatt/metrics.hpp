#pragma once

#include <span>
#include <string>
#include <vector>

namespace enatt {

struct MetricsReport {
  double top1 = 0.0;
  double mrr = 0.0;
  double top3 = 0.0;
  int count = 0;
};

// top1 = mean[rank(truth) = 1], mrr = mean[1 / rank(truth)],
// top3 = mean[rank(truth) <= 3]. Each ranking must be a full permutation of
// the domain ids containing its ground truth. Throws on an empty set, a
// size mismatch, or a ranking that lacks its truth.
MetricsReport compute_metrics(std::span<const std::vector<int>> rankings,
                              std::span<const int> ground_truths);

// 0.9581 -> "95.81" (two-decimal percentage).
std::string format_pct(double value);

}  // namespace enatt

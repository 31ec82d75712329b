#include "enatt/metrics.hpp"

#include <cstdio>
#include <stdexcept>

namespace enatt {

MetricsReport compute_metrics(std::span<const std::vector<int>> rankings,
                              std::span<const int> ground_truths) {
  if (rankings.empty())
    throw std::invalid_argument("compute_metrics: empty evaluation set");
  if (rankings.size() != ground_truths.size())
    throw std::invalid_argument(
        "compute_metrics: " + std::to_string(rankings.size()) +
        " rankings vs " + std::to_string(ground_truths.size()) + " truths");

  double top1 = 0.0, mrr = 0.0, top3 = 0.0;
  for (size_t i = 0; i < rankings.size(); ++i) {
    const auto& r = rankings[i];
    int rank = 0;  // 1-based position of the ground truth
    for (size_t j = 0; j < r.size(); ++j) {
      if (r[j] == ground_truths[i]) {
        rank = static_cast<int>(j) + 1;
        break;
      }
    }
    if (rank == 0)
      throw std::invalid_argument("compute_metrics: ranking " +
                                  std::to_string(i) +
                                  " does not contain its ground truth");
    if (rank == 1) top1 += 1.0;
    if (rank <= 3) top3 += 1.0;
    mrr += 1.0 / rank;
  }
  MetricsReport m;
  m.count = static_cast<int>(rankings.size());
  m.top1 = top1 / m.count;
  m.mrr = mrr / m.count;
  m.top3 = top3 / m.count;
  return m;
}

std::string format_pct(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", value * 100.0);
  return std::string(buf);
}

}  // namespace enatt

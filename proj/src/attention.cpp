#include "enatt/attention.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace enatt {

namespace {

std::vector<int> sorted_unique(std::span<const int> ids) {
  std::vector<int> out(ids.begin(), ids.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// -sum_e [ y_e log a_e + (1-y_e) log(1-a_e) ] with probability clamping on
// both a and 1-a (the latter only engages under reduced precision).
NodeRef bce_over_weights(Graph& g, NodeRef weights,
                         const std::vector<double>& targets) {
  NodeRef y = g.constant(std::span<const double>(targets));
  NodeRef a = g.clamp(weights, kProbEps, 1.0 - kProbEps);
  NodeRef om_a = g.clamp(g.scale_shift(a, -1.0, 1.0), kProbEps, 1.0 - kProbEps);
  NodeRef om_y = g.scale_shift(y, -1.0, 1.0);
  NodeRef pos = g.dot(y, g.log(a));
  NodeRef neg = g.dot(om_y, g.log(om_a));
  return g.scale_shift(g.add(pos, neg), -1.0, 0.0);
}

}  // namespace

AttentionResult attend(Graph& g, NodeRef u, std::span<const int> enabled,
                       NodeRef table, int n_domains, AttnMode mode) {
  AttentionResult r;
  r.enabled = sorted_unique(enabled);
  r.mode = mode;
  for (int e : r.enabled)
    if (e < 0 || e >= n_domains)
      throw std::invalid_argument("attend: unknown domain id " +
                                  std::to_string(e) + " (catalog size " +
                                  std::to_string(n_domains) + ")");
  if (r.enabled.empty()) {
    r.summary = g.zeros_const(g.cols(table));
    return r;
  }
  r.scores = g.rows_dot(u, table, r.enabled);
  r.weights = mode == AttnMode::Sigmoid ? g.sigmoid(r.scores)
                                        : g.softmax(r.scores);
  r.summary = g.weighted_rows_sum(r.weights, table, r.enabled);
  return r;
}

NodeRef supervised_attention_loss(Graph& g, const AttentionResult& result,
                                  int ground_truth) {
  if (result.enabled.empty()) return g.scalar_const(0.0);
  std::vector<double> y(result.enabled.size(), 0.0);
  for (size_t i = 0; i < result.enabled.size(); ++i)
    if (result.enabled[i] == ground_truth) y[i] = 1.0;
  return bce_over_weights(g, result.weights, y);
}

SoftTargets soft_targets(const Array& u_snap, std::span<const int> enabled,
                         const Array& table_snap, double temperature) {
  if (temperature <= 0.0)
    throw std::invalid_argument("soft_targets: temperature must be positive");
  if (u_snap.size() != table_snap.cols())
    throw std::invalid_argument("soft_targets: u dimension " +
                                std::to_string(u_snap.size()) +
                                " does not match table row width " +
                                std::to_string(table_snap.cols()));
  SoftTargets t;
  t.enabled = sorted_unique(enabled);
  t.temperature = temperature;
  t.values.reserve(t.enabled.size());
  for (int e : t.enabled) {
    if (e < 0 || e >= table_snap.rows())
      throw std::invalid_argument("soft_targets: unknown domain id " +
                                  std::to_string(e));
    double s = 0.0;
    for (int j = 0; j < table_snap.cols(); ++j)
      s += u_snap[j] * table_snap.at(e, j);
    t.values.push_back(1.0 / (1.0 + std::exp(-s / temperature)));
  }
  return t;
}

NodeRef distillation_loss(Graph& g, const AttentionResult& result,
                          const SoftTargets& targets) {
  if (result.enabled != targets.enabled)
    throw std::invalid_argument(
        "distillation_loss: enabled sets of result and targets differ");
  if (result.enabled.empty()) return g.scalar_const(0.0);
  return bce_over_weights(g, result.weights, targets.values);
}

double beta_schedule(int t) {
  if (t < 0)
    throw std::invalid_argument("beta_schedule: epoch must be >= 0, got " +
                                std::to_string(t));
  return 1.0 - std::pow(0.95, t);
}

NodeRef combined_aux_loss(Graph& g, NodeRef loss_a, NodeRef loss_d, int t,
                          double alpha) {
  if (alpha < 0.0)
    throw std::invalid_argument("combined_aux_loss: alpha must be >= 0");
  const double beta = beta_schedule(t);
  NodeRef total = kNoNode;
  if (loss_a != kNoNode) total = g.scale_shift(loss_a, alpha * (1.0 - beta), 0.0);
  if (loss_d != kNoNode) {
    NodeRef dterm = g.scale_shift(loss_d, alpha * beta, 0.0);
    total = total == kNoNode ? dterm : g.add(total, dterm);
  }
  return total == kNoNode ? g.scalar_const(0.0) : total;
}

}  // namespace enatt

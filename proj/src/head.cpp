#include "enatt/head.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include "enatt/attention.hpp"
#include "enatt/optim.hpp"

namespace enatt {

void HeadParams::init(int u_dim_times2, int d_ff_width, int n, Rng& rng,
                      Dtype dt) {
  if (u_dim_times2 < 1 || d_ff_width < 1 || n < 1)
    throw std::invalid_argument("HeadParams::init: bad dimensions");
  n_domains = n;
  d_ff = d_ff_width;
  W1 = Param("head.W1", xavier_init(d_ff_width, u_dim_times2, rng, dt));
  b1 = Param("head.b1", Array::zeros(d_ff_width, dt));
  W2 = Param("head.W2", xavier_init(n, d_ff_width, rng, dt));
  b2 = Param("head.b2", Array::zeros(n, dt));
  b_enb = Param("head.b_enb", Array::zeros(1, dt));
}

void HeadParams::collect(std::vector<Param*>& out) {
  for (Param* p : {&W1, &b1, &W2, &b2, &b_enb}) out.push_back(p);
}

PredictionNodes predict(Graph& g, NodeRef u, NodeRef c,
                        std::span<const int> enabled, HeadParams& p,
                        bool with_bias) {
  for (int e : enabled)
    if (e < 0 || e >= p.n_domains)
      throw std::invalid_argument("predict: unknown domain id " +
                                  std::to_string(e));
  NodeRef uc = g.concat(u, c);
  NodeRef hidden = g.selu(g.add(g.matvec(g.param(p.W1), uc), g.param(p.b1)));
  NodeRef logits = g.add(g.matvec(g.param(p.W2), hidden), g.param(p.b2));
  if (with_bias && !enabled.empty())
    logits = g.add_at_indices(logits, g.param(p.b_enb), enabled);
  PredictionNodes out;
  out.logits = logits;
  out.confidences = g.sigmoid(logits);
  return out;
}

NodeRef main_loss(Graph& g, NodeRef confidences, int ground_truth) {
  const int n = g.size(confidences);
  if (ground_truth < 0 || ground_truth >= n)
    throw std::invalid_argument("main_loss: ground truth " +
                                std::to_string(ground_truth) +
                                " outside catalog of size " + std::to_string(n));
  std::vector<double> y(static_cast<size_t>(n), 0.0);
  y[static_cast<size_t>(ground_truth)] = 1.0;
  NodeRef yn = g.constant(std::span<const double>(y));
  NodeRef o = g.clamp(confidences, kProbEps, 1.0 - kProbEps);
  NodeRef om_o = g.clamp(g.scale_shift(o, -1.0, 1.0), kProbEps, 1.0 - kProbEps);
  NodeRef om_y = g.scale_shift(yn, -1.0, 1.0);
  NodeRef pos = g.dot(yn, g.log(o));
  NodeRef neg = g.dot(om_y, g.log(om_o));
  return g.scale_shift(g.add(pos, neg), -1.0, 0.0);
}

std::vector<int> rank_domains(std::span<const double> confidences) {
  std::vector<int> order(confidences.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (confidences[static_cast<size_t>(a)] != confidences[static_cast<size_t>(b)])
      return confidences[static_cast<size_t>(a)] > confidences[static_cast<size_t>(b)];
    return a < b;  // deterministic tie-break: lower id first
  });
  return order;
}

Prediction make_prediction(std::span<const double> confidences) {
  Prediction p;
  p.confidences.assign(confidences.begin(), confidences.end());
  p.ranking = rank_domains(confidences);
  return p;
}

}  // namespace enatt

#include "enatt/model.hpp"

#include <cstring>
#include <stdexcept>

#include "enatt/optim.hpp"

namespace enatt {

VariantFlags variant_flags(int k) {
  switch (k) {
    case 1: return {AttnMode::Softmax, false, false, false};
    case 2: return {AttnMode::Sigmoid, false, false, false};
    case 3: return {AttnMode::Sigmoid, true, false, false};
    case 4: return {AttnMode::Sigmoid, true, true, false};
    case 5: return {AttnMode::Softmax, false, false, true};
    case 6: return {AttnMode::Sigmoid, true, true, true};
    default:
      throw std::invalid_argument("variant_flags: variant " +
                                  std::to_string(k) + " outside 1..6");
  }
}

std::string variant_label(int k) {
  switch (k) {
    case 1: return "softmax";
    case 2: return "sigmoid";
    case 3: return "sigmoid+supervised";
    case 4: return "sigmoid+supervised+distilled";
    case 5: return "softmax+bias";
    case 6: return "sigmoid+supervised+distilled+bias";
    default:
      throw std::invalid_argument("variant_label: variant " +
                                  std::to_string(k) + " outside 1..6");
  }
}

void ModelParams::init(const ModelConfig& cfg, Rng& rng) {
  if (cfg.n_domains < 2)
    throw std::invalid_argument("ModelParams::init: need at least 2 domains");
  EncoderConfig ec{cfg.d_emb, cfg.d_hidden, cfg.dropout_rate};
  encoder.init(cfg.vocab_size, ec, rng, cfg.dtype);
  table = Param("enablement_table",
                xavier_init(cfg.n_domains, cfg.u_dim(), rng, cfg.dtype));
  head.init(2 * cfg.u_dim(), cfg.d_ff, cfg.n_domains, rng, cfg.dtype);
}

std::vector<Param*> ModelParams::all_params() {
  std::vector<Param*> out;
  encoder.collect(out);
  out.push_back(&table);
  head.collect(out);
  return out;
}

std::uint64_t params_checksum(std::span<Param* const> params) {
  std::uint64_t h = 14695981039346656037ull;
  auto mix = [&](const Array& a) {
    for (double d : a.values()) {
      std::uint64_t bits;
      std::memcpy(&bits, &d, sizeof bits);
      for (int k = 0; k < 8; ++k) {
        h ^= (bits >> (8 * k)) & 0xffu;
        h *= 1099511628211ull;
      }
    }
  };
  for (const Param* p : params) mix(p->value);
  return h;
}

void DistillSnapshot::capture(ModelParams& m, int epoch) {
  encoder = m.encoder;
  table = m.table;
  source_epoch = epoch;
  std::vector<Param*> ps;
  encoder.collect(ps);
  ps.push_back(&table);
  for (Param* p : ps) p->zero_grad();
}

Array DistillSnapshot::utterance_vector(std::span<const int> token_ids) {
  if (empty())
    throw std::runtime_error("DistillSnapshot: no snapshot captured yet");
  scratch_.reset();
  NodeRef u = encode_utterance(scratch_, token_ids, encoder, nullptr);
  auto v = scratch_.value(u);
  Array out = Array::zeros(static_cast<int>(v.size()));
  for (size_t i = 0; i < v.size(); ++i) out.set(static_cast<int>(i), v[i]);
  return out;
}

std::uint64_t DistillSnapshot::checksum() {
  std::vector<Param*> ps;
  encoder.collect(ps);
  ps.push_back(&table);
  return params_checksum(ps);
}

ForwardResult model_forward(Graph& g, ModelParams& m, const ModelConfig& cfg,
                            std::span<const int> token_ids,
                            std::span<const int> enabled,
                            const DropoutMasks* masks) {
  ForwardResult r;
  r.u = encode_utterance(g, token_ids, m.encoder, masks);
  NodeRef table_node = g.param(m.table);
  r.attn = attend(g, r.u, enabled, table_node, cfg.n_domains,
                  cfg.flags.attention);
  r.pred = predict(g, r.u, r.attn.summary, r.attn.enabled, m.head,
                   cfg.flags.enablement_bias);
  return r;
}

ForwardResult total_loss(Graph& g, ModelParams& m, const ModelConfig& cfg,
                         std::span<const int> token_ids, int ground_truth,
                         std::span<const int> enabled, int t, double alpha,
                         double temperature, DistillSnapshot* snapshot,
                         const DropoutMasks* masks) {
  ForwardResult r = model_forward(g, m, cfg, token_ids, enabled, masks);
  r.loss_m = main_loss(g, r.pred.confidences, ground_truth);
  if (cfg.flags.supervised)
    r.loss_a = supervised_attention_loss(g, r.attn, ground_truth);
  if (cfg.flags.distilled && beta_schedule(t) > 0.0) {
    if (snapshot == nullptr || snapshot->empty())
      throw std::runtime_error(
          "total_loss: distillation weight is positive at epoch " +
          std::to_string(t) + " but no snapshot is available");
    Array u_snap = snapshot->utterance_vector(token_ids);
    SoftTargets targets =
        soft_targets(u_snap, r.attn.enabled, snapshot->table.value, temperature);
    targets.source_epoch = snapshot->source_epoch;
    r.loss_d = distillation_loss(g, r.attn, targets);
  }
  if (cfg.flags.supervised || cfg.flags.distilled) {
    NodeRef aux = combined_aux_loss(g, r.loss_a, r.loss_d, t, alpha);
    r.total = g.add(r.loss_m, aux);
    r.aux_built = true;
  } else {
    r.total = r.loss_m;
  }
  return r;
}

}  // namespace enatt

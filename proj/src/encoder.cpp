#include "enatt/encoder.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "enatt/optim.hpp"

namespace enatt {

void LstmDirParams::init(const std::string& prefix, int d_emb, int d_hidden,
                         Rng& rng, Dtype dt) {
  auto mat = [&](const char* name, int r, int c) {
    return Param(prefix + "." + name, xavier_init(r, c, rng, dt));
  };
  auto vec = [&](const char* name) {
    return Param(prefix + "." + name, xavier_init(d_hidden, rng, dt));
  };
  auto bias = [&](const char* name) {
    return Param(prefix + "." + name, Array::zeros(d_hidden, dt));
  };
  Wf = mat("Wf", d_hidden, d_emb);
  Rf = mat("Rf", d_hidden, d_hidden);
  pf = vec("pf");
  bf = bias("bf");
  Wz = mat("Wz", d_hidden, d_emb);
  Rz = mat("Rz", d_hidden, d_hidden);
  bz = bias("bz");
  Wo = mat("Wo", d_hidden, d_emb);
  Ro = mat("Ro", d_hidden, d_hidden);
  po = vec("po");
  bo = bias("bo");
}

void LstmDirParams::collect(std::vector<Param*>& out) {
  for (Param* p : {&Wf, &Rf, &pf, &bf, &Wz, &Rz, &bz, &Wo, &Ro, &po, &bo})
    out.push_back(p);
}

void EncoderParams::init(int vocab_size, const EncoderConfig& cfg, Rng& rng,
                         Dtype dt) {
  if (vocab_size < 2 || cfg.d_emb < 1 || cfg.d_hidden < 1)
    throw std::invalid_argument("EncoderParams::init: bad dimensions");
  d_emb = cfg.d_emb;
  d_hidden = cfg.d_hidden;
  embedding = Param("embedding", xavier_init(vocab_size, cfg.d_emb, rng, dt));
  fwd.init("lstm_fwd", cfg.d_emb, cfg.d_hidden, rng, dt);
  bwd.init("lstm_bwd", cfg.d_emb, cfg.d_hidden, rng, dt);
}

void EncoderParams::collect(std::vector<Param*>& out) {
  out.push_back(&embedding);
  fwd.collect(out);
  bwd.collect(out);
}

DropoutMasks DropoutMasks::sample(int d_emb, int d_hidden, double rate,
                                  Rng& rng) {
  if (rate < 0.0 || rate >= 1.0)
    throw std::invalid_argument("DropoutMasks: rate must be in [0,1)");
  const double keep_scale = 1.0 / (1.0 - rate);
  auto draw = [&](int len) {
    Array m = Array::zeros(len);
    for (int i = 0; i < len; ++i)
      m.set(i, rng.bernoulli(rate) ? 0.0 : keep_scale);
    return m;
  };
  DropoutMasks out;
  out.in_fwd = draw(d_emb);
  out.rec_fwd = draw(d_hidden);
  out.in_bwd = draw(d_emb);
  out.rec_bwd = draw(d_hidden);
  return out;
}

LstmState lstm_cell(Graph& g, NodeRef x_t, NodeRef h_prev, NodeRef c_prev,
                    LstmDirParams& p, NodeRef in_mask, NodeRef rec_mask) {
  const NodeRef x = in_mask == kNoNode ? x_t : g.mul(x_t, in_mask);
  const NodeRef h = rec_mask == kNoNode ? h_prev : g.mul(h_prev, rec_mask);

  NodeRef f_pre = g.add(g.add(g.matvec(g.param(p.Wf), x), g.matvec(g.param(p.Rf), h)),
                        g.add(g.mul(g.param(p.pf), c_prev), g.param(p.bf)));
  LstmState s;
  s.f = g.sigmoid(f_pre);
  s.i = g.scale_shift(s.f, -1.0, 1.0);  // coupled gates: i = 1 - f
  NodeRef z = g.tanh(g.add(
      g.add(g.matvec(g.param(p.Wz), x), g.matvec(g.param(p.Rz), h)), g.param(p.bz)));
  s.c = g.add(g.mul(s.f, c_prev), g.mul(s.i, z));
  NodeRef o_pre = g.add(g.add(g.matvec(g.param(p.Wo), x), g.matvec(g.param(p.Ro), h)),
                        g.add(g.mul(g.param(p.po), s.c), g.param(p.bo)));
  NodeRef o = g.sigmoid(o_pre);
  s.h = g.mul(o, g.tanh(s.c));
  return s;
}

namespace {

NodeRef run_direction(Graph& g, NodeRef emb, std::span<const int> ids,
                      bool reverse, LstmDirParams& p, NodeRef in_mask,
                      NodeRef rec_mask, int d_hidden) {
  NodeRef h = g.zeros_const(d_hidden);
  NodeRef c = g.zeros_const(d_hidden);
  const int n = static_cast<int>(ids.size());
  for (int step = 0; step < n; ++step) {
    const int t = reverse ? n - 1 - step : step;
    NodeRef x = g.row(emb, ids[static_cast<size_t>(t)]);
    LstmState s = lstm_cell(g, x, h, c, p, in_mask, rec_mask);
    h = s.h;
    c = s.c;
  }
  return h;
}

}  // namespace

NodeRef encode_utterance(Graph& g, std::span<const int> token_ids,
                         EncoderParams& p, const DropoutMasks* masks) {
  if (token_ids.empty())
    throw std::invalid_argument("encode_utterance: empty token sequence");
  for (int id : token_ids)
    if (id < 0 || id >= p.embedding.value.rows())
      throw std::invalid_argument("encode_utterance: token id " +
                                  std::to_string(id) + " outside vocabulary");

  NodeRef emb = g.param(p.embedding);
  NodeRef if_m = kNoNode, rf_m = kNoNode, ib_m = kNoNode, rb_m = kNoNode;
  if (masks != nullptr) {
    if_m = g.constant(masks->in_fwd);
    rf_m = g.constant(masks->rec_fwd);
    ib_m = g.constant(masks->in_bwd);
    rb_m = g.constant(masks->rec_bwd);
  }
  NodeRef h_fwd = run_direction(g, emb, token_ids, false, p.fwd, if_m, rf_m,
                                p.d_hidden);
  NodeRef h_bwd = run_direction(g, emb, token_ids, true, p.bwd, ib_m, rb_m,
                                p.d_hidden);
  return g.concat(h_fwd, h_bwd);
}

int load_pretrained_embeddings(const std::string& path, const Vocabulary& vocab,
                               Param& embedding) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("load_pretrained_embeddings: cannot open " + path);
  const int d = embedding.value.cols();
  int loaded = 0;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string word;
    ss >> word;
    std::vector<double> vals;
    double v;
    while (ss >> v) vals.push_back(v);
    if (static_cast<int>(vals.size()) != d)
      throw std::runtime_error(
          "load_pretrained_embeddings: line " + std::to_string(line_no) +
          ": expected " + std::to_string(d) + " values, got " +
          std::to_string(vals.size()));
    if (!vocab.contains(word)) continue;
    const int row = vocab.id(word);
    for (int j = 0; j < d; ++j) embedding.value.set(row, j, vals[static_cast<size_t>(j)]);
    ++loaded;
  }
  return loaded;
}

}  // namespace enatt

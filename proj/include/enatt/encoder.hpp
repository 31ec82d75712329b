#pragma once

#include <span>
#include <string>
#include <vector>

#include "enatt/graph.hpp"
#include "enatt/rng.hpp"
#include "enatt/vocab.hpp"

namespace enatt {

// One direction of the recurrent encoder. The input and forget gates are
// coupled (i_t = 1 - f_t) and the forget/output gates carry diagonal peephole
// connections onto the cell state.
struct LstmDirParams {
  Param Wf, Rf, pf, bf;  // forget gate: input, recurrent, peephole, bias
  Param Wz, Rz, bz;      // cell candidate
  Param Wo, Ro, po, bo;  // output gate

  void init(const std::string& prefix, int d_emb, int d_hidden, Rng& rng,
            Dtype dt);
  void collect(std::vector<Param*>& out);
};

struct EncoderConfig {
  int d_emb = 50;
  int d_hidden = 64;
  double dropout_rate = 0.2;
};

struct EncoderParams {
  Param embedding;  // |vocab| x d_emb
  LstmDirParams fwd, bwd;
  int d_emb = 0;
  int d_hidden = 0;

  void init(int vocab_size, const EncoderConfig& cfg, Rng& rng,
            Dtype dt = Dtype::F64);
  // Fixed registration order: embedding, forward gates, backward gates.
  void collect(std::vector<Param*>& out);
  int u_dim() const { return 2 * d_hidden; }
};

// Variational dropout: one mask per sequence and direction, reused at every
// timestep. Entries are 0 or 1/(1-rate) so expectations are preserved.
struct DropoutMasks {
  Array in_fwd, rec_fwd, in_bwd, rec_bwd;

  static DropoutMasks sample(int d_emb, int d_hidden, double rate, Rng& rng);
};

struct LstmState {
  NodeRef h = kNoNode;
  NodeRef c = kNoNode;
  NodeRef f = kNoNode;  // forget gate activation (i = 1 - f)
  NodeRef i = kNoNode;  // input gate activation
};

// One recurrence step. in_mask/rec_mask may be kNoNode (no dropout, eval
// mode). Params are non-const because backward() accumulates into their
// gradient buffers.
LstmState lstm_cell(Graph& g, NodeRef x_t, NodeRef h_prev, NodeRef c_prev,
                    LstmDirParams& p, NodeRef in_mask, NodeRef rec_mask);

// Runs both directions over the token ids and concatenates the forward
// direction's last hidden state with the backward direction's state at the
// first token: u has dimension 2*d_hidden. masks == nullptr means eval mode
// (no dropout). Throws std::invalid_argument on an empty sequence.
NodeRef encode_utterance(Graph& g, std::span<const int> token_ids,
                         EncoderParams& p, const DropoutMasks* masks);

// Text-format pretrained vectors: one line per word, `word v1 v2 ... v_d`.
// Overwrites embedding rows for words present in both the file and the
// vocabulary; all other rows keep their current (randomly initialized)
// values. Returns the number of rows overwritten. Throws on a missing file,
// a malformed line, or a vector length different from the embedding width.
int load_pretrained_embeddings(const std::string& path, const Vocabulary& vocab,
                               Param& embedding);

}  // namespace enatt

#include "enatt/modelcheck.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "enatt/encoder.hpp"
#include "enatt/rng.hpp"

namespace enatt {

GradCheckReport model_grad_check(const ModelCheckSpec& spec) {
  if (spec.variant < 1 || spec.variant > kNumVariants)
    throw std::invalid_argument("model_grad_check: variant must lie in 1..6");
  if (spec.vocab_size < 3)
    throw std::invalid_argument("model_grad_check: vocab_size must be >= 3");
  if (spec.n_domains < 1)
    throw std::invalid_argument("model_grad_check: n_domains must be >= 1");
  if (spec.n_enabled < 0 || spec.n_enabled > spec.n_domains)
    throw std::invalid_argument(
        "model_grad_check: n_enabled must lie in [0, n_domains]");
  if (spec.seq_len < 1)
    throw std::invalid_argument("model_grad_check: seq_len must be >= 1");
  if (spec.epoch < 0)
    throw std::invalid_argument("model_grad_check: epoch must be >= 0");
  if (spec.dropout_rate < 0.0 || spec.dropout_rate >= 1.0)
    throw std::invalid_argument(
        "model_grad_check: dropout_rate must lie in [0, 1)");

  ModelConfig cfg;
  cfg.vocab_size = spec.vocab_size;
  cfg.n_domains = spec.n_domains;
  cfg.d_emb = spec.d_emb;
  cfg.d_hidden = spec.d_hidden;
  cfg.d_ff = spec.d_ff;
  cfg.dropout_rate = spec.dropout_rate;
  cfg.dtype = Dtype::F64;  // finite differences are meaningful in 64-bit only
  cfg.flags = variant_flags(spec.variant);

  ModelParams student;
  {
    Rng rng(split_seed(spec.seed, 0));
    student.init(cfg, rng);
  }
  // Teacher fixture: an independently initialized network, so distillation
  // targets differ from the student's own attention.
  DistillSnapshot snapshot;
  {
    Rng rng(split_seed(spec.seed, 1));
    ModelParams teacher;
    teacher.init(cfg, rng);
    snapshot.capture(teacher, 0);
  }
  DropoutMasks masks = [&] {
    Rng rng(split_seed(spec.seed, 2));
    return DropoutMasks::sample(cfg.d_emb, cfg.d_hidden, cfg.dropout_rate,
                                rng);
  }();

  Rng fixture_rng(split_seed(spec.seed, 3));
  std::vector<int> ids(static_cast<size_t>(spec.seq_len));
  for (int& id : ids)
    id = 2 + static_cast<int>(fixture_rng.below(
                static_cast<std::uint64_t>(spec.vocab_size - 2)));
  std::vector<int> pool(static_cast<size_t>(spec.n_domains));
  std::iota(pool.begin(), pool.end(), 0);
  fixture_rng.shuffle(pool);
  std::vector<int> enabled(pool.begin(), pool.begin() + spec.n_enabled);
  std::sort(enabled.begin(), enabled.end());
  const int ground_truth = enabled.empty() ? 0 : enabled.front();

  GradCheckOptions opts;
  opts.tolerance = spec.tolerance;
  return grad_check(
      student.all_params(),
      [&](Graph& g) {
        return total_loss(g, student, cfg, ids, ground_truth, enabled,
                          spec.epoch, spec.alpha, spec.temperature, &snapshot,
                          &masks)
            .total;
      },
      opts);
}

}  // namespace enatt

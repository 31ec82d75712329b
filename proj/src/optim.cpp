#include "enatt/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace enatt {

double clip_gradients(std::span<Param* const> params, double threshold,
                      ClipMode mode) {
  if (threshold <= 0.0) throw std::invalid_argument("clip_gradients: threshold must be > 0");
  if (mode == ClipMode::Value) {
    for (Param* p : params) {
      for (double& g : p->grad.values()) {
        if (!std::isfinite(g)) throw std::runtime_error("clip_gradients: non-finite gradient");
        g = std::clamp(g, -threshold, threshold);
      }
    }
    return 1.0;
  }
  double sq = 0.0;
  for (const Param* p : params)
    for (double g : p->grad.values()) sq += g * g;
  if (!std::isfinite(sq))
    throw std::runtime_error("clip_gradients: non-finite gradient norm");
  const double norm = std::sqrt(sq);
  if (norm <= threshold) return 1.0;
  const double scale = threshold / norm;
  for (Param* p : params)
    for (double& g : p->grad.values()) g = p->grad.round(g * scale);
  return scale;
}

void AdamState::init(std::span<Param* const> params) {
  m.clear();
  v.clear();
  step = 0;
  for (const Param* p : params) {
    const Array& a = p->value;
    if (a.ndim() == 1) {
      m.push_back(Array::zeros(a.rows(), a.dtype()));
      v.push_back(Array::zeros(a.rows(), a.dtype()));
    } else {
      m.push_back(Array::zeros(a.rows(), a.cols(), a.dtype()));
      v.push_back(Array::zeros(a.rows(), a.cols(), a.dtype()));
    }
  }
}

void adam_step(std::span<Param* const> params, AdamState& state) {
  if (!state.initialized() || state.m.size() != params.size())
    throw std::runtime_error("adam_step: state not initialized for this parameter set");
  for (size_t k = 0; k < params.size(); ++k)
    if (!state.m[k].same_shape(params[k]->value))
      throw std::runtime_error("adam_step: moment shape mismatch for " + params[k]->name);
  ++state.step;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (size_t k = 0; k < params.size(); ++k) {
    Param& p = *params[k];
    auto pv = p.value.values();
    auto pg = p.grad.values();
    auto pm = state.m[k].values();
    auto ps = state.v[k].values();
    for (size_t i = 0; i < pv.size(); ++i) {
      const double g = pg[i];
      pm[i] = p.value.round(state.beta1 * pm[i] + (1.0 - state.beta1) * g);
      ps[i] = p.value.round(state.beta2 * ps[i] + (1.0 - state.beta2) * g * g);
      const double mhat = pm[i] / bc1;
      const double vhat = ps[i] / bc2;
      pv[i] = p.value.round(pv[i] - state.lr * mhat / (std::sqrt(vhat) + state.eps));
    }
  }
}

Array xavier_init(int rows, int cols, Rng& rng, Dtype dt) {
  if (rows < 1 || cols < 1)
    throw std::invalid_argument("xavier_init: fan_in and fan_out must be >= 1");
  const double bound = std::sqrt(6.0 / (rows + cols));
  Array a = Array::zeros(rows, cols, dt);
  auto v = a.values();
  for (size_t i = 0; i < v.size(); ++i) v[i] = a.round(rng.uniform(-bound, bound));
  return a;
}

Array xavier_init(int len, Rng& rng, Dtype dt) {
  if (len < 1) throw std::invalid_argument("xavier_init: fan_in and fan_out must be >= 1");
  const double bound = std::sqrt(6.0 / (len + 1));
  Array a = Array::zeros(len, dt);
  auto v = a.values();
  for (size_t i = 0; i < v.size(); ++i) v[i] = a.round(rng.uniform(-bound, bound));
  return a;
}

}  // namespace enatt

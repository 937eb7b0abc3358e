#include "profilereg/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace profilereg::nn {

AdamState AdamState::init(const std::vector<NamedTensor>& params, double learning_rate,
                          double clip_norm) {
  if (learning_rate <= 0.0) throw std::invalid_argument("adam: learning rate must be positive");
  AdamState s;
  s.learning_rate = learning_rate;
  s.clip_norm = clip_norm;
  s.m.reserve(params.size());
  s.v.reserve(params.size());
  for (const auto& [name, t] : params) {
    (void)name;
    s.m.emplace_back(t->values.size(), 0.0);
    s.v.emplace_back(t->values.size(), 0.0);
  }
  return s;
}

double clip_gradients(const std::vector<NamedTensor>& params, double max_norm) {
  if (max_norm <= 0.0) throw std::invalid_argument("clip_gradients: max_norm must be positive");
  double sq = 0.0;
  for (const auto& [name, t] : params) {
    (void)name;
    t->ensure_grad();
    for (double g : t->grad) sq += g * g;
  }
  double norm = std::sqrt(sq);
  if (norm <= max_norm) return 1.0;
  double scale = max_norm / norm;
  for (const auto& [name, t] : params) {
    (void)name;
    for (double& g : t->grad) g *= scale;
  }
  return scale;
}

void adam_step(AdamState& state, const std::vector<NamedTensor>& params) {
  if (state.m.size() != params.size()) {
    throw std::invalid_argument("adam_step: state does not match parameter list");
  }
  state.step += 1;
  double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (std::size_t p = 0; p < params.size(); ++p) {
    Tensor* t = params[p].second;
    t->ensure_grad();
    if (state.m[p].size() != t->values.size()) {
      throw std::invalid_argument("adam_step: moment size mismatch for " + params[p].first);
    }
    std::vector<double>& m = state.m[p];
    std::vector<double>& v = state.v[p];
    for (std::size_t i = 0; i < t->values.size(); ++i) {
      double g = t->grad[i];
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g;
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g * g;
      double mhat = m[i] / bc1;
      double vhat = v[i] / bc2;
      t->values[i] -= state.learning_rate * mhat / (std::sqrt(vhat) + state.epsilon);
    }
    t->zero_grad();
  }
}

}  // namespace profilereg::nn

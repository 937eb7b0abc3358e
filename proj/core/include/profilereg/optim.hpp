#pragma once

#include <vector>

#include "profilereg/tensor.hpp"

namespace profilereg::nn {

// Adam with global-norm gradient clipping. Moment buffers run parallel to the
// parameter list handed to init(); callers must keep that list stable.
struct AdamState {
  double learning_rate = 0.0037;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double clip_norm = 5.0;
  long step = 0;
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;

  static AdamState init(const std::vector<NamedTensor>& params, double learning_rate,
                        double clip_norm);
};

// Scales all gradients so their global L2 norm is at most max_norm.
// Returns the applied scale (1.0 when no clipping happened).
double clip_gradients(const std::vector<NamedTensor>& params, double max_norm);

// One bias-corrected Adam update. Gradients are zeroed afterwards.
void adam_step(AdamState& state, const std::vector<NamedTensor>& params);

}  // namespace profilereg::nn

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "profilereg/rng.hpp"
#include "profilereg/tensor.hpp"

namespace profilereg::nn {

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::string worst_param;
  int worst_coord = -1;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  int coords_checked = 0;
};

// Central-difference gradient check. `loss_fn` must run a full forward and
// backward pass, leaving gradients in the parameters' grad buffers, and
// return the loss; it is re-invoked with perturbed parameter values, so it
// must be deterministic. `coords_per_tensor <= 0` checks every coordinate.
// Relative error is |a - n| / max(|a|, |n|, 1e-8).
GradCheckReport grad_check(const std::function<double()>& loss_fn,
                           const std::vector<NamedTensor>& params, double epsilon,
                           int coords_per_tensor, Rng& rng);

}  // namespace profilereg::nn

#include "profilereg/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "profilereg/error.hpp"

namespace profilereg::nn {

GradCheckReport grad_check(const std::function<double()>& loss_fn,
                           const std::vector<NamedTensor>& params, double epsilon,
                           int coords_per_tensor, Rng& rng) {
  if (epsilon <= 0.0) throw std::invalid_argument("grad_check: epsilon must be positive");
  if (params.empty()) throw std::invalid_argument("grad_check: no parameters to check");

  for (const auto& [name, t] : params) {
    (void)name;
    t->zero_grad();
  }
  double base = loss_fn();
  if (!std::isfinite(base)) throw NumericError("grad_check: loss is not finite");

  // Snapshot the analytic gradients before the perturbation runs overwrite them.
  std::vector<std::vector<double>> analytic;
  analytic.reserve(params.size());
  for (const auto& [name, t] : params) {
    (void)name;
    t->ensure_grad();
    analytic.push_back(t->grad);
  }

  GradCheckReport report;
  for (std::size_t p = 0; p < params.size(); ++p) {
    Tensor* t = params[p].second;
    int n = t->size();
    if (n == 0) continue;

    std::vector<int> coords;
    if (coords_per_tensor <= 0 || coords_per_tensor >= n) {
      coords.resize(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) coords[static_cast<std::size_t>(i)] = i;
    } else {
      for (int k = 0; k < coords_per_tensor; ++k) {
        coords.push_back(static_cast<int>(uniform_index(rng, static_cast<std::size_t>(n))));
      }
      std::sort(coords.begin(), coords.end());
      coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
    }

    for (int c : coords) {
      std::size_t ci = static_cast<std::size_t>(c);
      double saved = t->values[ci];
      for (const auto& [name, q] : params) {
        (void)name;
        q->zero_grad();
      }
      t->values[ci] = saved + epsilon;
      double up = loss_fn();
      t->values[ci] = saved - epsilon;
      double down = loss_fn();
      t->values[ci] = saved;
      if (!std::isfinite(up) || !std::isfinite(down)) {
        throw NumericError("grad_check: perturbed loss is not finite at " + params[p].first);
      }
      double numeric = (up - down) / (2.0 * epsilon);
      double a = analytic[p][ci];
      double rel = std::fabs(a - numeric) / std::max({std::fabs(a), std::fabs(numeric), 1e-8});
      ++report.coords_checked;
      if (rel > report.max_rel_error) {
        report.max_rel_error = rel;
        report.worst_param = params[p].first;
        report.worst_coord = c;
        report.worst_analytic = a;
        report.worst_numeric = numeric;
      }
    }
  }

  // Leave the analytic gradients in place for callers that inspect them.
  for (std::size_t p = 0; p < params.size(); ++p) {
    params[p].second->grad = analytic[p];
  }
  return report;
}

}  // namespace profilereg::nn

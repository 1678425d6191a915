#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "audiossl/error.hpp"
#include "audiossl/rng.hpp"

namespace audiossl {

// A parameter block exposed to the finite-difference checker: current values
// (perturbed in place and restored) and the analytic gradient to verify.
struct FdParam {
  double* values;
  const double* grads;
  std::size_t n;
};

// Central-difference gradient verification. loss_fn must be a deterministic
// forward-only evaluation (eval-mode BN or a fixed batch, dropout off) and
// must not touch the analytic gradients. Samples min(n_coords, total)
// coordinates without replacement bias (uniform with replacement over the
// flattened parameter vector) and returns the worst relative error
//   |analytic - fd| / max(|analytic|, |fd|, 0.01 * ||g||_inf, 1e-12),
// the scale floor keeping near-zero coordinates from drowning the check in
// finite-difference round-off.
inline double finite_difference_check(const std::function<double()>& loss_fn,
                                      const std::vector<FdParam>& params,
                                      double eps, std::size_t n_coords,
                                      Rng& rng) {
  if (params.empty()) throw ValueError("finite_difference_check: no parameters");
  std::size_t total = 0;
  double g_inf = 0.0;
  for (const auto& p : params) {
    total += p.n;
    for (std::size_t i = 0; i < p.n; ++i)
      g_inf = std::max(g_inf, std::abs(p.grads[i]));
  }
  if (total == 0) throw ValueError("finite_difference_check: empty parameters");
  const double floor = std::max(0.01 * g_inf, 1e-12);

  double worst = 0.0;
  const std::size_t samples = std::min(n_coords, total * 4);
  for (std::size_t s = 0; s < samples; ++s) {
    std::size_t flat = static_cast<std::size_t>(
        uniform_int(rng, 0, static_cast<std::int64_t>(total) - 1));
    const FdParam* blk = nullptr;
    for (const auto& p : params) {
      if (flat < p.n) {
        blk = &p;
        break;
      }
      flat -= p.n;
    }
    double& coord = blk->values[flat];
    const double saved = coord;
    coord = saved + eps;
    const double lp = loss_fn();
    coord = saved - eps;
    const double lm = loss_fn();
    coord = saved;
    const double fd = (lp - lm) / (2.0 * eps);
    const double a = blk->grads[flat];
    const double rel =
        std::abs(a - fd) / std::max({std::abs(a), std::abs(fd), floor});
    worst = std::max(worst, rel);
  }
  return worst;
}

}  // namespace audiossl

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "meg/registry.hpp"

namespace meg {

struct GradCheckEntry {
  std::string name;
  std::size_t coord = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  double rel_err = 0.0;
};

struct GradCheckReport {
  double max_rel_err = 0.0;
  bool deterministic = true;
  std::size_t coords_checked = 0;
  GradCheckEntry worst;

  bool passed(double tol) const { return deterministic && max_rel_err <= tol; }
};

/// Central-difference verification of the gradients currently accumulated in
/// the registry: the caller runs one forward+backward so that grad(name)
/// holds the analytic gradient of the scalar the closure computes, then this
/// perturbs each parameter coordinate by +-h and compares.
///
/// The closure must evaluate the loss from the registry's current parameter
/// values without touching the gradient accumulators. Non-determinism is
/// detected by evaluating the unperturbed loss twice.
///
/// Tensors larger than `subsample_above` entries are checked on a fixed
/// seeded subset of `subsample_above` coordinates to bound runtime.
GradCheckReport grad_check(const std::function<double()>& loss, ParamRegistry& registry,
                           double h = 1e-5, std::size_t subsample_above = 200,
                           std::uint64_t subsample_seed = 12345);

/// Relative error with an absolute fallback for near-zero pairs: values whose
/// magnitudes both sit below 1e-6 are compared absolutely (central-difference
/// rounding noise would otherwise dominate the ratio).
double gradcheck_rel_err(double analytic, double numeric);

}  // namespace meg

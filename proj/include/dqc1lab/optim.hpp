#pragma once

#include <functional>

#include "dqc1lab/types.hpp"

namespace dqc1lab::optim {

struct NelderMeadOptions {
  double tolerance = 1e-8;  // stop when the simplex value spread falls below this
  int max_evals = 2000;
  double initial_step = 0.25;
};

struct NelderMeadResult {
  RealVector x;
  double value = 0.0;
  int evals = 0;
  bool converged = false;
};

/// Downhill simplex minimization. Deterministic for a fixed start point.
NelderMeadResult nelder_mead(const std::function<double(const RealVector&)>& f,
                             const RealVector& start, const NelderMeadOptions& opts = {});

}  // namespace dqc1lab::optim

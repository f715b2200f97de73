#include "dqc1lab/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace dqc1lab::optim {

NelderMeadResult nelder_mead(const std::function<double(const RealVector&)>& f,
                             const RealVector& start, const NelderMeadOptions& opts) {
  const int n = static_cast<int>(start.size());
  const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;

  std::vector<RealVector> xs;
  std::vector<double> fs;
  xs.reserve(static_cast<size_t>(n) + 1);
  int evals = 0;
  auto eval = [&](const RealVector& x) {
    ++evals;
    return f(x);
  };

  xs.push_back(start);
  fs.push_back(eval(start));
  for (int i = 0; i < n; ++i) {
    RealVector x = start;
    x(i) += opts.initial_step;
    xs.push_back(x);
    fs.push_back(eval(x));
  }

  std::vector<int> order(static_cast<size_t>(n) + 1);
  bool converged = false;
  while (evals < opts.max_evals) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return fs[static_cast<size_t>(a)] < fs[static_cast<size_t>(b)];
    });
    const int best = order.front(), worst = order.back(), second_worst = order[order.size() - 2];
    if (fs[static_cast<size_t>(worst)] - fs[static_cast<size_t>(best)] < opts.tolerance) {
      converged = true;
      break;
    }

    RealVector centroid = RealVector::Zero(n);
    for (int idx : order) {
      if (idx != worst) centroid += xs[static_cast<size_t>(idx)];
    }
    centroid /= static_cast<double>(n);

    const RealVector xr = centroid + alpha * (centroid - xs[static_cast<size_t>(worst)]);
    const double fr = eval(xr);
    if (fr < fs[static_cast<size_t>(best)]) {
      const RealVector xe = centroid + gamma * (centroid - xs[static_cast<size_t>(worst)]);
      const double fe = eval(xe);
      if (fe < fr) {
        xs[static_cast<size_t>(worst)] = xe;
        fs[static_cast<size_t>(worst)] = fe;
      } else {
        xs[static_cast<size_t>(worst)] = xr;
        fs[static_cast<size_t>(worst)] = fr;
      }
      continue;
    }
    if (fr < fs[static_cast<size_t>(second_worst)]) {
      xs[static_cast<size_t>(worst)] = xr;
      fs[static_cast<size_t>(worst)] = fr;
      continue;
    }
    const RealVector xc = centroid + rho * (xs[static_cast<size_t>(worst)] - centroid);
    const double fc = eval(xc);
    if (fc < fs[static_cast<size_t>(worst)]) {
      xs[static_cast<size_t>(worst)] = xc;
      fs[static_cast<size_t>(worst)] = fc;
      continue;
    }
    // shrink toward the best vertex
    for (int idx : order) {
      if (idx == best) continue;
      xs[static_cast<size_t>(idx)] =
          xs[static_cast<size_t>(best)] +
          sigma * (xs[static_cast<size_t>(idx)] - xs[static_cast<size_t>(best)]);
      fs[static_cast<size_t>(idx)] = eval(xs[static_cast<size_t>(idx)]);
      if (evals >= opts.max_evals) break;
    }
  }

  NelderMeadResult result;
  const auto best_it = std::min_element(fs.begin(), fs.end());
  result.value = *best_it;
  result.x = xs[static_cast<size_t>(std::distance(fs.begin(), best_it))];
  result.evals = evals;
  result.converged = converged;
  return result;
}

}  // namespace dqc1lab::optim

#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace gphase {

struct NelderMeadOptions {
  double diameter_tol = 1e-5;
  double fspread_tol = 1e-10;
  std::size_t max_iter = 1000;
};

struct NelderMeadResult {
  std::vector<double> x;
  double f = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

// Derivative-free simplex descent. Converged when the simplex max-norm
// diameter and the best-worst value spread both drop below their
// tolerances.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             const std::vector<double>& x0,
                             const std::vector<double>& step,
                             const NelderMeadOptions& opts = {});

}  // namespace gphase

#include "gphase/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gphase {

namespace {

struct Vertex {
  std::vector<double> x;
  double f;
};

}  // namespace

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             const std::vector<double>& x0,
                             const std::vector<double>& step,
                             const NelderMeadOptions& opts) {
  const std::size_t dim = x0.size();
  if (dim == 0 || step.size() != dim) {
    throw std::invalid_argument("nelder_mead: bad start or step");
  }

  std::vector<Vertex> simplex(dim + 1);
  simplex[0] = {x0, f(x0)};
  for (std::size_t i = 0; i < dim; ++i) {
    std::vector<double> x = x0;
    x[i] += step[i];
    simplex[i + 1] = {x, f(x)};
  }

  auto by_value = [](const Vertex& a, const Vertex& b) { return a.f < b.f; };
  NelderMeadResult res;
  for (res.iterations = 0; res.iterations < opts.max_iter; ++res.iterations) {
    std::sort(simplex.begin(), simplex.end(), by_value);

    double diam = 0.0;
    for (std::size_t i = 1; i <= dim; ++i) {
      for (std::size_t j = 0; j < dim; ++j) {
        diam = std::max(diam, std::abs(simplex[i].x[j] - simplex[0].x[j]));
      }
    }
    double spread = simplex[dim].f - simplex[0].f;
    if (diam < opts.diameter_tol && spread < opts.fspread_tol) {
      res.converged = true;
      break;
    }

    std::vector<double> centroid(dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t j = 0; j < dim; ++j) centroid[j] += simplex[i].x[j];
    }
    for (double& c : centroid) c /= static_cast<double>(dim);

    auto blend = [&](double t) {
      std::vector<double> x(dim);
      for (std::size_t j = 0; j < dim; ++j) {
        x[j] = centroid[j] + t * (simplex[dim].x[j] - centroid[j]);
      }
      return x;
    };

    std::vector<double> xr = blend(-1.0);
    double fr = f(xr);
    if (fr < simplex[0].f) {
      std::vector<double> xe = blend(-2.0);
      double fe = f(xe);
      if (fe < fr) {
        simplex[dim] = {std::move(xe), fe};
      } else {
        simplex[dim] = {std::move(xr), fr};
      }
      continue;
    }
    if (fr < simplex[dim - 1].f) {
      simplex[dim] = {std::move(xr), fr};
      continue;
    }
    bool outside = fr < simplex[dim].f;
    std::vector<double> xc = blend(outside ? -0.5 : 0.5);
    double fc = f(xc);
    if (fc < std::min(fr, simplex[dim].f)) {
      simplex[dim] = {std::move(xc), fc};
      continue;
    }
    // Shrink toward the best vertex.
    for (std::size_t i = 1; i <= dim; ++i) {
      for (std::size_t j = 0; j < dim; ++j) {
        simplex[i].x[j] = simplex[0].x[j] + 0.5 * (simplex[i].x[j] - simplex[0].x[j]);
      }
      simplex[i].f = f(simplex[i].x);
    }
  }

  std::sort(simplex.begin(), simplex.end(), by_value);
  res.x = simplex[0].x;
  res.f = simplex[0].f;
  return res;
}

}  // namespace gphase

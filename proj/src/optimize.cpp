#include "moran/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace moran {

namespace {

void project(std::vector<double>& x, const Box& box) {
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], box.lower[i], box.upper[i]);
}

}  // namespace

OptimResult nelder_mead(const Objective& f, std::vector<double> start, const Box& box,
                        const NelderMeadOptions& options) {
  const std::size_t dim = start.size();
  OptimResult result;
  auto eval = [&](std::vector<double>& x) {
    project(x, box);
    ++result.evaluations;
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  std::vector<std::vector<double>> simplex(dim + 1, start);
  std::vector<double> values(dim + 1);
  values[0] = eval(simplex[0]);
  for (std::size_t i = 0; i < dim; ++i) {
    const double step = i < options.initial_step.size() ? options.initial_step[i] : 0.1;
    auto& v = simplex[i + 1];
    v[i] += step;
    if (v[i] > box.upper[i]) v[i] = simplex[0][i] - step;
    values[i + 1] = eval(v);
  }

  std::vector<std::size_t> order(dim + 1);
  std::vector<double> centroid(dim), trial(dim), trial2(dim);
  for (result.iterations = 0; result.iterations < options.max_iterations; ++result.iterations) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[dim - 1];

    const double spread = values[worst] - values[best];
    double extent = 0.0;
    for (std::size_t i = 0; i <= dim; ++i)
      for (std::size_t d = 0; d < dim; ++d)
        extent = std::max(extent, std::abs(simplex[i][d] - simplex[best][d]));
    if (std::isfinite(values[best]) &&
        ((spread <= options.ftol && extent <= options.xtol) || spread <= options.flat_ftol)) {
      result.converged = true;
      break;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= dim; ++i) {
      if (i == worst) continue;
      for (std::size_t d = 0; d < dim; ++d) centroid[d] += simplex[i][d] / static_cast<double>(dim);
    }
    for (std::size_t d = 0; d < dim; ++d) trial[d] = centroid[d] + (centroid[d] - simplex[worst][d]);
    const double reflected = eval(trial);

    if (reflected < values[best]) {
      for (std::size_t d = 0; d < dim; ++d) trial2[d] = centroid[d] + 2.0 * (centroid[d] - simplex[worst][d]);
      const double expanded = eval(trial2);
      if (expanded < reflected) {
        simplex[worst] = trial2;
        values[worst] = expanded;
      } else {
        simplex[worst] = trial;
        values[worst] = reflected;
      }
      continue;
    }
    if (reflected < values[second]) {
      simplex[worst] = trial;
      values[worst] = reflected;
      continue;
    }

    const bool outside = reflected < values[worst];
    for (std::size_t d = 0; d < dim; ++d) {
      trial2[d] = outside ? centroid[d] + 0.5 * (trial[d] - centroid[d])
                          : centroid[d] + 0.5 * (simplex[worst][d] - centroid[d]);
    }
    const double contracted = eval(trial2);
    if (contracted < std::min(reflected, values[worst])) {
      simplex[worst] = trial2;
      values[worst] = contracted;
      continue;
    }

    // Shrink towards the best vertex.
    for (std::size_t i = 0; i <= dim; ++i) {
      if (i == best) continue;
      for (std::size_t d = 0; d < dim; ++d)
        simplex[i][d] = simplex[best][d] + 0.5 * (simplex[i][d] - simplex[best][d]);
      values[i] = eval(simplex[i]);
    }
  }

  const auto best = static_cast<std::size_t>(
      std::min_element(values.begin(), values.end()) - values.begin());
  result.x = simplex[best];
  result.value = values[best];
  return result;
}

}  // namespace moran

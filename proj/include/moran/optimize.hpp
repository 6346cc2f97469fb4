#pragma once

#include <functional>
#include <span>
#include <vector>

namespace moran {

struct Box {
  std::vector<double> lower;
  std::vector<double> upper;
};

struct NelderMeadOptions {
  /// Converged once the simplex objective spread is below ftol and its
  /// extent below xtol, or the spread alone falls below flat_ftol.
  double ftol = 1e-8;
  double xtol = 1e-4;
  double flat_ftol = 1e-12;
  int max_iterations = 2000;
  /// Per-coordinate size of the initial simplex.
  std::vector<double> initial_step;
};

struct OptimResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;

/// Box-constrained Nelder-Mead minimisation. Trial points are projected onto
/// the box; non-finite objective values are treated as +infinity.
OptimResult nelder_mead(const Objective& f, std::vector<double> start, const Box& box,
                        const NelderMeadOptions& options = {});

}  // namespace moran

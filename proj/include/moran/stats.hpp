#pragma once

#include <span>
#include <string>
#include <vector>

namespace moran {

/// One row of a coefficient table (Estimate, SE, t_value, p_value).
struct CoefRow {
  std::string name;
  double estimate = 0.0;
  double se = 0.0;
  double t_value = 0.0;
  double p_value = 0.0;
};

using CoefTable = std::vector<CoefRow>;

struct NamedValue {
  std::string name;
  double value = 0.0;
};

/// Two-sided Student-t tail probability P(|T| >= |t|).
double student_t_p_value(double t, double df);

/// Two-sided standard normal tail probability.
double normal_p_value(double z);

/// Linearly interpolated order statistic of sorted data (the "type 7" rule).
double quantile_type7(std::span<const double> sorted, double prob);

/// Sorts a copy and applies quantile_type7.
double quantile_type7_unsorted(std::vector<double> values, double prob);

}  // namespace moran

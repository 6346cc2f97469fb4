#pragma once

#include <Eigen/Dense>

#include "moran/geometry.hpp"

namespace moran {

enum class ConnectivityKind { exp_kernel, knn, user_supplied };

const char* to_string(ConnectivityKind kind) noexcept;

/// Nonnegative proximity matrix C with a zero diagonal plus its provenance.
struct ConnectivityMatrix {
  Eigen::MatrixXd c;
  ConnectivityKind kind = ConnectivityKind::user_supplied;
  double range = 0.0;  // exp kernel only
  int k = 0;           // knn only

  Eigen::Index size() const noexcept { return c.rows(); }
  bool is_symmetric() const;
};

/// Doubly-centred connectivity M C M with M = I - 11'/N.
struct CenteredMatrix {
  Eigen::MatrixXd mcm;
};

/// Off-diagonal entries exp(-d_ij / r); the diagonal is forced to zero.
ConnectivityMatrix exp_kernel(DistanceMatrix d, double r);

/// Exponential kernel whose range is the longest MST edge of the sample.
ConnectivityMatrix distance_connectivity(const CoordinateSet& coords);

/// (C + C') / 2. Returns the input unchanged when it is already symmetric.
ConnectivityMatrix symmetrize(ConnectivityMatrix c);

/// Validates a user matrix (square, finite, nonnegative, zero diagonal) and
/// symmetrises it.
ConnectivityMatrix user_connectivity(Eigen::MatrixXd c);

/// M C M by subtracting row means and column means and adding back the grand
/// mean; M itself is never formed.
CenteredMatrix double_center(const ConnectivityMatrix& c);
CenteredMatrix double_center(ConnectivityMatrix&& c);

}  // namespace moran

#pragma once

#include <Eigen/Dense>

namespace moran::detail {

/// Full symmetric eigen-decomposition via LAPACK dsyevd using the lower
/// triangle of `a`. On return `a` holds the eigenvectors (columns) and the
/// result holds eigenvalues in ascending order.
Eigen::VectorXd symmetric_eigen_inplace(Eigen::MatrixXd& a);

}  // namespace moran::detail

#include "moran/connectivity.hpp"

#include <cmath>
#include <string>

#include "moran/errors.hpp"

namespace moran {

namespace {
constexpr const char* kModule = "connectivity";
}

const char* to_string(ConnectivityKind kind) noexcept {
  switch (kind) {
    case ConnectivityKind::exp_kernel:
      return "exp_kernel";
    case ConnectivityKind::knn:
      return "knn";
    case ConnectivityKind::user_supplied:
      return "user_supplied";
  }
  return "unknown";
}

bool ConnectivityMatrix::is_symmetric() const {
  if (c.rows() != c.cols()) return false;
  for (Eigen::Index j = 0; j < c.cols(); ++j)
    for (Eigen::Index i = j + 1; i < c.rows(); ++i)
      if (c(i, j) != c(j, i)) return false;
  return true;
}

ConnectivityMatrix exp_kernel(DistanceMatrix d, double r) {
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw InputError(kModule, "kernel range must be positive and finite, got " +
                                  std::to_string(r));
  }
  if (d.rows() != d.cols()) throw InputError(kModule, "distance matrix must be square");
  const double inv_r = 1.0 / r;
  d = (-d.array() * inv_r).exp().matrix();
  d.diagonal().setZero();
  ConnectivityMatrix out;
  out.c = std::move(d);
  out.kind = ConnectivityKind::exp_kernel;
  out.range = r;
  return out;
}

ConnectivityMatrix distance_connectivity(const CoordinateSet& coords) {
  const double r = mst_max_edge(coords);
  if (!(r > 0.0)) {
    throw InputError(kModule, "all sites coincide; the kernel range would be zero");
  }
  return exp_kernel(pairwise_distances(coords), r);
}

ConnectivityMatrix symmetrize(ConnectivityMatrix c) {
  if (c.c.rows() != c.c.cols()) throw InputError(kModule, "connectivity must be square");
  if (c.is_symmetric()) return c;
  const Eigen::Index n = c.c.rows();
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double avg = 0.5 * (c.c(i, j) + c.c(j, i));
      c.c(i, j) = avg;
      c.c(j, i) = avg;
    }
  }
  return c;
}

ConnectivityMatrix user_connectivity(Eigen::MatrixXd c) {
  if (c.rows() != c.cols()) {
    throw InputError(kModule, "connectivity matrix must be square, got " +
                                  std::to_string(c.rows()) + "x" + std::to_string(c.cols()));
  }
  for (Eigen::Index j = 0; j < c.cols(); ++j) {
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
      const double v = c(i, j);
      const std::string where = " at (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
      if (!std::isfinite(v)) throw InputError(kModule, "non-finite entry" + where);
      if (v < 0.0) throw InputError(kModule, "negative proximity" + where);
      if (i == j && v != 0.0) throw InputError(kModule, "nonzero diagonal" + where);
    }
  }
  ConnectivityMatrix out;
  out.c = std::move(c);
  out.kind = ConnectivityKind::user_supplied;
  return symmetrize(std::move(out));
}

CenteredMatrix double_center(const ConnectivityMatrix& c) {
  ConnectivityMatrix copy = c;
  return double_center(std::move(copy));
}

CenteredMatrix double_center(ConnectivityMatrix&& c) {
  if (c.c.rows() != c.c.cols()) throw InputError(kModule, "connectivity must be square");
  const bool symmetric = c.is_symmetric();
  Eigen::MatrixXd m = std::move(c.c);
  const Eigen::Index n = m.rows();
  const Eigen::VectorXd row_mean = m.rowwise().mean();
  const Eigen::VectorXd col_mean =
      symmetric ? row_mean : Eigen::VectorXd(m.colwise().mean().transpose());
  const double grand = row_mean.mean();
  // (r_i + c_j) is commutative, so a symmetric C yields a bitwise-symmetric result.
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) m(i, j) = m(i, j) - (row_mean(i) + col_mean(j)) + grand;
  return CenteredMatrix{std::move(m)};
}

}  // namespace moran

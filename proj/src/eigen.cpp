#include "moran/eigen.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "lapack.hpp"
#include "moran/errors.hpp"

namespace moran {

namespace {
constexpr const char* kModule = "eigen";
constexpr double kDegenerateClusterTolerance = 1e-9;
}  // namespace

namespace detail {

Eigen::VectorXd symmetric_eigen_inplace(Eigen::MatrixXd& a) {
  const auto n = static_cast<lapack_int>(a.rows());
  Eigen::VectorXd w(a.rows());
  if (n == 0) return w;
  const lapack_int info =
      LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, a.data(), n, w.data());
  if (info != 0) {
    throw InputError(kModule, "symmetric eigensolver failed (info=" + std::to_string(info) + ")");
  }
  return w;
}

}  // namespace detail

const char* to_string(EigenMode mode) noexcept {
  return mode == EigenMode::exact ? "exact" : "nystrom";
}

void canonicalize_eigenvectors(Eigen::MatrixXd& vectors, const Eigen::VectorXd& values) {
  const Eigen::Index cols = vectors.cols();
  for (Eigen::Index l = 0; l < cols; ++l) {
    Eigen::Index arg = 0;
    vectors.col(l).cwiseAbs().maxCoeff(&arg);
    if (vectors(arg, l) < 0.0) vectors.col(l) = -vectors.col(l);
  }
  if (cols < 2) return;

  // Within numerically tied eigenvalues the column order is lexicographic.
  const double scale = std::abs(values(0));
  Eigen::Index begin = 0;
  while (begin < cols) {
    Eigen::Index end = begin + 1;
    while (end < cols && values(end - 1) - values(end) <= kDegenerateClusterTolerance * scale) ++end;
    if (end - begin > 1) {
      std::vector<Eigen::Index> order(static_cast<std::size_t>(end - begin));
      std::iota(order.begin(), order.end(), begin);
      std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
          if (vectors(i, a) != vectors(i, b)) return vectors(i, a) > vectors(i, b);
        }
        return false;
      });
      const Eigen::MatrixXd block = vectors.middleCols(begin, end - begin);
      for (std::size_t m = 0; m < order.size(); ++m) {
        vectors.col(begin + static_cast<Eigen::Index>(m)) = block.col(order[m] - begin);
      }
    }
    begin = end;
  }
}

EigenBasis meigen(const ConnectivityMatrix& c, double threshold,
                  std::optional<Eigen::Index> max_vectors) {
  const Eigen::Index n = c.size();
  if (c.c.rows() != c.c.cols()) throw InputError(kModule, "connectivity must be square");
  if (n < 3) throw InputError(kModule, "eigenvector extraction needs at least 3 sites");
  if (!(threshold >= 0.0 && threshold < 1.0)) {
    throw InputError(kModule, "threshold must lie in [0, 1), got " + std::to_string(threshold));
  }
  if (max_vectors && *max_vectors < 1) throw InputError(kModule, "enum must be positive");

  ConnectivityMatrix sym = symmetrize(c);
  const ConnectivityKind kind = sym.kind;
  Eigen::MatrixXd a = double_center(std::move(sym)).mcm;
  const Eigen::VectorXd ascending = detail::symmetric_eigen_inplace(a);

  const double lambda1 = ascending(n - 1);
  if (!(lambda1 > 0.0)) {
    throw InputError(kModule, "degenerate input: no positive eigenvalue of the centred connectivity");
  }
  const double cut = threshold > 0.0 ? threshold : kPositiveEigenvalueTolerance;
  Eigen::Index keep = 0;
  while (keep < n && ascending(n - 1 - keep) / lambda1 > cut) ++keep;
  if (max_vectors) keep = std::min(keep, *max_vectors);

  EigenBasis basis;
  basis.mode = EigenMode::exact;
  basis.source_kind = kind;
  basis.values.resize(keep);
  basis.vectors.resize(n, keep);
  for (Eigen::Index l = 0; l < keep; ++l) {
    basis.values(l) = ascending(n - 1 - l);
    basis.vectors.col(l) = a.col(n - 1 - l);
  }
  double other = 0.0;
  for (Eigen::Index l = keep; l < n; ++l) other += ascending(n - 1 - l);
  basis.other_eigenvalues_sum = other;
  canonicalize_eigenvectors(basis.vectors, basis.values);
  return basis;
}

EigenBasis meigen(const CoordinateSet& coords, double threshold,
                  std::optional<Eigen::Index> max_vectors) {
  if (coords.size() < 3) throw InputError(kModule, "eigenvector extraction needs at least 3 sites");
  return meigen(distance_connectivity(coords), threshold, max_vectors);
}

double moran_coefficient(const Eigen::VectorXd& e, const ConnectivityMatrix& c) {
  const Eigen::Index n = c.size();
  if (e.size() != n) throw InputError(kModule, "vector length does not match connectivity size");
  const double norm = e.norm();
  if (!(norm > 0.0)) throw InputError(kModule, "Moran coefficient of a zero vector is undefined");
  if (std::abs(e.sum()) / (std::sqrt(static_cast<double>(n)) * norm) > 1e-8) {
    throw InputError(kModule, "Moran coefficient requires a mean-zero vector");
  }
  const double total = c.c.sum();
  if (!(total > 0.0)) throw InputError(kModule, "connectivity has no positive weight");
  return static_cast<double>(n) / total * e.dot(c.c * e) / (norm * norm);
}

}  // namespace moran

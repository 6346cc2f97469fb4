#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Dense>

#include "moran/connectivity.hpp"
#include "moran/geometry.hpp"

namespace moran {

enum class EigenMode { exact, nystrom };

const char* to_string(EigenMode mode) noexcept;

/// Retained Moran eigenvectors (columns, orthonormal, mean zero) and their
/// eigenvalues in descending order. All retained eigenvalues are positive.
struct EigenBasis {
  Eigen::MatrixXd vectors;
  Eigen::VectorXd values;
  EigenMode mode = EigenMode::exact;
  ConnectivityKind source_kind = ConnectivityKind::exp_kernel;
  /// Sum of the eigenvalues that were not retained. NaN for Nystrom bases.
  double other_eigenvalues_sum = 0.0;

  Eigen::Index sample_size() const noexcept { return vectors.rows(); }
  Eigen::Index count() const noexcept { return vectors.cols(); }
};

/// Ratio below which an eigenvalue counts as zero when threshold == 0.
inline constexpr double kPositiveEigenvalueTolerance = 1e-8;

/// Exact eigen-decomposition of M C M.
///
/// Keeps eigenpairs with lambda_l / lambda_1 > threshold; a zero threshold
/// keeps every numerically positive eigenvalue. `max_vectors` additionally
/// caps the number of leading eigenpairs kept. An asymmetric C is symmetrised
/// first. Each eigenvector is signed so that its largest-magnitude entry is
/// positive.
EigenBasis meigen(const ConnectivityMatrix& c, double threshold = 0.0,
                  std::optional<Eigen::Index> max_vectors = std::nullopt);

/// Convenience: exponential kernel with MST range, then meigen.
EigenBasis meigen(const CoordinateSet& coords, double threshold = 0.0,
                  std::optional<Eigen::Index> max_vectors = std::nullopt);

struct NystromOptions {
  /// Number of knots and the cap on returned eigenpairs.
  Eigen::Index enum_count = 200;
  std::uint64_t seed = 20170913;
  int kmeans_max_iterations = 100;
};

/// Approximate leading eigenpairs of M C M for the MST-range exponential
/// kernel by Nystrom extension from k-means knots. Never forms an N x N matrix.
EigenBasis meigen_f(const CoordinateSet& coords, const NystromOptions& options = {});

/// k-means++ seeded Lloyd iterations; returns k centres (rows). Deterministic
/// for a fixed seed.
Eigen::MatrixX2d kmeans_centers(const CoordinateSet& coords, Eigen::Index k,
                                std::uint64_t seed, int max_iterations);

/// Moran coefficient (N / 1'C1) * e'Ce / e'e of a mean-zero, nonzero vector.
double moran_coefficient(const Eigen::VectorXd& e, const ConnectivityMatrix& c);

/// Applies the deterministic sign and tie-ordering convention in place.
/// `values` must already be sorted in descending order.
void canonicalize_eigenvectors(Eigen::MatrixXd& vectors, const Eigen::VectorXd& values);

}  // namespace moran

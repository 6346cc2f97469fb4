#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "lapack.hpp"
#include "moran/eigen.hpp"
#include "moran/errors.hpp"

namespace moran {

namespace {

constexpr const char* kModule = "eigen";
constexpr double kKnotSpectrumCutoff = 1e-10;

double squared_distance(const Eigen::MatrixX2d& a, Eigen::Index i, const Eigen::MatrixX2d& b,
                        Eigen::Index j) {
  const double dx = a(i, 0) - b(j, 0);
  const double dy = a(i, 1) - b(j, 1);
  return dx * dx + dy * dy;
}

Eigen::MatrixXd exp_cross_kernel(const Eigen::MatrixX2d& a, const Eigen::MatrixX2d& b,
                                 double range) {
  Eigen::MatrixXd k(a.rows(), b.rows());
  const double inv_r = 1.0 / range;
  for (Eigen::Index j = 0; j < b.rows(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      k(i, j) = std::exp(-std::sqrt(squared_distance(a, i, b, j)) * inv_r);
  return k;
}

// Eigenpairs of a small symmetric matrix, descending.
void descending_eigen(Eigen::MatrixXd& a, Eigen::VectorXd& values) {
  values = detail::symmetric_eigen_inplace(a).reverse();
  a = a.rowwise().reverse().eval();
}

}  // namespace

Eigen::MatrixX2d kmeans_centers(const CoordinateSet& coords, Eigen::Index k, std::uint64_t seed,
                                int max_iterations) {
  const Eigen::MatrixX2d& p = coords.points();
  const Eigen::Index n = p.rows();
  if (k < 1 || k > n) throw InputError(kModule, "k-means needs 1 <= k <= n");
  if (k == n) return p;

  std::mt19937_64 rng(seed);
  Eigen::MatrixX2d centers(k, 2);

  // k-means++ seeding.
  std::vector<double> d2(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
  centers.row(0) = p.row(first(rng));
  for (Eigen::Index c = 1; c < k; ++c) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      auto& di = d2[static_cast<std::size_t>(i)];
      di = std::min(di, squared_distance(p, i, centers, c - 1));
      total += di;
    }
    Eigen::Index pick = 0;
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double target = u(rng);
      for (pick = 0; pick < n - 1; ++pick) {
        target -= d2[static_cast<std::size_t>(pick)];
        if (target <= 0.0) break;
      }
    } else {
      pick = first(rng);
    }
    centers.row(c) = p.row(pick);
  }

  std::vector<Eigen::Index> label(static_cast<std::size_t>(n), -1);
  std::vector<double> nearest(static_cast<std::size_t>(n));
  for (int iter = 0; iter < max_iterations; ++iter) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::Index best = 0;
      double best_d = squared_distance(p, i, centers, 0);
      for (Eigen::Index c = 1; c < k; ++c) {
        const double d = squared_distance(p, i, centers, c);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      nearest[static_cast<std::size_t>(i)] = best_d;
      if (label[static_cast<std::size_t>(i)] != best) {
        label[static_cast<std::size_t>(i)] = best;
        changed = true;
      }
    }
    if (!changed && iter > 0) break;

    Eigen::MatrixX2d sums = Eigen::MatrixX2d::Zero(k, 2);
    std::vector<Eigen::Index> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto c = label[static_cast<std::size_t>(i)];
      sums.row(c) += p.row(i);
      ++counts[static_cast<std::size_t>(c)];
    }
    for (Eigen::Index c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        centers.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
      } else {
        // Empty cluster: move it to the point farthest from its centre.
        const auto far = std::max_element(nearest.begin(), nearest.end()) - nearest.begin();
        centers.row(c) = p.row(far);
        nearest[static_cast<std::size_t>(far)] = 0.0;
        label[static_cast<std::size_t>(far)] = c;
      }
    }
  }
  return centers;
}

EigenBasis meigen_f(const CoordinateSet& coords, const NystromOptions& options) {
  const Eigen::Index n = coords.size();
  const Eigen::Index m = options.enum_count;
  if (n < 3) throw InputError(kModule, "eigenvector extraction needs at least 3 sites");
  if (m < 1) throw InputError(kModule, "enum must be positive");
  if (m > n) {
    throw InputError(kModule, "enum (" + std::to_string(m) + ") exceeds the sample size (" +
                                  std::to_string(n) + ")");
  }
  const double range = mst_max_edge(coords);
  if (!(range > 0.0)) throw InputError(kModule, "all sites coincide; the kernel range would be zero");

  const Eigen::MatrixX2d knots =
      kmeans_centers(coords, m, options.seed, options.kmeans_max_iterations);

  // Knot kernel keeps its unit diagonal: C = K - I, so on mean-zero vectors
  // M C M = M K M - I and the eigenvalues shift by one.
  Eigen::MatrixXd kk = exp_cross_kernel(knots, knots, range);
  Eigen::VectorXd mu;
  descending_eigen(kk, mu);
  Eigen::Index rank = 0;
  while (rank < mu.size() && mu(rank) > kKnotSpectrumCutoff * mu(0)) ++rank;

  // B B' = K_nk K_kk^+ K_kn, then centre B so B_c B_c' = M K_hat M.
  Eigen::MatrixXd b = exp_cross_kernel(coords.points(), knots, range) * kk.leftCols(rank);
  b = b * mu.head(rank).cwiseSqrt().cwiseInverse().asDiagonal();
  b.rowwise() -= b.colwise().mean();

  Eigen::MatrixXd g = b.transpose() * b;
  Eigen::VectorXd s2;
  descending_eigen(g, s2);

  const Eigen::Index cap = std::min(m, n - 1);
  Eigen::Index keep = 0;
  while (keep < cap && keep < s2.size() && s2(keep) - 1.0 > 0.0) ++keep;
  if (keep == 0) throw InputError(kModule, "degenerate input: no positive approximate eigenvalue");

  Eigen::MatrixXd u = b * g.leftCols(keep) * s2.head(keep).cwiseSqrt().cwiseInverse().asDiagonal();
  u.rowwise() -= u.colwise().mean();

  // Re-orthonormalise, then Rayleigh-Ritz on the span.
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(u);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, keep);
  const Eigen::MatrixXd bq = b.transpose() * q;
  Eigen::MatrixXd h = bq.transpose() * bq;
  h.diagonal().array() -= 1.0;
  h = (0.5 * (h + h.transpose())).eval();
  Eigen::VectorXd lambda;
  descending_eigen(h, lambda);

  Eigen::Index positive = 0;
  while (positive < lambda.size() && lambda(positive) > kPositiveEigenvalueTolerance * lambda(0))
    ++positive;
  if (positive == 0) throw InputError(kModule, "degenerate input: no positive approximate eigenvalue");

  EigenBasis basis;
  basis.mode = EigenMode::nystrom;
  basis.source_kind = ConnectivityKind::exp_kernel;
  basis.values = lambda.head(positive);
  basis.vectors = q * h.leftCols(positive);
  basis.other_eigenvalues_sum = std::numeric_limits<double>::quiet_NaN();
  canonicalize_eigenvectors(basis.vectors, basis.values);
  return basis;
}

}  // namespace moran

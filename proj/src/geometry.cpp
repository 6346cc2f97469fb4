#include "moran/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "moran/connectivity.hpp"
#include "moran/errors.hpp"

namespace moran {

namespace {

constexpr const char* kModule = "geometry";

// Prim's algorithm on an implicit complete graph; `dist(i, j)` supplies weights.
template <typename Dist>
double prim_max_edge(Eigen::Index n, Dist&& dist) {
  if (n < 2) throw InputError(kModule, "minimum spanning tree needs at least 2 points");
  std::vector<double> best(static_cast<std::size_t>(n),
                           std::numeric_limits<double>::infinity());
  std::vector<char> in_tree(static_cast<std::size_t>(n), 0);
  Eigen::Index current = 0;
  in_tree[0] = 1;
  double longest = 0.0;
  for (Eigen::Index added = 1; added < n; ++added) {
    Eigen::Index next = -1;
    double next_w = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (in_tree[static_cast<std::size_t>(j)]) continue;
      const double w = dist(current, j);
      auto& b = best[static_cast<std::size_t>(j)];
      if (w < b) b = w;
      if (b < next_w) {
        next_w = b;
        next = j;
      }
    }
    in_tree[static_cast<std::size_t>(next)] = 1;
    longest = std::max(longest, next_w);
    current = next;
  }
  return longest;
}

}  // namespace

CoordinateSet::CoordinateSet(Eigen::MatrixX2d points) : points_(std::move(points)) {
  if (points_.rows() < 2) {
    throw InputError(kModule, "a coordinate set needs at least 2 points, got " +
                                  std::to_string(points_.rows()));
  }
  for (Eigen::Index i = 0; i < points_.rows(); ++i) {
    if (!std::isfinite(points_(i, 0)) || !std::isfinite(points_(i, 1))) {
      throw InputError(kModule, "non-finite coordinate at point " + std::to_string(i));
    }
  }
}

double CoordinateSet::distance(Eigen::Index i, Eigen::Index j) const {
  const double dx = points_(i, 0) - points_(j, 0);
  const double dy = points_(i, 1) - points_(j, 1);
  return std::sqrt(dx * dx + dy * dy);
}

DistanceMatrix pairwise_distances(const CoordinateSet& coords) {
  const Eigen::Index n = coords.size();
  DistanceMatrix d(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    d(j, j) = 0.0;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double v = coords.distance(i, j);
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return d;
}

double mst_max_edge(const DistanceMatrix& d) {
  if (d.rows() != d.cols()) throw InputError(kModule, "distance matrix must be square");
  if (!d.allFinite()) throw InputError(kModule, "distance matrix has non-finite entries");
  return prim_max_edge(d.rows(), [&](Eigen::Index i, Eigen::Index j) { return d(i, j); });
}

double mst_max_edge(const CoordinateSet& coords) {
  // Squared distances order edges identically; take the root once at the end.
  const Eigen::MatrixX2d& p = coords.points();
  const double longest_sq = prim_max_edge(coords.size(), [&](Eigen::Index i, Eigen::Index j) {
    const double dx = p(i, 0) - p(j, 0);
    const double dy = p(i, 1) - p(j, 1);
    return dx * dx + dy * dy;
  });
  return std::sqrt(longest_sq);
}

ConnectivityMatrix knn_graph(const CoordinateSet& coords, int k) {
  const Eigen::Index n = coords.size();
  if (k < 1 || k >= n) {
    throw InputError(kModule, "k must satisfy 1 <= k < n (k=" + std::to_string(k) +
                                  ", n=" + std::to_string(n) + ")");
  }
  ConnectivityMatrix out;
  out.kind = ConnectivityKind::knn;
  out.k = k;
  out.c = Eigen::MatrixXd::Zero(n, n);

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n - 1));
  std::vector<double> dist(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index slot = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      dist[static_cast<std::size_t>(j)] = coords.distance(i, j);
      if (j != i) order[static_cast<std::size_t>(slot++)] = j;
    }
    std::partial_sort(order.begin(), order.begin() + k, order.end(),
                      [&](Eigen::Index a, Eigen::Index b) {
                        const double da = dist[static_cast<std::size_t>(a)];
                        const double db = dist[static_cast<std::size_t>(b)];
                        return da < db || (da == db && a < b);
                      });
    for (int m = 0; m < k; ++m) out.c(i, order[static_cast<std::size_t>(m)]) = 1.0;
  }
  return out;
}

}  // namespace moran

#pragma once

#include <Eigen/Dense>

namespace moran {

/// Planar sample locations, one row per site (columns px, py).
///
/// Construction rejects non-finite coordinates and fewer than two points.
/// Eigenvector extraction additionally requires at least three sites.
class CoordinateSet {
 public:
  explicit CoordinateSet(Eigen::MatrixX2d points);

  Eigen::Index size() const noexcept { return points_.rows(); }
  double x(Eigen::Index i) const { return points_(i, 0); }
  double y(Eigen::Index i) const { return points_(i, 1); }
  const Eigen::MatrixX2d& points() const noexcept { return points_; }

  double distance(Eigen::Index i, Eigen::Index j) const;

 private:
  Eigen::MatrixX2d points_;
};

/// Symmetric N x N Euclidean distance matrix with an exactly zero diagonal.
using DistanceMatrix = Eigen::MatrixXd;

DistanceMatrix pairwise_distances(const CoordinateSet& coords);

/// Longest edge of a minimum spanning tree over the complete graph weighted
/// by `d`. Dense Prim, O(N^2).
double mst_max_edge(const DistanceMatrix& d);

/// Same quantity computed straight from coordinates without materialising the
/// N x N distance matrix.
double mst_max_edge(const CoordinateSet& coords);

struct ConnectivityMatrix;

/// Binary k-nearest-neighbour graph. Row i holds ones at the k nearest
/// other sites; equal distances go to the smaller index. Not symmetric.
ConnectivityMatrix knn_graph(const CoordinateSet& coords, int k);

}  // namespace moran

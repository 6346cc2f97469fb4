#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "moran/geometry.hpp"

namespace testing {

inline Eigen::MatrixX2d uniform_points(Eigen::Index n, std::mt19937_64& rng, double side = 10.0) {
  std::uniform_real_distribution<double> u(0.0, side);
  Eigen::MatrixX2d p(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) p.row(i) << u(rng), u(rng);
  return p;
}

inline Eigen::VectorXd normal_vector(Eigen::Index n, std::mt19937_64& rng, double sd = 1.0) {
  std::normal_distribution<double> z(0.0, sd);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = z(rng);
  return v;
}

inline Eigen::MatrixXd normal_matrix(Eigen::Index n, Eigen::Index k, std::mt19937_64& rng) {
  Eigen::MatrixXd m(n, k);
  for (Eigen::Index j = 0; j < k; ++j) m.col(j) = normal_vector(n, rng);
  return m;
}

/// The eight-site layout whose reference values were computed with numpy/scipy.
inline Eigen::MatrixX2d reference_sites() {
  Eigen::MatrixX2d p(8, 2);
  p << 0, 0, 1, 0, 0, 2, 3, 1, 2, 3, 4, 4, 5, 0, 6, 2;
  return p;
}

/// log N(y; mu, S) from a dense covariance.
inline double mvn_logpdf(const Eigen::VectorXd& y, const Eigen::VectorXd& mu, const Eigen::MatrixXd& s) {
  const Eigen::LLT<Eigen::MatrixXd> chol(s);
  const Eigen::VectorXd r = y - mu;
  const double quad = r.dot(chol.solve(r));
  const double logdet = 2.0 * chol.matrixLLT().diagonal().array().log().sum();
  return -0.5 * (static_cast<double>(y.size()) * std::log(2.0 * std::numbers::pi) + logdet + quad);
}

/// Profile (RE)ML log-likelihood built from the full N x N covariance
/// V = I + tau E diag((lambda / lambda_1)^alpha) E'.
inline double dense_profile_loglik(const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                                   const Eigen::MatrixXd& e, const Eigen::VectorXd& lambda,
                                   double log_tau, double alpha, bool reml) {
  const Eigen::Index n = y.size(), p = x.cols();
  const Eigen::VectorXd w = (lambda / lambda.maxCoeff()).array().pow(alpha);
  const Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n) + std::exp(log_tau) * e * w.asDiagonal() * e.transpose();
  const Eigen::MatrixXd vi = v.inverse();
  const Eigen::MatrixXd xvx = x.transpose() * vi * x;
  const Eigen::VectorXd beta = xvx.ldlt().solve(x.transpose() * vi * y);
  const Eigen::VectorXd r = y - x * beta;
  const double quad = r.dot(vi * r);
  if (!reml) return mvn_logpdf(y, x * beta, (quad / n) * v);
  const double s2 = quad / static_cast<double>(n - p);
  const double m = static_cast<double>(n - p);
  return -0.5 * (m * std::log(2.0 * std::numbers::pi * s2) + std::log(v.determinant()) +
                 std::log(xvx.determinant()) + m);
}

}  // namespace testing

#pragma once

#include <span>

#include <Eigen/Dense>

#include "moran/mixed.hpp"

namespace moran::detail {

/// Mixed-model equations for y = X b + Z u + e where Z is made of `blocks`
/// groups of L columns and block k has u_k ~ N(0, sigma^2 tau_k
/// diag(lambda^alpha_k)). Works in the v = D^-1/2 u parametrisation, with
/// coefficient matrix C = [[S Z'Z S + I, S Z'X], [X'Z S, X'X]].
class BlockSystem {
 public:
  BlockSystem(const Eigen::VectorXd& y, const Eigen::MatrixXd& x, const Eigen::MatrixXd& z,
              Eigen::Index blocks, const Eigen::VectorXd& scaled_lambda);

  struct Evaluation {
    bool ok = false;
    double log_lik = 0.0;
    double sigma2 = 0.0;
    Eigen::VectorXd beta;
    Eigen::VectorXd u;
    Eigen::VectorXd scale;  // sqrt of the prior variances of u (per column of Z)
    Eigen::MatrixXd c_inv;  // only with details
    double effective_df = 0.0;
  };

  Evaluation evaluate(std::span<const VarianceParams> theta, EstimationMethod method,
                      bool details = false) const;

  Eigen::Index n() const noexcept { return n_; }
  Eigen::Index p() const noexcept { return p_; }
  Eigen::Index q() const noexcept { return q_; }
  Eigen::Index blocks() const noexcept { return blocks_; }

 private:
  Eigen::Index n_, p_, q_, blocks_, l_;
  Eigen::MatrixXd ztz_, ztx_, xtx_;
  Eigen::VectorXd zty_, xty_;
  double yty_;
  Eigen::VectorXd scaled_lambda_;
};

/// Profiled log-likelihood from its pieces. `quad` is the GLS quadratic form
/// (y - X b)' V^-1 (y - X b) with V scaled by 1 / sigma^2.
double profiled_log_lik(double quad, double logdet_v, double logdet_xvx, Eigen::Index n,
                        Eigen::Index p, EstimationMethod method, double& sigma2);

Eigen::VectorXd scaled_eigenvalues(const Eigen::VectorXd& lambda);

}  // namespace moran::detail

#include <functional>
#include <string>

namespace moran::detail {

/// Maximises a two-parameter block log-likelihood over the standard box from
/// each start. Returns the best converged optimum; throws ConvergenceError
/// (tagged with `module`) if none converges.
VarianceParams maximize_variance(const std::function<double(VarianceParams)>& log_lik,
                                 std::span<const VarianceParams> starts, const std::string& module,
                                 double* best_value = nullptr);

}  // namespace moran::detail

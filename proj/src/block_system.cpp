#include "block_system.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "moran/errors.hpp"

namespace moran::detail {

Eigen::VectorXd scaled_eigenvalues(const Eigen::VectorXd& lambda) {
  if (lambda.size() == 0) throw InputError("mixed", "empty eigenvalue vector");
  if (!(lambda.minCoeff() > 0.0)) throw InputError("mixed", "eigenvalues must be positive");
  return lambda / lambda.maxCoeff();
}

double profiled_log_lik(double quad, double logdet_v, double logdet_xvx, Eigen::Index n,
                        Eigen::Index p, EstimationMethod method, double& sigma2) {
  const double log2pi = std::log(2.0 * std::numbers::pi);
  if (!(quad > 0.0) || !std::isfinite(quad)) return -std::numeric_limits<double>::infinity();
  if (method == EstimationMethod::ml) {
    const double nn = static_cast<double>(n);
    sigma2 = quad / nn;
    return -0.5 * (nn * (log2pi + std::log(sigma2)) + logdet_v + nn);
  }
  const double df = static_cast<double>(n - p);
  sigma2 = quad / df;
  return -0.5 * (df * (log2pi + std::log(sigma2)) + logdet_v + logdet_xvx + df);
}

BlockSystem::BlockSystem(const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                         const Eigen::MatrixXd& z, Eigen::Index blocks,
                         const Eigen::VectorXd& scaled_lambda)
    : n_(x.rows()),
      p_(x.cols()),
      q_(z.cols()),
      blocks_(blocks),
      l_(scaled_lambda.size()),
      scaled_lambda_(scaled_lambda) {
  if (z.rows() != n_ || y.size() != n_) throw InputError("mixed", "design sizes disagree");
  if (blocks_ * l_ != q_) throw InputError("mixed", "random-effect block layout does not match Z");
  if (n_ <= p_) throw SingularDesignError("mixed", "more fixed effects than observations", p_ - 1);
  ztz_ = z.transpose() * z;
  ztx_ = z.transpose() * x;
  xtx_ = x.transpose() * x;
  zty_ = z.transpose() * y;
  xty_ = x.transpose() * y;
  yty_ = y.squaredNorm();
}

BlockSystem::Evaluation BlockSystem::evaluate(std::span<const VarianceParams> theta,
                                              EstimationMethod method, bool details) const {
  Evaluation out;
  if (static_cast<Eigen::Index>(theta.size()) != blocks_) {
    throw InputError("mixed", "one variance pair is needed per random block");
  }
  out.scale.resize(q_);
  for (Eigen::Index k = 0; k < blocks_; ++k) {
    const auto& t = theta[static_cast<std::size_t>(k)];
    const double tau = std::exp(t.log_tau);
    out.scale.segment(k * l_, l_) =
        (tau * scaled_lambda_.array().pow(t.alpha)).sqrt().matrix();
  }
  const Eigen::VectorXd& s = out.scale;

  const Eigen::Index m = q_ + p_;
  Eigen::MatrixXd c(m, m);
  c.topLeftCorner(q_, q_) = s.asDiagonal() * ztz_ * s.asDiagonal();
  c.topLeftCorner(q_, q_).diagonal().array() += 1.0;
  c.topRightCorner(q_, p_) = s.asDiagonal() * ztx_;
  c.bottomLeftCorner(p_, q_) = c.topRightCorner(q_, p_).transpose();
  c.bottomRightCorner(p_, p_) = xtx_;

  const Eigen::LLT<Eigen::MatrixXd> chol(c);
  if (chol.info() != Eigen::Success) return out;
  const auto diag = chol.matrixLLT().diagonal();
  double logdet_v = 0.0;
  double logdet_xvx = 0.0;
  for (Eigen::Index i = 0; i < q_; ++i) logdet_v += 2.0 * std::log(diag(i));
  for (Eigen::Index i = q_; i < m; ++i) logdet_xvx += 2.0 * std::log(diag(i));

  Eigen::VectorXd rhs(m);
  rhs.head(q_) = s.cwiseProduct(zty_);
  rhs.tail(p_) = xty_;
  const Eigen::VectorXd sol = chol.solve(rhs);
  const double quad = yty_ - sol.dot(rhs);

  out.log_lik = profiled_log_lik(quad, logdet_v, logdet_xvx, n_, p_, method, out.sigma2);
  if (!std::isfinite(out.log_lik)) return out;
  out.ok = true;
  out.u = s.cwiseProduct(sol.head(q_));
  out.beta = sol.tail(p_);
  if (details) {
    out.c_inv = chol.solve(Eigen::MatrixXd::Identity(m, m));
    out.effective_df = static_cast<double>(m) - out.c_inv.topLeftCorner(q_, q_).trace();
  }
  return out;
}

}  // namespace moran::detail

#include "moran/optimize.hpp"

namespace moran::detail {

VarianceParams maximize_variance(const std::function<double(VarianceParams)>& log_lik,
                                 std::span<const VarianceParams> starts, const std::string& module,
                                 double* best_value) {
  const Box box{{kLogTauMin, 0.0}, {kLogTauMax, kAlphaMax}};
  NelderMeadOptions options;
  options.initial_step = {0.5, 0.25};
  const Objective objective = [&](std::span<const double> x) {
    return -log_lik(VarianceParams{x[0], x[1]});
  };

  bool found = false;
  OptimResult best;
  OptimResult best_any;
  best_any.value = std::numeric_limits<double>::infinity();
  for (const auto& start : starts) {
    OptimResult r = nelder_mead(objective, {start.log_tau, start.alpha}, box, options);
    if (r.value < best_any.value || best_any.x.empty()) best_any = r;
    if (r.converged && std::isfinite(r.value) && (!found || r.value < best.value)) {
      best = std::move(r);
      found = true;
    }
  }
  if (!found) {
    throw ConvergenceError(module, "variance-parameter optimizer did not converge",
                           best_any.x, -best_any.value);
  }
  if (best_value) *best_value = -best.value;
  return VarianceParams{best.x[0], best.x[1]};
}

}  // namespace moran::detail

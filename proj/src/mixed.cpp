#include "moran/mixed.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "block_system.hpp"
#include "moran/errors.hpp"
#include "moran/esf.hpp"

namespace moran {

namespace {
constexpr const char* kModule = "mixed";
constexpr double kOrthonormalTolerance = 1e-6;
}  // namespace

EstimationMethod parse_method(const std::string& name) {
  if (name == "reml") return EstimationMethod::reml;
  if (name == "ml") return EstimationMethod::ml;
  throw InputError(kModule, "unknown estimation method '" + name + "' (use reml or ml)");
}

const char* to_string(EstimationMethod m) noexcept {
  return m == EstimationMethod::reml ? "reml" : "ml";
}

std::vector<VarianceParams> default_variance_starts() {
  return {{std::log(0.1), 1.0}, {0.0, 0.5}, {0.0, 2.0}};
}

Eigen::VectorXd lambda_alpha(const Eigen::VectorXd& values, double alpha) {
  if (values.size() > 0 && !(values.minCoeff() > 0.0)) {
    throw InputError(kModule, "eigenvalues must be positive to be raised to a power");
  }
  if (!(alpha >= 0.0 && alpha <= kAlphaMax)) {
    throw InputError(kModule, "alpha must lie in [0, " + std::to_string(kAlphaMax) + "]");
  }
  return values.array().pow(alpha).matrix();
}

double reml_profile_loglik(const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                           const Eigen::MatrixXd& e, const Eigen::VectorXd& lambda,
                           VarianceParams theta, EstimationMethod method) {
  if (e.cols() != lambda.size()) throw InputError(kModule, "one eigenvalue is needed per eigenvector");
  const detail::BlockSystem system(y, x, e, 1, detail::scaled_eigenvalues(lambda));
  const VarianceParams t[] = {theta};
  const auto ev = system.evaluate(t, method);
  return ev.ok ? ev.log_lik : -std::numeric_limits<double>::infinity();
}

ResfModel::ResfModel(const Eigen::MatrixXd& design, const EigenBasis& basis)
    : n_(design.rows()), p_(design.cols()), l_(basis.count()), design_(design), e_(basis.vectors) {
  if (basis.sample_size() != n_) {
    throw InputError(kModule, "eigenvector basis has " + std::to_string(basis.sample_size()) +
                                  " rows but the data have " + std::to_string(n_));
  }
  if (l_ == 0) throw InputError(kModule, "eigenvector basis is empty");
  if (n_ <= p_) throw SingularDesignError(kModule, "more fixed effects than observations", p_ - 1);
  const Eigen::MatrixXd ete = e_.transpose() * e_;
  if ((ete - Eigen::MatrixXd::Identity(l_, l_)).cwiseAbs().maxCoeff() > kOrthonormalTolerance) {
    throw InputError(kModule, "eigenvector basis must have orthonormal columns");
  }
  check_full_rank(design_, kModule);
  xtx_ = design_.transpose() * design_;
  etx_ = e_.transpose() * design_;
  scaled_lambda_ = detail::scaled_eigenvalues(basis.values);
  lambda1_ = basis.values.maxCoeff();
}

ResponseMoments ResfModel::moments(const Eigen::VectorXd& y) const {
  if (y.size() != n_) throw InputError(kModule, "response length does not match the design");
  return ResponseMoments{design_.transpose() * y, e_.transpose() * y, y.squaredNorm()};
}

ProfileEvaluation ResfModel::evaluate(const ResponseMoments& r, VarianceParams theta,
                                      EstimationMethod method, bool details) const {
  ProfileEvaluation out;
  const double tau = std::exp(theta.log_tau);
  const Eigen::ArrayXd w = tau * scaled_lambda_.array().pow(theta.alpha);
  const Eigen::ArrayXd f = w / (1.0 + w);

  // With E'E = I: V^-1 = I - E diag(f) E' and log|V| = sum log(1 + w).
  const Eigen::MatrixXd fa = f.matrix().asDiagonal() * etx_;
  out.xvx = xtx_ - etx_.transpose() * fa;
  const Eigen::VectorXd fb = f.matrix().cwiseProduct(r.ety);
  const Eigen::VectorXd xvy = r.xty - etx_.transpose() * fb;
  const double yvy = r.yty - r.ety.dot(fb);

  const Eigen::LLT<Eigen::MatrixXd> chol(out.xvx);
  if (chol.info() != Eigen::Success) return out;
  out.beta = chol.solve(xvy);
  const double quad = yvy - xvy.dot(out.beta);
  const double logdet_v = w.log1p().sum();
  const double logdet_xvx = 2.0 * chol.matrixLLT().diagonal().array().log().sum();
  out.log_lik = detail::profiled_log_lik(quad, logdet_v, logdet_xvx, n_, p_, method, out.sigma2);
  if (!std::isfinite(out.log_lik)) return out;
  out.ok = true;
  if (details) {
    out.gamma = f.matrix().cwiseProduct(r.ety - etx_ * out.beta);
    const Eigen::MatrixXd g = etx_.transpose() * ((f * (1.0 - f)).matrix().asDiagonal() * etx_);
    out.effective_df = static_cast<double>(p_) + f.sum() - chol.solve(g).trace();
  }
  return out;
}

double ResfModel::log_lik(const ResponseMoments& r, VarianceParams theta,
                          EstimationMethod method) const {
  const auto ev = evaluate(r, theta, method);
  return ev.ok ? ev.log_lik : -std::numeric_limits<double>::infinity();
}

VarianceParams ResfModel::optimize(const ResponseMoments& r, EstimationMethod method,
                                   std::span<const VarianceParams> starts) const {
  return detail::maximize_variance(
      [&](VarianceParams t) { return log_lik(r, t, method); }, starts, kModule);
}

ShrinkageParams ResfModel::shrinkage(double sigma2, VarianceParams theta) const {
  const double var = sigma2 * std::exp(theta.log_tau) * std::pow(lambda1_, -theta.alpha);
  return ShrinkageParams{std::sqrt(var), theta.alpha};
}

ResfStats conditional_stats(const Eigen::VectorXd& y, const Eigen::VectorXd& fitted,
                            double sigma2, double effective_df, double log_lik, int n_params,
                            EstimationMethod method) {
  const double n = static_cast<double>(y.size());
  const double rss = (y - fitted).squaredNorm();
  const double tss = (y.array() - y.mean()).square().sum();
  ResfStats s;
  s.method = method;
  s.resid_se = std::sqrt(sigma2);
  s.effective_df = effective_df;
  s.adj_r2_cond = 1.0 - (rss / (n - effective_df)) / (tss / (n - 1.0));
  s.log_lik = log_lik;
  s.n_params = n_params;
  s.aic = -2.0 * log_lik + 2.0 * n_params;
  s.bic = -2.0 * log_lik + std::log(n) * n_params;
  return s;
}

ResfFit fit_resf(const ResfModel& model, const Eigen::VectorXd& y, EstimationMethod method,
                 const std::vector<std::string>& names) {
  const Eigen::Index p = model.p();
  if (static_cast<Eigen::Index>(names.size()) != p) throw InputError(kModule, "one name is needed per design column");
  const ResponseMoments moments = model.moments(y);
  const auto starts = default_variance_starts();
  const VarianceParams theta = model.optimize(moments, method, starts);
  const ProfileEvaluation ev = model.evaluate(moments, theta, method, true);
  if (!ev.ok) throw ConvergenceError(kModule, "likelihood is not finite at the optimum", {theta.log_tau, theta.alpha}, ev.log_lik);

  ResfFit fit;
  fit.variance = theta;
  fit.sigma2 = ev.sigma2;
  fit.gamma = ev.gamma;
  fit.beta_cov = ev.sigma2 * ev.xvx.llt().solve(Eigen::MatrixXd::Identity(p, p));
  fit.beta_cov = (0.5 * (fit.beta_cov + fit.beta_cov.transpose())).eval();
  if (fit.beta_cov.llt().info() != Eigen::Success) {
    throw SingularDesignError(kModule, "coefficient covariance is not positive definite");
  }
  const double df = static_cast<double>(model.n() - p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double se = std::sqrt(fit.beta_cov(j, j));
    const double t = ev.beta(j) / se;
    fit.coef.push_back(CoefRow{names[static_cast<std::size_t>(j)], ev.beta(j), se, t, student_t_p_value(t, df)});
  }
  fit.fitted = model.design() * ev.beta + model.basis() * ev.gamma;
  fit.shrinkage = model.shrinkage(ev.sigma2, theta);
  const int n_params = static_cast<int>(p) + 1 + 2;
  fit.stats = conditional_stats(y, fit.fitted, ev.sigma2, ev.effective_df, ev.log_lik, n_params, method);
  return fit;
}

ResfFit resf(const Eigen::VectorXd& y, const Eigen::MatrixXd& x, const EigenBasis& basis,
             EstimationMethod method, std::vector<std::string> x_names) {
  if (x.rows() != y.size()) throw InputError(kModule, "covariate rows do not match the response length");
  x_names = covariate_names(std::move(x_names), x.cols(), kModule);
  Eigen::MatrixXd design(y.size(), x.cols() + 1);
  design.col(0).setOnes();
  design.rightCols(x.cols()) = x;
  std::vector<std::string> names{"(Intercept)"};
  names.insert(names.end(), x_names.begin(), x_names.end());
  const ResfModel model(design, basis);
  return fit_resf(model, y, method, names);
}

}  // namespace moran

#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "moran/eigen.hpp"
#include "moran/stats.hpp"

namespace moran {

enum class EstimationMethod { reml, ml };

EstimationMethod parse_method(const std::string& name);
const char* to_string(EstimationMethod m) noexcept;

/// Search box for the variance parameters of one random block.
inline constexpr double kAlphaMax = 4.0;
inline constexpr double kLogTauMin = -20.0;
inline constexpr double kLogTauMax = 12.0;

/// Variance parameters of one random block: gamma ~ N(0, sigma^2 * tau *
/// diag((lambda / lambda_1)^alpha)). tau is carried on the log scale.
struct VarianceParams {
  double log_tau = 0.0;
  double alpha = 0.0;
};

/// Optimizer starting points for a two-parameter block.
std::vector<VarianceParams> default_variance_starts();

/// diag(lambda^alpha), returned as the diagonal vector.
Eigen::VectorXd lambda_alpha(const Eigen::VectorXd& values, double alpha);

/// Shrinkage parameters as reported: sigma_gamma on the unnormalised
/// eigenvalue scale, i.e. Var(gamma) = sigma_gamma^2 * diag(lambda^alpha).
struct ShrinkageParams {
  double sigma_gamma = 0.0;
  double alpha = 0.0;
};

/// REML (or ML) log-likelihood of y = X b + E g + e with b and sigma^2
/// profiled out. `x` is the full fixed-effects design. Eigenvalues are scaled
/// by their maximum before powering. Works for any E (orthonormal or not);
/// cost is O(N (P + L)^2) for the cross products plus O((P + L)^3).
double reml_profile_loglik(const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                           const Eigen::MatrixXd& e, const Eigen::VectorXd& lambda,
                           VarianceParams theta, EstimationMethod method);

/// Response-dependent sufficient statistics: X'y, E'y and y'y.
struct ResponseMoments {
  Eigen::VectorXd xty;
  Eigen::VectorXd ety;
  double yty = 0.0;
};

/// One profile-likelihood evaluation in the reduced (P + L) space.
struct ProfileEvaluation {
  bool ok = false;
  double log_lik = 0.0;
  double sigma2 = 0.0;
  Eigen::VectorXd beta;
  Eigen::MatrixXd xvx;       // X' V^-1 X with V scaled by 1 / sigma^2
  Eigen::VectorXd gamma;     // conditional mean of the eigenvector coefficients
  double effective_df = 0.0; // trace of the smoother
};

/// RE-ESF likelihood engine for an orthonormal eigenvector basis. Everything
/// that depends on N is computed once in the constructor; each evaluation
/// then costs O(L P^2 + P^3).
class ResfModel {
 public:
  ResfModel(const Eigen::MatrixXd& design, const EigenBasis& basis);

  ResponseMoments moments(const Eigen::VectorXd& y) const;
  ProfileEvaluation evaluate(const ResponseMoments& r, VarianceParams theta,
                             EstimationMethod method, bool details = false) const;
  double log_lik(const ResponseMoments& r, VarianceParams theta, EstimationMethod method) const;

  /// Maximises the profile likelihood from each start and keeps the best
  /// converged run. Throws ConvergenceError when no run converges.
  VarianceParams optimize(const ResponseMoments& r, EstimationMethod method,
                          std::span<const VarianceParams> starts) const;

  ShrinkageParams shrinkage(double sigma2, VarianceParams theta) const;

  Eigen::Index n() const noexcept { return n_; }
  Eigen::Index p() const noexcept { return p_; }
  Eigen::Index l() const noexcept { return l_; }
  const Eigen::MatrixXd& xtx() const noexcept { return xtx_; }
  const Eigen::MatrixXd& etx() const noexcept { return etx_; }
  const Eigen::MatrixXd& design() const noexcept { return design_; }
  const Eigen::MatrixXd& basis() const noexcept { return e_; }
  /// Eigenvalues divided by their maximum.
  const Eigen::VectorXd& scaled_lambda() const noexcept { return scaled_lambda_; }

 private:
  Eigen::Index n_ = 0, p_ = 0, l_ = 0;
  Eigen::MatrixXd design_;
  Eigen::MatrixXd e_;
  Eigen::MatrixXd xtx_;
  Eigen::MatrixXd etx_;
  Eigen::VectorXd scaled_lambda_;
  double lambda1_ = 1.0;
};

struct ResfStats {
  double resid_se = 0.0;
  double adj_r2_cond = 0.0;
  double log_lik = 0.0;  // restricted under REML
  double aic = 0.0;
  double bic = 0.0;
  double effective_df = 0.0;
  int n_params = 0;
  EstimationMethod method = EstimationMethod::reml;
};

/// Error statistics of a fitted mixed model. The adjusted conditional R^2
/// uses N - effective_df residual degrees of freedom; AIC/BIC use n_params.
ResfStats conditional_stats(const Eigen::VectorXd& y, const Eigen::VectorXd& fitted,
                            double sigma2, double effective_df, double log_lik, int n_params,
                            EstimationMethod method);

struct ResfFit {
  CoefTable coef;
  Eigen::VectorXd gamma;
  ShrinkageParams shrinkage;
  ResfStats stats;
  VarianceParams variance;
  double sigma2 = 0.0;
  Eigen::MatrixXd beta_cov;
  Eigen::VectorXd fitted;
};

/// Random-effects ESF: ML/REML over (log tau, alpha), GLS coefficients and
/// conditional-mean eigenvector coefficients. p-values use N - P df.
ResfFit resf(const Eigen::VectorXd& y, const Eigen::MatrixXd& x, const EigenBasis& basis,
             EstimationMethod method = EstimationMethod::reml,
             std::vector<std::string> x_names = {});

/// Fits a response against a prebuilt model. `names` covers every design column.
ResfFit fit_resf(const ResfModel& model, const Eigen::VectorXd& y, EstimationMethod method,
                 const std::vector<std::string>& names);

/// Spatially varying coefficient fit.
struct SvcFit {
  std::vector<std::string> vc_names;  // "(Intercept)" then the varying covariates
  Eigen::MatrixXd b_vc;               // N x (K_v + 1)
  Eigen::MatrixXd se_vc;
  Eigen::MatrixXd p_vc;
  CoefTable b_const;                  // constant-coefficient covariates
  CoefTable b_vc_mean;                // constant parts beta_{k,0} of the varying coefficients
  std::vector<ShrinkageParams> shrinkage;  // one per varying coefficient
  std::vector<VarianceParams> variance;
  ResfStats stats;
  double sigma2 = 0.0;
  int cycles = 0;
  std::vector<std::string> warnings;
};

/// Varying coefficients beyond this count trigger a warning.
inline constexpr Eigen::Index kSvcRecommendedMax = 4;

/// RE-ESF with spatially varying coefficients on the intercept and on every
/// column of `xv`; `xconst` columns keep constant coefficients. Variance
/// parameters are found by block-coordinate ascent, one (tau_k, alpha_k)
/// pair at a time.
SvcFit resf_vc(const Eigen::VectorXd& y, const Eigen::MatrixXd& xv, const Eigen::MatrixXd& xconst,
               const EigenBasis& basis, EstimationMethod method = EstimationMethod::reml,
               std::vector<std::string> xv_names = {}, std::vector<std::string> xconst_names = {});

}  // namespace moran

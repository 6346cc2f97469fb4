#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "moran/eigen.hpp"
#include "moran/stats.hpp"

namespace moran {

/// Ordinary least squares on a full-rank design (intercept, if any, is a column).
struct OlsResult {
  Eigen::VectorXd coef;
  Eigen::VectorXd se;
  Eigen::VectorXd t_value;
  Eigen::VectorXd p_value;
  Eigen::VectorXd residuals;
  double rss = 0.0;
  Eigen::Index df = 0;  // N - P
};

/// Throws SingularDesignError naming the first column that lies (numerically)
/// in the span of the columns before it.
void check_full_rank(const Eigen::MatrixXd& design, const char* module);

OlsResult ols_fit(const Eigen::VectorXd& y, const Eigen::MatrixXd& design);

/// Variance inflation factors of `columns` (no intercept column). Each column
/// is regressed on the others plus an implicit intercept. Perfect
/// collinearity yields +infinity.
Eigen::VectorXd vif(const Eigen::MatrixXd& columns);

struct ErrorStats {
  double resid_se = 0.0;
  double adj_r2 = 0.0;
  double log_lik = 0.0;
  double aic = 0.0;
  double bic = 0.0;
};

/// Gaussian log-likelihood at the ML variance RSS/N; AIC and BIC count the
/// coefficients plus the residual variance.
ErrorStats error_stats(const OlsResult& fit, const Eigen::VectorXd& y);

enum class SelectionCriterion { r2, aic, bic, all };

SelectionCriterion parse_criterion(const std::string& name);
const char* to_string(SelectionCriterion c) noexcept;

struct EsfOptions {
  SelectionCriterion fn = SelectionCriterion::r2;
  std::optional<double> vif_max;
};

struct LinearFit {
  CoefTable coef;                       // intercept, covariates, selected eigenvectors
  std::vector<Eigen::Index> selected;   // 0-based basis columns, in selection order
  std::vector<NamedValue> vif;          // every non-intercept column
  Eigen::VectorXd residuals;
  ErrorStats stats;
  SelectionCriterion criterion = SelectionCriterion::r2;
  /// Criterion value of the base model followed by one entry per accepted step.
  std::vector<double> criterion_path;
};

/// Eigenvector spatial filtering by OLS with forward stepwise eigenvector
/// selection. Candidates that would push any VIF above `vif_max` are
/// discarded before criteria are compared; ties go to the smaller index.
LinearFit esf(const Eigen::VectorXd& y, const Eigen::MatrixXd& x, const EigenBasis& basis,
              const EsfOptions& options = {}, std::vector<std::string> x_names = {});

/// "x1", "x2", ... when `names` is empty; validates the length otherwise.
std::vector<std::string> covariate_names(std::vector<std::string> names, Eigen::Index k,
                                         const char* module);

/// Eigenvector label used in tables ("sf" + 1-based index).
std::string eigenvector_name(Eigen::Index index);

}  // namespace moran

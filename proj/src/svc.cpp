#include <cmath>
#include <limits>
#include <string>

#include "block_system.hpp"
#include "moran/errors.hpp"
#include "moran/esf.hpp"
#include "moran/mixed.hpp"

namespace moran {

namespace {
constexpr const char* kModule = "mixed";
constexpr double kCycleTolerance = 1e-6;
constexpr int kMaxCycles = 50;
}  // namespace

SvcFit resf_vc(const Eigen::VectorXd& y, const Eigen::MatrixXd& xv, const Eigen::MatrixXd& xconst,
               const EigenBasis& basis, EstimationMethod method, std::vector<std::string> xv_names,
               std::vector<std::string> xconst_names) {
  const Eigen::Index n = y.size();
  const Eigen::Index kv = xv.cols();
  const Eigen::Index kc = xconst.cols();
  const Eigen::Index l = basis.count();
  if (xv.rows() != n || (kc > 0 && xconst.rows() != n)) {
    throw InputError(kModule, "covariate rows do not match the response length");
  }
  if (basis.sample_size() != n) {
    throw InputError(kModule, "eigenvector basis has " + std::to_string(basis.sample_size()) +
                                  " rows but the data have " + std::to_string(n));
  }
  if (l == 0) throw InputError(kModule, "eigenvector basis is empty");
  xv_names = covariate_names(std::move(xv_names), kv, kModule);
  if (xconst_names.empty()) {
    for (Eigen::Index j = 0; j < kc; ++j) xconst_names.push_back("V" + std::to_string(j + 1));
  }
  xconst_names = covariate_names(std::move(xconst_names), kc, kModule);

  SvcFit fit;
  if (kv > kSvcRecommendedMax) {
    fit.warnings.push_back(std::to_string(kv) + " varying coefficients requested; at most " +
                           std::to_string(kSvcRecommendedMax) +
                           " are recommended for cost and stability");
  }

  const Eigen::Index p = 1 + kv + kc;
  const Eigen::Index blocks = kv + 1;
  Eigen::MatrixXd x(n, p);
  x.col(0).setOnes();
  x.middleCols(1, kv) = xv;
  if (kc > 0) x.rightCols(kc) = xconst;
  check_full_rank(x, kModule);

  const Eigen::MatrixXd& e = basis.vectors;
  Eigen::MatrixXd z(n, blocks * l);
  z.leftCols(l) = e;
  for (Eigen::Index k = 0; k < kv; ++k) z.middleCols((k + 1) * l, l) = xv.col(k).asDiagonal() * e;

  const detail::BlockSystem system(y, x, z, blocks, detail::scaled_eigenvalues(basis.values));
  std::vector<VarianceParams> theta(static_cast<std::size_t>(blocks), VarianceParams{std::log(0.1), 1.0});
  auto total = [&](const std::vector<VarianceParams>& t) {
    const auto ev = system.evaluate(t, method);
    return ev.ok ? ev.log_lik : -std::numeric_limits<double>::infinity();
  };

  double current = total(theta);
  bool converged = false;
  for (fit.cycles = 1; fit.cycles <= kMaxCycles; ++fit.cycles) {
    const double start_value = current;
    for (Eigen::Index k = 0; k < blocks; ++k) {
      std::vector<VarianceParams> starts{theta[static_cast<std::size_t>(k)]};
      if (fit.cycles == 1) {
        const auto defaults = default_variance_starts();
        starts.insert(starts.end(), defaults.begin(), defaults.end());
      }
      std::vector<VarianceParams> trial = theta;
      double value = 0.0;
      const VarianceParams best = detail::maximize_variance(
          [&](VarianceParams t) {
            trial[static_cast<std::size_t>(k)] = t;
            return total(trial);
          },
          starts, kModule, &value);
      // Block updates never decrease the objective.
      if (value >= current) {
        theta[static_cast<std::size_t>(k)] = best;
        current = value;
      }
    }
    if (std::abs(current - start_value) < kCycleTolerance) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    std::vector<double> flat;
    for (const auto& t : theta) {
      flat.push_back(t.log_tau);
      flat.push_back(t.alpha);
    }
    throw ConvergenceError(kModule, "block-coordinate ascent did not settle within " +
                                        std::to_string(kMaxCycles) + " cycles", flat, current);
  }

  const auto ev = system.evaluate(theta, method, true);
  if (!ev.ok) throw ConvergenceError(kModule, "likelihood is not finite at the optimum", {}, current);
  fit.variance = theta;
  fit.sigma2 = ev.sigma2;

  const Eigen::Index q = system.q();
  const double df = static_cast<double>(n - p);
  auto coef_row = [&](const std::string& name, Eigen::Index j) {
    const double se = std::sqrt(ev.sigma2 * ev.c_inv(q + j, q + j));
    const double t = ev.beta(j) / se;
    return CoefRow{name, ev.beta(j), se, t, student_t_p_value(t, df)};
  };
  fit.vc_names.push_back("(Intercept)");
  fit.vc_names.insert(fit.vc_names.end(), xv_names.begin(), xv_names.end());
  for (Eigen::Index k = 0; k < blocks; ++k) fit.b_vc_mean.push_back(coef_row(fit.vc_names[static_cast<std::size_t>(k)], k));
  for (Eigen::Index j = 0; j < kc; ++j) fit.b_const.push_back(coef_row(xconst_names[static_cast<std::size_t>(j)], 1 + kv + j));

  const Eigen::MatrixXd c_sym = 0.5 * (ev.c_inv + ev.c_inv.transpose());
  if (c_sym.llt().info() != Eigen::Success) {
    throw SingularDesignError(kModule, "conditional covariance is not positive definite");
  }

  fit.b_vc.resize(n, blocks);
  fit.se_vc.resize(n, blocks);
  fit.p_vc.resize(n, blocks);
  const double lambda1 = basis.values.maxCoeff();
  for (Eigen::Index k = 0; k < blocks; ++k) {
    const Eigen::VectorXd uk = ev.u.segment(k * l, l);
    fit.b_vc.col(k) = Eigen::VectorXd::Constant(n, ev.beta(k)) + e * uk;

    // Var(b_ik) = sigma^2 r_i' Cinv_sub r_i with r_i = [s_k o E_i, 1] in (v, beta) coordinates.
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < l; ++j) idx.push_back(k * l + j);
    idx.push_back(q + k);
    Eigen::MatrixXd sub(l + 1, l + 1);
    for (Eigen::Index a = 0; a <= l; ++a)
      for (Eigen::Index b = 0; b <= l; ++b) sub(a, b) = c_sym(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
    Eigen::MatrixXd rows(n, l + 1);
    rows.leftCols(l) = e * ev.scale.segment(k * l, l).asDiagonal();
    rows.col(l).setOnes();
    const Eigen::VectorXd var = (rows * sub).cwiseProduct(rows).rowwise().sum() * ev.sigma2;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double se = std::sqrt(std::max(var(i), 0.0));
      fit.se_vc(i, k) = se;
      fit.p_vc(i, k) = normal_p_value(fit.b_vc(i, k) / se);
    }

    const auto& t = theta[static_cast<std::size_t>(k)];
    const double var_gamma = ev.sigma2 * std::exp(t.log_tau) * std::pow(lambda1, -t.alpha);
    fit.shrinkage.push_back(ShrinkageParams{std::sqrt(var_gamma), t.alpha});
  }

  Eigen::VectorXd fitted = x * ev.beta + z * ev.u;
  const int n_params = static_cast<int>(p) + 1 + 2 * static_cast<int>(blocks);
  fit.stats = conditional_stats(y, fitted, ev.sigma2, ev.effective_df, ev.log_lik, n_params, method);
  return fit;
}

}  // namespace moran

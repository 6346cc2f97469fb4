#include "moran/quantile.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "moran/errors.hpp"
#include "moran/esf.hpp"

namespace moran {

namespace {
constexpr const char* kModule = "quantile";
constexpr double kMinDensity = 1e-12;
constexpr Eigen::Index kMinSample = 10;

std::string tau_label(double tau) {
  std::ostringstream os;
  os << "tau=" << tau;
  return os.str();
}

[[noreturn]] void rethrow_with_tau(const Error& e, double tau) {
  const std::string where = tau_label(tau) + ": " + e.what();
  switch (e.kind()) {
    case ErrorKind::input:
      throw InputError(kModule, where);
    case ErrorKind::singular_design:
      throw SingularDesignError(kModule, where, static_cast<const SingularDesignError&>(e).column());
    case ErrorKind::convergence: {
      const auto& c = static_cast<const ConvergenceError&>(e);
      throw ConvergenceError(kModule, where, c.best_params(), c.best_objective());
    }
    case ErrorKind::bootstrap_unstable:
      throw BootstrapUnstableError(kModule, where);
  }
  throw;
}
}  // namespace

double silverman_bandwidth(const Eigen::VectorXd& y) {
  const double n = static_cast<double>(y.size());
  const double mean = y.mean();
  const double sd = std::sqrt((y.array() - mean).square().sum() / (n - 1.0));
  std::vector<double> sorted(y.data(), y.data() + y.size());
  std::sort(sorted.begin(), sorted.end());
  const double iqr = quantile_type7(sorted, 0.75) - quantile_type7(sorted, 0.25);
  const double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
  return 0.9 * spread * std::pow(n, -0.2);
}

double gaussian_kde(const Eigen::VectorXd& y, double x, double bandwidth) {
  const double z = 1.0 / (bandwidth * std::sqrt(2.0 * std::numbers::pi));
  double sum = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double u = (x - y(i)) / bandwidth;
    sum += std::exp(-0.5 * u * u);
  }
  return sum * z / static_cast<double>(y.size());
}

RifVector rif(const Eigen::VectorXd& y, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw InputError(kModule, "tau must lie in (0, 1), got " + std::to_string(tau));
  if (y.size() < kMinSample) {
    throw InputError(kModule, "at least " + std::to_string(kMinSample) + " observations are needed");
  }
  if (!y.allFinite()) throw InputError(kModule, "response contains non-finite values");
  if (y.maxCoeff() == y.minCoeff()) throw InputError(kModule, "response is constant");

  RifVector out;
  out.tau = tau;
  std::vector<double> sorted(y.data(), y.data() + y.size());
  std::sort(sorted.begin(), sorted.end());
  out.q = quantile_type7(sorted, tau);
  out.bandwidth = silverman_bandwidth(y);
  out.f_hat = gaussian_kde(y, out.q, out.bandwidth);
  if (!(out.f_hat > kMinDensity)) {
    throw InputError(kModule, "density estimate vanishes at the " + tau_label(tau) + " quantile");
  }
  out.r.resize(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double below = y(i) <= out.q ? 1.0 : 0.0;
    out.r(i) = out.q + (tau - below) / out.f_hat;
  }
  return out;
}

QrFit resf_qr(const Eigen::VectorXd& y, const Eigen::MatrixXd& x, const EigenBasis& basis,
              const QrOptions& options, std::vector<std::string> x_names) {
  if (options.taus.empty()) throw InputError(kModule, "no quantiles requested");
  std::vector<double> taus = options.taus;
  std::sort(taus.begin(), taus.end());
  for (std::size_t i = 0; i < taus.size(); ++i) {
    if (!(taus[i] > 0.0 && taus[i] < 1.0)) throw InputError(kModule, "tau must lie in (0, 1), got " + std::to_string(taus[i]));
    if (i > 0 && taus[i] == taus[i - 1]) throw InputError(kModule, "duplicate " + tau_label(taus[i]));
  }
  if (options.boot && options.n_boot <= 0) throw InputError(kModule, "n_boot must be positive");
  if (x.rows() != y.size()) throw InputError(kModule, "covariate rows do not match the response length");

  x_names = covariate_names(std::move(x_names), x.cols(), kModule);
  Eigen::MatrixXd design(y.size(), x.cols() + 1);
  design.col(0).setOnes();
  design.rightCols(x.cols()) = x;
  std::vector<std::string> names{"(Intercept)"};
  names.insert(names.end(), x_names.begin(), x_names.end());
  const ResfModel model(design, basis);

  QrFit out;
  out.boot = options.boot;
  out.n_boot = options.boot ? options.n_boot : 0;
  out.seed = options.seed;
  for (std::size_t k = 0; k < taus.size(); ++k) {
    const double tau = taus[k];
    try {
      const RifVector r = rif(y, tau);
      const ResfFit fit = fit_resf(model, r.r, options.method, names);
      QrTauFit t;
      t.tau = tau;
      t.q = r.q;
      t.f_hat = r.f_hat;
      t.b = fit.coef;
      t.s = fit.shrinkage;
      t.e = fit.stats;
      if (options.boot) {
        t.boot = semiparametric_bootstrap(model, fit, options.method, options.n_boot, options.seed,
                                          options.threads, k);
      }
      out.per_tau.push_back(std::move(t));
    } catch (const Error& e) {
      rethrow_with_tau(e, tau);
    }
  }
  return out;
}

}  // namespace moran

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <vector>

#include "moran/errors.hpp"
#include "moran/parallel.hpp"
#include "moran/quantile.hpp"

namespace moran {

namespace {
constexpr const char* kModule = "quantile";
constexpr double kMaxFailureShare = 0.2;

struct Draw {
  bool ok = false;
  Eigen::VectorXd beta;
  double sigma_gamma = 0.0;
  double alpha = 0.0;
  long dimension = 0;
};

BootRow summarize(const std::string& name, double estimate, std::vector<double> values, int n_boot) {
  std::sort(values.begin(), values.end());
  BootRow row{name, estimate, quantile_type7(values, 0.025), quantile_type7(values, 0.975), 1.0};
  // Percentile bounds can exclude a boundary estimate (e.g. alpha at 0).
  row.lo95 = std::min(row.lo95, estimate);
  row.hi95 = std::max(row.hi95, estimate);
  const double m = static_cast<double>(values.size());
  const double below = static_cast<double>(std::count_if(values.begin(), values.end(), [](double v) { return v <= 0.0; })) / m;
  const double above = static_cast<double>(std::count_if(values.begin(), values.end(), [](double v) { return v >= 0.0; })) / m;
  row.p_value = std::clamp(2.0 * std::min(below, above), 1.0 / (n_boot + 1.0), 1.0);
  return row;
}
}  // namespace

BootstrapResult semiparametric_bootstrap(const ResfModel& model, const ResfFit& fit,
                                         EstimationMethod method, int n_boot, std::uint64_t seed,
                                         unsigned threads, std::uint64_t stream) {
  if (n_boot <= 0) throw InputError(kModule, "n_boot must be positive");
  const Eigen::Index p = model.p();
  const Eigen::Index l = model.l();
  const Eigen::Index m = p + l;
  const Eigen::Index resid_df = model.n() - m;
  if (resid_df < 0) throw InputError(kModule, "bootstrap needs more observations than fixed effects plus eigenvectors");

  Eigen::VectorXd beta(p);
  for (Eigen::Index j = 0; j < p; ++j) beta(j) = fit.coef[static_cast<std::size_t>(j)].estimate;
  const Eigen::MatrixXd& xtx = model.xtx();
  const Eigen::MatrixXd& a = model.etx();

  // Cov([X'e; E'e]) = sigma^2 G with G the Gram matrix of [X, E].
  Eigen::MatrixXd g(m, m);
  g.topLeftCorner(p, p) = xtx;
  g.topRightCorner(p, l) = a.transpose();
  g.bottomLeftCorner(l, p) = a;
  g.bottomRightCorner(l, l).setIdentity();
  const Eigen::LLT<Eigen::MatrixXd> chol(g);
  if (chol.info() != Eigen::Success) {
    throw SingularDesignError(kModule, "covariates are collinear with the eigenvector basis");
  }
  const Eigen::MatrixXd lg = chol.matrixL();

  const double sigma = std::sqrt(fit.sigma2);
  const Eigen::VectorXd gamma_sd =
      (fit.sigma2 * std::exp(fit.variance.log_tau) *
       model.scaled_lambda().array().pow(fit.variance.alpha)).sqrt().matrix();
  const Eigen::VectorXd xtx_beta = xtx * beta;
  const Eigen::VectorXd a_beta = a * beta;
  const double fixed_ss = beta.dot(xtx_beta);
  const VarianceParams start[] = {fit.variance};

  std::vector<Draw> draws(static_cast<std::size_t>(n_boot));
  const auto t0 = std::chrono::steady_clock::now();
  parallel_for(draws.size(), threads, [&](std::size_t it) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(it)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal;

    Eigen::VectorXd gamma(l);
    for (Eigen::Index j = 0; j < l; ++j) gamma(j) = gamma_sd(j) * normal(rng);
    Eigen::VectorXd z(m);
    for (Eigen::Index j = 0; j < m; ++j) z(j) = normal(rng);
    const Eigen::VectorXd u = sigma * (lg * z);
    double resid_ss = 0.0;
    if (resid_df > 0) resid_ss = std::chi_squared_distribution<double>(static_cast<double>(resid_df))(rng);
    const double noise_ss = fit.sigma2 * (z.squaredNorm() + resid_ss);

    ResponseMoments mom;
    mom.xty = xtx_beta + a.transpose() * gamma + u.head(p);
    mom.ety = a_beta + gamma + u.tail(l);
    mom.yty = fixed_ss + 2.0 * a_beta.dot(gamma) + gamma.squaredNorm() +
              2.0 * (beta.dot(u.head(p)) + gamma.dot(u.tail(l))) + noise_ss;

    Draw& d = draws[it];
    d.dimension = static_cast<long>(mom.xty.size() + mom.ety.size());
    try {
      const VarianceParams theta = model.optimize(mom, method, start);
      const ProfileEvaluation ev = model.evaluate(mom, theta, method);
      if (!ev.ok) return;
      const ShrinkageParams s = model.shrinkage(ev.sigma2, theta);
      d.beta = ev.beta;
      d.sigma_gamma = s.sigma_gamma;
      d.alpha = s.alpha;
      d.ok = true;
    } catch (const ConvergenceError&) {
    }
  });
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  BootstrapResult out;
  out.diagnostics.iterations = n_boot;
  out.diagnostics.seconds_per_iteration = elapsed / n_boot;
  for (const Draw& d : draws) {
    out.diagnostics.working_dimension = std::max(out.diagnostics.working_dimension, d.dimension);
    if (!d.ok) ++out.diagnostics.failures;
  }
  if (out.diagnostics.failures > kMaxFailureShare * n_boot) {
    throw BootstrapUnstableError(kModule, std::to_string(out.diagnostics.failures) + " of " +
                                              std::to_string(n_boot) + " bootstrap refits failed");
  }

  auto collect = [&](auto&& get) {
    std::vector<double> v;
    for (const Draw& d : draws)
      if (d.ok) v.push_back(get(d));
    return v;
  };
  for (Eigen::Index j = 0; j < p; ++j) {
    const CoefRow& c = fit.coef[static_cast<std::size_t>(j)];
    out.b.push_back(summarize(c.name, c.estimate, collect([j](const Draw& d) { return d.beta(j); }), n_boot));
  }
  out.s.push_back(summarize("shrink_sf_SE", fit.shrinkage.sigma_gamma,
                            collect([](const Draw& d) { return d.sigma_gamma; }), n_boot));
  out.s.push_back(summarize("shrink_sf_alpha", fit.shrinkage.alpha,
                            collect([](const Draw& d) { return d.alpha; }), n_boot));
  return out;
}

}  // namespace moran

#include <doctest.h>

#include <cmath>

#include "moran/errors.hpp"
#include "moran/esf.hpp"
#include "moran/mixed.hpp"
#include "support.hpp"

using namespace moran;

namespace {
struct HandCase {
  Eigen::VectorXd y{8};
  Eigen::MatrixXd x{8, 2};
  EigenBasis basis;
  HandCase() {
    y << 1.3, 0.2, 2.1, -0.4, 0.9, 1.7, 0.6, -0.3;
    x.col(0).setOnes();
    x.col(1) << 0.5, -1.0, 0.3, 1.2, -0.7, 0.1, 0.9, -0.2;
    basis = meigen(CoordinateSet(testing::reference_sites()));
  }
};

struct Simulated {
  Eigen::VectorXd y;
  Eigen::MatrixXd x;
  EigenBasis basis;
};

Simulated simulate(unsigned seed, Eigen::Index n, double sigma_gamma, double alpha) {
  std::mt19937_64 rng(seed);
  Simulated s;
  s.basis = meigen(CoordinateSet(testing::uniform_points(n, rng)), 0.0, Eigen::Index{60});
  s.x = testing::normal_matrix(n, 1, rng);
  const Eigen::VectorXd lam = s.basis.values / s.basis.values(0);
  Eigen::VectorXd gamma = testing::normal_vector(s.basis.count(), rng);
  gamma = gamma.cwiseProduct((sigma_gamma * sigma_gamma * lam.array().pow(alpha)).sqrt().matrix());
  s.y = Eigen::VectorXd::Constant(n, 2.0) - s.x.col(0) + s.basis.vectors * gamma + testing::normal_vector(n, rng);
  return s;
}
}  // namespace

TEST_CASE("lambda_alpha is a power") {
  const Eigen::Vector2d lam(4.0, 1.0);
  CHECK(lambda_alpha(lam, 0.0) == Eigen::Vector2d(1.0, 1.0));
  CHECK(lambda_alpha(lam, 1.0) == lam);
  CHECK(lambda_alpha(lam, 2.0) == Eigen::Vector2d(16.0, 1.0));
  CHECK_THROWS_AS(lambda_alpha(Eigen::Vector2d(1.0, 0.0), 1.0), InputError);
  CHECK_THROWS_AS(lambda_alpha(lam, kAlphaMax + 1.0), InputError);
}

TEST_CASE("profile likelihood matches the scipy dense oracle") {
  const HandCase h;
  REQUIRE(h.basis.count() == 2);
  struct Ref { double log_tau, alpha, ml1, reml1, ml2, reml2; };
  const Ref refs[] = {
      {std::log(0.1), 1.0, -10.06931234911918, -10.155140834846046, -10.065335467151824, -10.152549960384238},
      {0.0, 0.5, -10.174138527889685, -10.299352771731472, -10.012572181139753, -10.193976678303054},
      {1.3, 2.0, -10.452068702063528, -10.607298178713279, -10.441914524107684, -10.600457934981627},
      {-3.0, 0.0, -10.065637741411589, -10.147506006988175, -10.03172989883581, -10.125580681357707},
  };
  const Eigen::MatrixXd e1 = h.basis.vectors.leftCols(1);
  const Eigen::VectorXd l1 = h.basis.values.head(1);
  for (const Ref& r : refs) {
    const VarianceParams t{r.log_tau, r.alpha};
    CHECK(reml_profile_loglik(h.y, h.x, e1, l1, t, EstimationMethod::ml) == doctest::Approx(r.ml1).epsilon(1e-10));
    CHECK(reml_profile_loglik(h.y, h.x, e1, l1, t, EstimationMethod::reml) == doctest::Approx(r.reml1).epsilon(1e-10));
    CHECK(reml_profile_loglik(h.y, h.x, h.basis.vectors, h.basis.values, t, EstimationMethod::ml) ==
          doctest::Approx(r.ml2).epsilon(1e-10));
    CHECK(reml_profile_loglik(h.y, h.x, h.basis.vectors, h.basis.values, t, EstimationMethod::reml) ==
          doctest::Approx(r.reml2).epsilon(1e-10));
  }
}

TEST_CASE("profile likelihood matches the dense oracle on random cases") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> lt(-4.0, 3.0), al(0.0, 4.0);
  for (int rep = 0; rep < 10; ++rep) {
    const Eigen::Index n = 20 + 3 * rep;
    const EigenBasis b = meigen(CoordinateSet(testing::uniform_points(n, rng)), 0.0, Eigen::Index{5});
    Eigen::MatrixXd x(n, 3);
    x << Eigen::VectorXd::Ones(n), testing::normal_matrix(n, 2, rng);
    const Eigen::VectorXd y = testing::normal_vector(n, rng);
    const double a = lt(rng), c = al(rng);
    for (bool reml : {false, true}) {
      const auto m = reml ? EstimationMethod::reml : EstimationMethod::ml;
      const double oracle = testing::dense_profile_loglik(y, x, b.vectors, b.values, a, c, reml);
      CHECK(reml_profile_loglik(y, x, b.vectors, b.values, {a, c}, m) == doctest::Approx(oracle).epsilon(1e-9));
      const ResfModel model(x, b);
      CHECK(model.log_lik(model.moments(y), {a, c}, m) == doctest::Approx(oracle).epsilon(1e-9));
    }
  }
}

TEST_CASE("vanishing random effect gives the OLS likelihood and estimates") {
  const Simulated s = simulate(22, 80, 1.0, 1.0);
  Eigen::MatrixXd design(80, 2);
  design << Eigen::VectorXd::Ones(80), s.x;
  const OlsResult ols = ols_fit(s.y, design);
  const ResfModel model(design, s.basis);
  const auto ev = model.evaluate(model.moments(s.y), {-60.0, 1.0}, EstimationMethod::ml);
  CHECK((ev.beta - ols.coef).cwiseAbs().maxCoeff() < 1e-8 * ols.coef.cwiseAbs().maxCoeff());
  CHECK(ev.log_lik == doctest::Approx(error_stats(ols, s.y).log_lik).epsilon(1e-10));
}

TEST_CASE("resf recovers fixed effects with no spatial signal") {
  const Simulated s = simulate(23, 400, 0.0, 1.0);
  const ResfFit fit = resf(s.y, s.x, s.basis);
  CHECK(std::abs(fit.coef[0].estimate - 2.0) < 3.0 * fit.coef[0].se);
  CHECK(std::abs(fit.coef[1].estimate + 1.0) < 3.0 * fit.coef[1].se);
  CHECK(fit.shrinkage.sigma_gamma < 0.5);
  for (const auto& c : fit.coef) CHECK(c.se > 0.0);
}

TEST_CASE("REML variance is at least the ML variance") {
  for (unsigned seed = 30; seed < 33; ++seed) {
    const Simulated s = simulate(seed, 150, 1.5, 1.0);
    const ResfFit reml = resf(s.y, s.x, s.basis, EstimationMethod::reml);
    const ResfFit ml = resf(s.y, s.x, s.basis, EstimationMethod::ml);
    CHECK(reml.sigma2 >= ml.sigma2 * (1.0 - 1e-6));
    CHECK(reml.stats.method == EstimationMethod::reml);
  }
}

TEST_CASE("no neighbouring point beats the optimum") {
  const Simulated s = simulate(40, 200, 2.0, 1.0);
  Eigen::MatrixXd design(200, 2);
  design << Eigen::VectorXd::Ones(200), s.x;
  const ResfModel model(design, s.basis);
  const auto mom = model.moments(s.y);
  const auto starts = default_variance_starts();
  const VarianceParams t = model.optimize(mom, EstimationMethod::reml, starts);
  const double best = model.log_lik(mom, t, EstimationMethod::reml);
  for (double dt : {-1e-3, 1e-3})
    for (double da : {-1e-3, 0.0, 1e-3}) {
      const VarianceParams nb{t.log_tau + dt, std::clamp(t.alpha + da, 0.0, kAlphaMax)};
      CHECK(model.log_lik(mom, nb, EstimationMethod::reml) <= best + 1e-7);
    }
}

TEST_CASE("conditional statistics match a dense computation") {
  const Simulated s = simulate(41, 50, 1.5, 1.0);
  const ResfFit fit = resf(s.y, s.x, s.basis);
  const Eigen::Index n = 50, p = 2;
  Eigen::MatrixXd x(n, p);
  x << Eigen::VectorXd::Ones(n), s.x;
  const Eigen::MatrixXd& e = s.basis.vectors;
  const Eigen::VectorXd w = std::exp(fit.variance.log_tau) *
                            (s.basis.values / s.basis.values(0)).array().pow(fit.variance.alpha).matrix();
  const Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n) + e * w.asDiagonal() * e.transpose();
  const Eigen::MatrixXd vi = v.inverse();
  const Eigen::MatrixXd gls = (x.transpose() * vi * x).inverse() * x.transpose() * vi;
  const Eigen::MatrixXd hat = x * gls + e * w.asDiagonal() * e.transpose() * vi * (Eigen::MatrixXd::Identity(n, n) - x * gls);
  const Eigen::VectorXd fitted = hat * s.y;
  const double p_eff = hat.trace();
  const double rss = (s.y - fitted).squaredNorm();
  const double tss = (s.y.array() - s.y.mean()).square().sum();
  const double ll = testing::dense_profile_loglik(s.y, x, e, s.basis.values, fit.variance.log_tau, fit.variance.alpha, true);
  const double beta0 = (gls * s.y)(0);
  const Eigen::VectorXd r = s.y - x * (gls * s.y);
  const double sigma2 = r.dot(vi * r) / double(n - p);

  CHECK(fit.coef[0].estimate == doctest::Approx(beta0).epsilon(1e-9));
  CHECK((fit.fitted - fitted).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(fit.stats.effective_df == doctest::Approx(p_eff).epsilon(1e-9));
  CHECK(fit.stats.adj_r2_cond == doctest::Approx(1.0 - (rss / (n - p_eff)) / (tss / (n - 1.0))).epsilon(1e-9));
  CHECK(fit.stats.log_lik == doctest::Approx(ll).epsilon(1e-9));
  CHECK(fit.stats.resid_se == doctest::Approx(std::sqrt(sigma2)).epsilon(1e-9));
  CHECK(fit.stats.n_params == 5);
  CHECK(fit.stats.aic == doctest::Approx(-2.0 * ll + 10.0));
  CHECK(fit.stats.bic == doctest::Approx(-2.0 * ll + std::log(50.0) * 5.0));
  CHECK(fit.shrinkage.sigma_gamma ==
        doctest::Approx(std::sqrt(sigma2 * std::exp(fit.variance.log_tau) * std::pow(s.basis.values(0), -fit.variance.alpha))));
}

TEST_CASE("conditional statistics edge cases") {
  Eigen::VectorXd y(5);
  y << 1, 2, 3, 4, 6;
  const ResfStats perfect = conditional_stats(y, y, 0.0, 2.0, -1.0, 4, EstimationMethod::ml);
  CHECK(perfect.adj_r2_cond == 1.0);
}

TEST_CASE("non-orthonormal bases and bad methods are rejected") {
  const HandCase h;
  EigenBasis b = h.basis;
  b.vectors *= 2.0;
  CHECK_THROWS_AS(resf(h.y, h.x.rightCols(1), b), InputError);
  CHECK_THROWS_AS(parse_method("gmm"), InputError);
  CHECK(parse_method("ml") == EstimationMethod::ml);
}

TEST_CASE("varying intercept alone reproduces resf") {
  const Simulated s = simulate(50, 120, 1.5, 1.0);
  const ResfFit r = resf(s.y, s.x, s.basis);
  const SvcFit v = resf_vc(s.y, Eigen::MatrixXd(120, 0), s.x, s.basis);
  REQUIRE(v.b_const.size() == 1);
  CHECK(v.b_vc_mean[0].estimate == doctest::Approx(r.coef[0].estimate).epsilon(1e-4));
  CHECK(v.b_const[0].estimate == doctest::Approx(r.coef[1].estimate).epsilon(1e-4));
  CHECK(v.shrinkage[0].sigma_gamma == doctest::Approx(r.shrinkage.sigma_gamma).epsilon(1e-3));
  CHECK(v.stats.log_lik == doctest::Approx(r.stats.log_lik).epsilon(1e-6));
}

TEST_CASE("svc output shapes and p-values") {
  std::mt19937_64 rng(51);
  const Eigen::Index n = 150;
  const EigenBasis b = meigen(CoordinateSet(testing::uniform_points(n, rng)), 0.0, Eigen::Index{20});
  const Eigen::MatrixXd xv = testing::normal_matrix(n, 2, rng);
  const Eigen::MatrixXd xc = testing::normal_matrix(n, 1, rng);
  const Eigen::VectorXd slope = Eigen::VectorXd::Constant(n, 1.0) + 2.0 * b.vectors.col(0);
  const Eigen::VectorXd y = Eigen::VectorXd::Constant(n, 1.0) + xv.col(0).cwiseProduct(slope) + 0.5 * xv.col(1) - xc.col(0) +
                            testing::normal_vector(n, rng, 0.3);
  const SvcFit f = resf_vc(y, xv, xc, b, EstimationMethod::reml, {"s", "t"}, {"c"});
  CHECK(f.b_vc.rows() == n);
  CHECK(f.b_vc.cols() == 3);
  CHECK(f.vc_names == std::vector<std::string>{"(Intercept)", "s", "t"});
  CHECK(f.p_vc.minCoeff() >= 0.0);
  CHECK(f.p_vc.maxCoeff() <= 1.0);
  CHECK(f.se_vc.minCoeff() > 0.0);
  CHECK(f.shrinkage.size() == 3);
  CHECK(f.stats.n_params == 4 + 1 + 6);
  CHECK(f.b_const[0].name == "c");
  CHECK(f.warnings.empty());
  Eigen::VectorXd c = f.b_vc.col(1).array() - f.b_vc.col(1).mean();
  Eigen::VectorXd t = slope.array() - slope.mean();
  CHECK(c.dot(t) / (c.norm() * t.norm()) > 0.9);
}

TEST_CASE("many varying coefficients warn") {
  std::mt19937_64 rng(52);
  const Eigen::Index n = 60;
  const EigenBasis b = meigen(CoordinateSet(testing::uniform_points(n, rng)), 0.0, Eigen::Index{4});
  const Eigen::MatrixXd xv = testing::normal_matrix(n, 5, rng);
  const Eigen::VectorXd y = xv.rowwise().sum() + testing::normal_vector(n, rng);
  const SvcFit f = resf_vc(y, xv, Eigen::MatrixXd(n, 0), b);
  CHECK(f.warnings.size() == 1);
}

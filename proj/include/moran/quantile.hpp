#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "moran/eigen.hpp"
#include "moran/mixed.hpp"
#include "moran/stats.hpp"

namespace moran {

/// Recentered influence function of the tau-quantile.
struct RifVector {
  Eigen::VectorXd r;
  double tau = 0.0;
  double q = 0.0;          // type-7 empirical quantile
  double f_hat = 0.0;      // Gaussian KDE at q
  double bandwidth = 0.0;  // Silverman's rule of thumb
};

/// 0.9 * min(sd, IQR / 1.34) * N^(-1/5), falling back to sd when the IQR is 0.
double silverman_bandwidth(const Eigen::VectorXd& y);

/// Gaussian kernel density estimate of y at x.
double gaussian_kde(const Eigen::VectorXd& y, double x, double bandwidth);

/// RIF_i = q + (tau - 1{y_i <= q}) / f_hat(q). Needs N >= 10 and non-constant y.
RifVector rif(const Eigen::VectorXd& y, double tau);

/// Bootstrap summary of one parameter.
struct BootRow {
  std::string name;
  double estimate = 0.0;
  double lo95 = 0.0;
  double hi95 = 0.0;
  double p_value = 0.0;
};

using BootTable = std::vector<BootRow>;

struct BootDiagnostics {
  int iterations = 0;
  int failures = 0;
  long working_dimension = 0;   // length of the statistics each iteration touches
  double seconds_per_iteration = 0.0;
};

struct BootstrapResult {
  BootTable b;  // fixed effects
  BootTable s;  // shrink_sf_SE, shrink_sf_alpha
  BootDiagnostics diagnostics;
};

/// Parametric resampling in the (P + L)-dimensional space spanned by [X, E].
/// Each draw regenerates X'y*, E'y* and y*'y* from the fitted model and
/// refits the variance parameters, so no iteration touches an N-vector.
/// `stream` separates the random streams of different fits sharing a seed.
/// Throws BootstrapUnstableError when more than 20% of refits fail.
BootstrapResult semiparametric_bootstrap(const ResfModel& model, const ResfFit& fit,
                                         EstimationMethod method, int n_boot, std::uint64_t seed,
                                         unsigned threads = 0, std::uint64_t stream = 0);

inline constexpr int kDefaultBootstrapDraws = 200;
inline constexpr std::uint64_t kDefaultSeed = 20170913;

struct QrOptions {
  std::vector<double> taus{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  bool boot = false;
  int n_boot = kDefaultBootstrapDraws;
  std::uint64_t seed = kDefaultSeed;
  unsigned threads = 0;
  EstimationMethod method = EstimationMethod::reml;
};

struct QrTauFit {
  double tau = 0.0;
  double q = 0.0;
  double f_hat = 0.0;
  CoefTable b;
  ShrinkageParams s;
  ResfStats e;  // adj_r2_cond is reported as quasi_adjR2(cond)
  std::optional<BootstrapResult> boot;
};

struct QrFit {
  std::vector<QrTauFit> per_tau;  // increasing tau
  bool boot = false;
  int n_boot = 0;
  std::uint64_t seed = 0;
};

/// Spatially filtered unconditional quantile regression.
QrFit resf_qr(const Eigen::VectorXd& y, const Eigen::MatrixXd& x, const EigenBasis& basis,
              const QrOptions& options = {}, std::vector<std::string> x_names = {});

}  // namespace moran

#include "moran/esf.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "moran/errors.hpp"

namespace moran {

namespace {

constexpr const char* kModule = "esf";
constexpr double kRankTolerance = 1e-9;
constexpr double kCollinearTolerance = 1e-10;
constexpr double kInf = std::numeric_limits<double>::infinity();

double total_sum_of_squares(const Eigen::VectorXd& y) {
  return (y.array() - y.mean()).square().sum();
}

double gaussian_loglik(double rss, Eigen::Index n) {
  const double nn = static_cast<double>(n);
  return -0.5 * nn * (std::log(2.0 * std::numbers::pi) + std::log(rss / nn) + 1.0);
}

// Larger is better for every criterion after this transform.
double score(SelectionCriterion c, double rss, double tss, Eigen::Index n, Eigen::Index p) {
  const double nn = static_cast<double>(n);
  switch (c) {
    case SelectionCriterion::r2:
      return 1.0 - (rss / static_cast<double>(n - p)) / (tss / (nn - 1.0));
    case SelectionCriterion::aic:
      return 2.0 * gaussian_loglik(rss, n) - 2.0 * static_cast<double>(p + 1);
    case SelectionCriterion::bic:
      return 2.0 * gaussian_loglik(rss, n) - std::log(nn) * static_cast<double>(p + 1);
    case SelectionCriterion::all:
      break;
  }
  return 0.0;
}

double reported(SelectionCriterion c, double s) {
  return c == SelectionCriterion::r2 ? s : -s;
}

// Inverse of a symmetric positive definite matrix; empty input gives empty output.
Eigen::MatrixXd spd_inverse(const Eigen::MatrixXd& g) {
  if (g.rows() == 0) return g;
  return g.ldlt().solve(Eigen::MatrixXd::Identity(g.rows(), g.cols()));
}

Eigen::VectorXd vif_per_column(const Eigen::MatrixXd& centered) {
  const Eigen::Index n = centered.rows();
  const Eigen::Index p = centered.cols();
  Eigen::VectorXd out(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double tss = centered.col(j).squaredNorm();
    if (!(tss > 0.0)) {
      out(j) = kInf;
      continue;
    }
    if (p == 1) {
      out(j) = 1.0;
      continue;
    }
    Eigen::MatrixXd others(n, p - 1);
    for (Eigen::Index c = 0, m = 0; c < p; ++c)
      if (c != j) others.col(m++) = centered.col(c);
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(others);
    const Eigen::VectorXd fit = others * qr.solve(centered.col(j));
    const double rss = (centered.col(j) - fit).squaredNorm();
    out(j) = rss <= kCollinearTolerance * tss ? kInf : tss / rss;
  }
  return out;
}

}  // namespace

std::vector<std::string> covariate_names(std::vector<std::string> names, Eigen::Index k,
                                         const char* module) {
  if (names.empty()) {
    for (Eigen::Index j = 0; j < k; ++j) names.push_back("x" + std::to_string(j + 1));
  } else if (static_cast<Eigen::Index>(names.size()) != k) {
    throw InputError(module, "got " + std::to_string(names.size()) + " names for " +
                                 std::to_string(k) + " covariates");
  }
  return names;
}

std::string eigenvector_name(Eigen::Index index) { return "sf" + std::to_string(index + 1); }

SelectionCriterion parse_criterion(const std::string& name) {
  if (name == "r2") return SelectionCriterion::r2;
  if (name == "aic") return SelectionCriterion::aic;
  if (name == "bic") return SelectionCriterion::bic;
  if (name == "all") return SelectionCriterion::all;
  throw InputError(kModule, "unknown selection criterion '" + name + "' (use r2, aic, bic or all)");
}

const char* to_string(SelectionCriterion c) noexcept {
  switch (c) {
    case SelectionCriterion::r2:
      return "r2";
    case SelectionCriterion::aic:
      return "aic";
    case SelectionCriterion::bic:
      return "bic";
    case SelectionCriterion::all:
      return "all";
  }
  return "unknown";
}

void check_full_rank(const Eigen::MatrixXd& design, const char* module) {
  const Eigen::Index n = design.rows();
  const Eigen::Index p = design.cols();
  if (p >= n) {
    throw SingularDesignError(module, "design has " + std::to_string(p) + " columns but only " +
                                          std::to_string(n) + " observations", p - 1);
  }
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(design);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double scale = design.col(j).norm();
    if (!(std::abs(qr.matrixQR()(j, j)) > kRankTolerance * scale)) {
      throw SingularDesignError(module, "design is rank deficient at column " + std::to_string(j + 1), j);
    }
  }
}

OlsResult ols_fit(const Eigen::VectorXd& y, const Eigen::MatrixXd& design) {
  const Eigen::Index n = design.rows();
  const Eigen::Index p = design.cols();
  if (y.size() != n) throw InputError(kModule, "response length does not match the design");
  if (p == 0) throw InputError(kModule, "design has no columns");
  check_full_rank(design, kModule);

  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(design);
  const Eigen::MatrixXd r = qr.matrixQR().topRows(p).triangularView<Eigen::Upper>();

  OlsResult out;
  const Eigen::VectorXd qty = (qr.householderQ().transpose() * y).head(p);
  out.coef = r.triangularView<Eigen::Upper>().solve(qty);
  out.residuals = y - design * out.coef;
  out.rss = out.residuals.squaredNorm();
  out.df = n - p;

  const Eigen::MatrixXd r_inv =
      r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
  const Eigen::VectorXd unscaled = r_inv.rowwise().squaredNorm();
  const double sigma2 = out.rss / static_cast<double>(out.df);
  out.se = (sigma2 * unscaled).cwiseSqrt();
  out.t_value = out.coef.cwiseQuotient(out.se);
  out.p_value.resize(p);
  for (Eigen::Index j = 0; j < p; ++j)
    out.p_value(j) = student_t_p_value(out.t_value(j), static_cast<double>(out.df));
  return out;
}

Eigen::VectorXd vif(const Eigen::MatrixXd& columns) {
  const Eigen::Index p = columns.cols();
  if (p == 0) return Eigen::VectorXd();
  Eigen::MatrixXd centered = columns;
  centered.rowwise() -= centered.colwise().mean();
  if (p == 1) return vif_per_column(centered);

  const Eigen::MatrixXd g = centered.transpose() * centered;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
  const double top = es.eigenvalues().maxCoeff();
  if (!(es.eigenvalues().minCoeff() > 1e-12 * top)) return vif_per_column(centered);
  return g.diagonal().cwiseProduct(spd_inverse(g).diagonal());
}

ErrorStats error_stats(const OlsResult& fit, const Eigen::VectorXd& y) {
  const Eigen::Index n = fit.residuals.size();
  const Eigen::Index p = n - fit.df;
  const double nn = static_cast<double>(n);
  ErrorStats s;
  s.resid_se = std::sqrt(fit.rss / static_cast<double>(fit.df));
  s.adj_r2 = 1.0 - (fit.rss / static_cast<double>(fit.df)) / (total_sum_of_squares(y) / (nn - 1.0));
  s.log_lik = gaussian_loglik(fit.rss, n);
  const double k = static_cast<double>(p + 1);
  s.aic = -2.0 * s.log_lik + 2.0 * k;
  s.bic = -2.0 * s.log_lik + std::log(nn) * k;
  return s;
}

LinearFit esf(const Eigen::VectorXd& y, const Eigen::MatrixXd& x, const EigenBasis& basis,
              const EsfOptions& options, std::vector<std::string> x_names) {
  const Eigen::Index n = y.size();
  const Eigen::Index k = x.cols();
  const Eigen::Index l = basis.count();
  if (x.rows() != n) throw InputError(kModule, "covariate rows do not match the response length");
  if (basis.sample_size() != n) {
    throw InputError(kModule, "eigenvector basis has " + std::to_string(basis.sample_size()) +
                                  " rows but the response has " + std::to_string(n));
  }
  if (options.vif_max && !(*options.vif_max > 0.0)) throw InputError(kModule, "vif cap must be positive");
  x_names = covariate_names(std::move(x_names), k, kModule);
  const Eigen::MatrixXd& e = basis.vectors;

  LinearFit fit;
  fit.criterion = options.fn;

  if (options.fn == SelectionCriterion::all) {
    for (Eigen::Index j = 0; j < l; ++j) fit.selected.push_back(j);
  } else {
    // Forward selection with an incrementally maintained orthonormal basis of the design.
    const double tss = total_sum_of_squares(y);
    Eigen::MatrixXd base(n, k + 1);
    base.col(0).setOnes();
    base.rightCols(k) = x;
    check_full_rank(base, kModule);

    Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(base).householderQ() *
                        Eigen::MatrixXd::Identity(n, k + 1);
    Eigen::VectorXd resid = y - q * (q.transpose() * y);
    double rss = resid.squaredNorm();
    Eigen::Index p = k + 1;

    // Centred non-intercept columns and their Gram inverse, for the VIF screen.
    Eigen::MatrixXd centered = x;
    centered.rowwise() -= centered.colwise().mean();
    Eigen::MatrixXd gram = centered.transpose() * centered;
    Eigen::MatrixXd gram_inv = spd_inverse(gram);

    double current = score(options.fn, rss, tss, n, p);
    fit.criterion_path.push_back(reported(options.fn, current));
    std::vector<char> used(static_cast<std::size_t>(l), 0);

    while (p + 1 < n) {
      Eigen::Index best = -1;
      double best_score = current;
      for (Eigen::Index j = 0; j < l; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const Eigen::VectorXd proj = q.transpose() * e.col(j);
        const double norm2 = e.col(j).squaredNorm();
        const double orth2 = norm2 - proj.squaredNorm();
        if (!(orth2 > kCollinearTolerance * norm2)) continue;

        if (options.vif_max) {
          const Eigen::VectorXd ej = e.col(j).array() - e.col(j).mean();
          const Eigen::VectorXd b = centered.transpose() * ej;
          const double c = ej.squaredNorm();
          const Eigen::VectorXd gb = gram_inv * b;
          const double schur = c - b.dot(gb);
          if (!(schur > kCollinearTolerance * c)) continue;
          bool ok = c / schur <= *options.vif_max;
          for (Eigen::Index i = 0; ok && i < gram.rows(); ++i) {
            const double v = gram(i, i) * (gram_inv(i, i) + gb(i) * gb(i) / schur);
            ok = v <= *options.vif_max;
          }
          if (!ok) continue;
        }

        const double dot = resid.dot(e.col(j));
        const double cand_rss = std::max(0.0, rss - dot * dot / orth2);
        const double s = score(options.fn, cand_rss, tss, n, p + 1);
        if (s > best_score) {
          best_score = s;
          best = j;
        }
      }
      if (best < 0) break;

      used[static_cast<std::size_t>(best)] = 1;
      fit.selected.push_back(best);
      Eigen::VectorXd v = e.col(best);
      for (int pass = 0; pass < 2; ++pass) v -= q * (q.transpose() * v);
      v.normalize();
      q.conservativeResize(Eigen::NoChange, p + 1);
      q.col(p) = v;
      ++p;
      resid -= v * v.dot(resid);
      rss = resid.squaredNorm();
      current = score(options.fn, rss, tss, n, p);
      fit.criterion_path.push_back(reported(options.fn, current));

      centered.conservativeResize(Eigen::NoChange, centered.cols() + 1);
      centered.rightCols(1) = e.col(best).array() - e.col(best).mean();
      gram = centered.transpose() * centered;
      gram_inv = spd_inverse(gram);
    }
  }

  const Eigen::Index s = static_cast<Eigen::Index>(fit.selected.size());
  Eigen::MatrixXd design(n, 1 + k + s);
  design.col(0).setOnes();
  design.middleCols(1, k) = x;
  for (Eigen::Index j = 0; j < s; ++j) design.col(1 + k + j) = e.col(fit.selected[static_cast<std::size_t>(j)]);
  const OlsResult ols = ols_fit(y, design);

  std::vector<std::string> names{"(Intercept)"};
  names.insert(names.end(), x_names.begin(), x_names.end());
  for (const auto j : fit.selected) names.push_back(eigenvector_name(j));
  for (Eigen::Index j = 0; j < design.cols(); ++j) {
    fit.coef.push_back(CoefRow{names[static_cast<std::size_t>(j)], ols.coef(j), ols.se(j),
                               ols.t_value(j), ols.p_value(j)});
  }
  if (design.cols() > 1) {
    const Eigen::VectorXd v = vif(design.rightCols(design.cols() - 1));
    for (Eigen::Index j = 0; j < v.size(); ++j) fit.vif.push_back(NamedValue{names[static_cast<std::size_t>(j + 1)], v(j)});
  }
  fit.residuals = ols.residuals;
  fit.stats = error_stats(ols, y);
  return fit;
}

}  // namespace moran

#include "cli.hpp"

#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "moran/connectivity.hpp"
#include "moran/eigen.hpp"
#include "moran/errors.hpp"
#include "moran/esf.hpp"
#include "moran/io.hpp"
#include "moran/mixed.hpp"
#include "moran/quantile.hpp"

namespace moran::cli {

namespace {
constexpr const char* kModule = "cli";

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f || !(f << text)) throw InputError(kModule, "cannot write '" + path.string() + "'");
}

void check_config(const RunConfig& c) {
  static const std::vector<std::string> known{"meigen", "esf", "resf", "resf-vc", "resf-qr"};
  if (std::find(known.begin(), known.end(), c.subcommand) == known.end()) {
    throw InputError(kModule, "unknown subcommand '" + c.subcommand + "'");
  }
  const int sources = int(c.kernel) + int(c.knn.has_value()) + int(c.cmat.has_value());
  if (sources != 1) {
    throw InputError(kModule, "specify exactly one connectivity source (--kernel, --knn or --cmat)");
  }
  if (c.fast && !c.kernel) throw InputError(kModule, "--fast approximates the distance kernel; use it with --kernel");
  if (c.subcommand != "meigen" && c.y.empty()) throw InputError(kModule, "--y is required for " + c.subcommand);
  if (c.enum_count && *c.enum_count <= 0) throw InputError(kModule, "--enum must be positive");
  if (c.subcommand == "resf-vc" && c.x.empty()) throw InputError(kModule, "resf-vc needs at least one --x covariate");
}

EigenBasis build_basis(const RunConfig& c, const Dataset& data) {
  if (c.cmat) {
    ConnectivityMatrix cm = user_connectivity(load_matrix_csv(*c.cmat));
    if (cm.size() != data.rows()) {
      throw InputError(kModule, "connectivity matrix has " + std::to_string(cm.size()) +
                                    " rows but the data have " + std::to_string(data.rows()));
    }
    return meigen(cm, c.threshold, c.enum_count);
  }
  const CoordinateSet coords(data.coordinates());
  if (c.fast) {
    NystromOptions opt;
    if (c.enum_count) opt.enum_count = *c.enum_count;
    opt.seed = c.seed;
    return meigen_f(coords, opt);
  }
  if (c.knn) return meigen(knn_graph(coords, *c.knn), c.threshold, c.enum_count);
  return meigen(coords, c.threshold, c.enum_count);
}

Report run_model(const RunConfig& c, const Dataset& data, const EigenBasis& basis) {
  if (c.subcommand == "meigen") return to_report(basis);
  const Eigen::VectorXd y = data.column(c.y);
  const Eigen::MatrixXd x = data.columns_of(c.x);
  if (c.subcommand == "esf") {
    EsfOptions opt;
    opt.fn = parse_criterion(c.fn);
    opt.vif_max = c.vif;
    return to_report(esf(y, x, basis, opt, c.x));
  }
  const EstimationMethod method = parse_method(c.method);
  if (c.subcommand == "resf") return to_report(resf(y, x, basis, method, c.x));
  if (c.subcommand == "resf-vc") {
    return to_report(resf_vc(y, x, data.columns_of(c.xconst), basis, method, c.x, c.xconst));
  }
  QrOptions opt;
  if (!c.taus.empty()) opt.taus = c.taus;
  opt.boot = c.boot;
  opt.n_boot = c.n_boot;
  opt.seed = c.seed;
  opt.threads = c.threads;
  opt.method = method;
  const QrFit fit = resf_qr(y, x, basis, opt, c.x);
  const int k = static_cast<int>(fit.per_tau.front().b.size());
  std::filesystem::create_directories(c.out);
  auto emit = [&](int pnum, char par) {
    const PlotSpec spec = plot_qr(fit, pnum, par);
    const std::string stem = std::string("plot_") + par + "_" + std::to_string(pnum);
    write_file(c.out / (stem + ".svg"), render_svg(spec));
    write_file(c.out / (stem + ".csv"), plot_csv(spec));
  };
  for (int p = 1; p <= k; ++p) emit(p, 'b');
  emit(1, 's');
  emit(2, 's');
  return to_report(fit);
}
}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    check_config(config);
    TableSchema schema;
    if (!config.cmat) {
      schema.px = config.px;
      schema.py = config.py;
    }
    schema.y = config.subcommand == "meigen" ? std::string() : config.y;
    schema.x = config.x;
    schema.xconst = config.xconst;
    const Dataset data = load_table(config.input, schema);
    const EigenBasis basis = build_basis(config, data);
    const Report report = run_model(config, data, basis);

    std::filesystem::create_directories(config.out);
    write_fit(report, OutputFormat::json, config.out / "result.json");
    write_fit(report, OutputFormat::csv, config.out);
    for (const auto& w : report.warnings) err << "warning: " << w << "\n";
    out << config.subcommand << ": wrote " << report.tables.size() << " tables to "
        << config.out.string() << "\n";
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << kModule << ": " << e.what() << "\n";
    return exit_code(ErrorKind::input);
  }
}

int main_entry(int argc, char** argv) {
  CLI::App app{"Moran eigenvector spatial regression"};
  app.require_subcommand(1);
  RunConfig config;
  std::string threads_env_note = "worker threads (default: MORAN_THREADS or all cores)";

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--input", config.input, "CSV file with a header row")->required()->check(CLI::ExistingFile);
    sub->add_option("--px", config.px, "x coordinate column")->capture_default_str();
    sub->add_option("--py", config.py, "y coordinate column")->capture_default_str();
    sub->add_flag("--kernel", config.kernel, "exponential distance kernel with MST range");
    sub->add_option("--knn", config.knn, "k-nearest-neighbour connectivity");
    sub->add_option("--cmat", config.cmat, "headerless CSV connectivity matrix")->check(CLI::ExistingFile);
    sub->add_option("--threshold", config.threshold, "keep eigenpairs with lambda/lambda_1 above this")
        ->check(CLI::Range(0.0, 1.0));
    sub->add_option("--enum", config.enum_count, "cap on eigenvectors (number of knots with --fast)");
    sub->add_flag("--fast", config.fast, "Nystrom approximation");
    sub->add_option("--seed", config.seed, "random seed")->capture_default_str();
    sub->add_option("--out", config.out, "output directory")->capture_default_str();
    sub->add_option("--threads", config.threads, threads_env_note);
  };
  auto add_model = [&](CLI::App* sub) {
    sub->add_option("--y", config.y, "response column")->required();
    sub->add_option("--x", config.x, "covariate columns")->delimiter(',');
  };

  auto* meigen_cmd = app.add_subcommand("meigen", "extract Moran eigenvectors");
  add_common(meigen_cmd);
  auto* esf_cmd = app.add_subcommand("esf", "eigenvector spatial filtering with stepwise selection");
  add_common(esf_cmd);
  add_model(esf_cmd);
  esf_cmd->add_option("--fn", config.fn, "r2, aic, bic or all")->capture_default_str();
  esf_cmd->add_option("--vif", config.vif, "VIF cap for selected eigenvectors");
  auto* resf_cmd = app.add_subcommand("resf", "random-effects ESF");
  add_common(resf_cmd);
  add_model(resf_cmd);
  auto* vc_cmd = app.add_subcommand("resf-vc", "spatially varying coefficients");
  add_common(vc_cmd);
  add_model(vc_cmd);
  vc_cmd->add_option("--xconst", config.xconst, "covariates with constant coefficients")->delimiter(',');
  auto* qr_cmd = app.add_subcommand("resf-qr", "spatially filtered unconditional quantile regression");
  add_common(qr_cmd);
  add_model(qr_cmd);
  qr_cmd->add_option("--tau", config.taus, "quantiles (repeatable or comma list)")->delimiter(',');
  qr_cmd->add_flag("--boot", config.boot, "semiparametric bootstrap intervals");
  qr_cmd->add_option("--n-boot", config.n_boot, "bootstrap draws")->capture_default_str();
  for (auto* sub : {resf_cmd, vc_cmd, qr_cmd})
    sub->add_option("--method", config.method, "reml or ml")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_code(ErrorKind::input);
  }
  config.subcommand = app.get_subcommands().front()->get_name();
  return run(config, std::cout, std::cerr);
}

}  // namespace moran::cli

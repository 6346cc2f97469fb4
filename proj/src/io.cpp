#include "moran/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "moran/errors.hpp"

namespace moran {

namespace {
constexpr const char* kModule = "io";
constexpr std::size_t kMaxReportedCells = 10;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cell += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(trim(cell));
      cell.clear();
    } else {
      cell += ch;
    }
  }
  out.push_back(trim(cell));
  return out;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  return lines;
}

std::optional<double> parse_number(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(kModule, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError(kModule, "cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw InputError(kModule, "write to '" + path.string() + "' failed");
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

double decode_number(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  const auto v = parse_number(s);
  if (!v) throw InputError(kModule, "'" + s + "' is not a number");
  return *v;
}

bool same_number(double a, double b) {
  return a == b || (std::isnan(a) && std::isnan(b));
}

std::string tau_label(double tau) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "tau=%.6g", tau);
  return buf;
}

std::vector<std::string> index_labels(Eigen::Index n) {
  std::vector<std::string> out;
  for (Eigen::Index i = 0; i < n; ++i) out.push_back(std::to_string(i + 1));
  return out;
}

Table coef_table(const CoefTable& rows) {
  Table t;
  t.columns = {"Estimate", "SE", "t_value", "p_value"};
  t.values.resize(static_cast<Eigen::Index>(rows.size()), 4);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    t.rows.push_back(rows[i].name);
    t.values.row(r) << rows[i].estimate, rows[i].se, rows[i].t_value, rows[i].p_value;
  }
  return t;
}

Table column_table(const std::string& column, const std::vector<NamedValue>& rows) {
  Table t;
  t.columns = {column};
  t.values.resize(static_cast<Eigen::Index>(rows.size()), 1);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    t.rows.push_back(rows[i].name);
    t.values(static_cast<Eigen::Index>(i), 0) = rows[i].value;
  }
  return t;
}

Table mixed_stats_table(const ResfStats& s) {
  const char* ll = s.method == EstimationMethod::reml ? "rlogLik" : "logLik";
  return column_table("stat", {{"resid_SE", s.resid_se},
                               {"adjR2(cond)", s.adj_r2_cond},
                               {ll, s.log_lik},
                               {"AIC", s.aic},
                               {"BIC", s.bic}});
}

Table matrix_table(const Eigen::MatrixXd& m, std::vector<std::string> columns) {
  return Table{std::move(columns), index_labels(m.rows()), m};
}

Table boot_table(const std::vector<QrTauFit>& per_tau, bool shrinkage) {
  Table t;
  t.columns = {"tau", "estimate", "lo95", "hi95", "p"};
  std::vector<std::array<double, 5>> rows;
  for (const auto& f : per_tau) {
    for (const BootRow& r : shrinkage ? f.boot->s : f.boot->b) {
      t.rows.push_back(r.name);
      rows.push_back({f.tau, r.estimate, r.lo95, r.hi95, r.p_value});
    }
  }
  t.values.resize(static_cast<Eigen::Index>(rows.size()), 5);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (Eigen::Index j = 0; j < 5; ++j) t.values(static_cast<Eigen::Index>(i), j) = rows[i][static_cast<std::size_t>(j)];
  return t;
}
}  // namespace

std::vector<std::string> TableSchema::designated() const {
  std::vector<std::string> out;
  for (const std::string* s : {&px, &py, &y})
    if (!s->empty()) out.push_back(*s);
  out.insert(out.end(), x.begin(), x.end());
  out.insert(out.end(), xconst.begin(), xconst.end());
  return out;
}

Eigen::Index Dataset::index(const std::string& name) const {
  for (std::size_t j = 0; j < columns.size(); ++j)
    if (columns[j] == name) return static_cast<Eigen::Index>(j);
  throw InputError(kModule, "missing column '" + name + "'");
}

Eigen::VectorXd Dataset::column(const std::string& name) const { return values.col(index(name)); }

Eigen::MatrixXd Dataset::columns_of(const std::vector<std::string>& names) const {
  Eigen::MatrixXd out(rows(), static_cast<Eigen::Index>(names.size()));
  for (std::size_t j = 0; j < names.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = column(names[j]);
  return out;
}

Eigen::MatrixX2d Dataset::coordinates() const {
  if (schema.px.empty() || schema.py.empty()) throw InputError(kModule, "coordinate columns are not designated");
  Eigen::MatrixX2d out(rows(), 2);
  out.col(0) = column(schema.px);
  out.col(1) = column(schema.py);
  return out;
}

Dataset parse_table(const std::string& text, const TableSchema& schema, const std::string& source) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw InputError(kModule, source + " is empty");
  Dataset d;
  d.schema = schema;
  d.columns = split_csv_line(lines.front());
  std::set<std::string> seen;
  for (const auto& c : d.columns) {
    if (c.empty()) throw InputError(kModule, source + " has an empty column name in the header");
    if (!seen.insert(c).second) throw InputError(kModule, source + " repeats column '" + c + "'");
  }
  if (lines.size() == 1) throw InputError(kModule, source + " has a header but no data rows");

  std::vector<bool> required(d.columns.size(), false);
  for (const auto& name : schema.designated()) {
    if (!seen.count(name)) throw InputError(kModule, source + " is missing column '" + name + "'");
    required[static_cast<std::size_t>(d.index(name))] = true;
  }
  const bool all_required = schema.designated().empty();

  const auto n = static_cast<Eigen::Index>(lines.size() - 1);
  d.values.resize(n, static_cast<Eigen::Index>(d.columns.size()));
  std::vector<std::string> problems;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto cells = split_csv_line(lines[static_cast<std::size_t>(i + 1)]);
    if (cells.size() != d.columns.size()) {
      throw InputError(kModule, source + " row " + std::to_string(i + 1) + " has " +
                                    std::to_string(cells.size()) + " fields, expected " +
                                    std::to_string(d.columns.size()));
    }
    for (std::size_t j = 0; j < cells.size(); ++j) {
      const auto v = parse_number(cells[j]);
      const bool ok = v && std::isfinite(*v);
      d.values(i, static_cast<Eigen::Index>(j)) = v ? *v : std::numeric_limits<double>::quiet_NaN();
      if (!ok && (all_required || required[j])) {
        problems.push_back("row " + std::to_string(i + 1) + ", column '" + d.columns[j] + "': '" +
                           cells[j] + "' is not a finite number");
      }
    }
  }
  if (!problems.empty()) {
    std::string msg = source + ": " + std::to_string(problems.size()) + " invalid cell(s): ";
    for (std::size_t k = 0; k < std::min(problems.size(), kMaxReportedCells); ++k) {
      if (k) msg += "; ";
      msg += problems[k];
    }
    throw InputError(kModule, msg);
  }
  return d;
}

Dataset load_table(const std::filesystem::path& path, const TableSchema& schema) {
  return parse_table(read_file(path), schema, path.string());
}

Eigen::MatrixXd load_matrix_csv(const std::filesystem::path& path) {
  const auto lines = split_lines(read_file(path));
  if (lines.empty()) throw InputError(kModule, path.string() + " is empty");
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::vector<double> row;
    const auto cells = split_csv_line(lines[i]);
    for (std::size_t j = 0; j < cells.size(); ++j) {
      const auto v = parse_number(cells[j]);
      if (!v || !std::isfinite(*v)) {
        throw InputError(kModule, path.string() + " row " + std::to_string(i + 1) + ", column " +
                                      std::to_string(j + 1) + ": '" + cells[j] + "' is not a finite number");
      }
      row.push_back(*v);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw InputError(kModule, path.string() + " row " + std::to_string(i + 1) + " has " +
                                    std::to_string(row.size()) + " fields, expected " +
                                    std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return m;
}

bool Table::operator==(const Table& other) const {
  if (columns != other.columns || rows != other.rows) return false;
  if (values.rows() != other.values.rows() || values.cols() != other.values.cols()) return false;
  for (Eigen::Index i = 0; i < values.size(); ++i)
    if (!same_number(values.data()[i], other.values.data()[i])) return false;
  return true;
}

const Table& Report::table(const std::string& name) const {
  for (const auto& [n, t] : tables)
    if (n == name) return t;
  throw InputError(kModule, "report has no table '" + name + "'");
}

bool Report::operator==(const Report& other) const {
  return kind == other.kind && attributes == other.attributes && tables == other.tables &&
         warnings == other.warnings;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Report to_report(const EigenBasis& basis) {
  Report r;
  r.kind = "meigen";
  r.attributes["mode"] = to_string(basis.mode);
  r.attributes["connectivity"] = to_string(basis.source_kind);
  r.attributes["count"] = std::to_string(basis.count());
  r.attributes["other_eigenvalues_sum"] = format_number(basis.other_eigenvalues_sum);
  std::vector<std::string> names;
  for (Eigen::Index j = 0; j < basis.count(); ++j) names.push_back(eigenvector_name(j));
  r.tables.emplace_back("values", Table{{"lambda"}, names, basis.values});
  r.tables.emplace_back("vectors", matrix_table(basis.vectors, names));
  return r;
}

Report to_report(const LinearFit& fit) {
  Report r;
  r.kind = "esf";
  r.attributes["fn"] = to_string(fit.criterion);
  const auto fixed = fit.coef.size() - fit.selected.size();
  r.tables.emplace_back("b", coef_table(CoefTable(fit.coef.begin(), fit.coef.begin() + static_cast<long>(fixed))));
  r.tables.emplace_back("r", coef_table(CoefTable(fit.coef.begin() + static_cast<long>(fixed), fit.coef.end())));
  r.tables.emplace_back("vif", column_table("VIF", fit.vif));
  r.tables.emplace_back("e", column_table("stat", {{"resid_SE", fit.stats.resid_se},
                                                   {"adjR2", fit.stats.adj_r2},
                                                   {"logLik", fit.stats.log_lik},
                                                   {"AIC", fit.stats.aic},
                                                   {"BIC", fit.stats.bic}}));
  std::vector<NamedValue> path;
  for (std::size_t k = 0; k < fit.criterion_path.size(); ++k)
    path.push_back({"step" + std::to_string(k), fit.criterion_path[k]});
  r.tables.emplace_back("criterion_path", column_table(to_string(fit.criterion), path));
  return r;
}

Report to_report(const ResfFit& fit) {
  Report r;
  r.kind = "resf";
  r.attributes["method"] = to_string(fit.stats.method);
  r.tables.emplace_back("b", coef_table(fit.coef));
  r.tables.emplace_back("s", column_table("par", {{"shrink_sf_SE", fit.shrinkage.sigma_gamma},
                                                  {"shrink_sf_alpha", fit.shrinkage.alpha}}));
  r.tables.emplace_back("e", mixed_stats_table(fit.stats));
  std::vector<NamedValue> gamma;
  for (Eigen::Index j = 0; j < fit.gamma.size(); ++j) gamma.push_back({eigenvector_name(j), fit.gamma(j)});
  r.tables.emplace_back("r", column_table("Estimate", gamma));
  return r;
}

Report to_report(const SvcFit& fit) {
  Report r;
  r.kind = "resf_vc";
  r.attributes["method"] = to_string(fit.stats.method);
  r.attributes["cycles"] = std::to_string(fit.cycles);
  r.warnings = fit.warnings;
  r.tables.emplace_back("b", coef_table(fit.b_const));
  r.tables.emplace_back("b_vc_mean", coef_table(fit.b_vc_mean));
  r.tables.emplace_back("b_vc", matrix_table(fit.b_vc, fit.vc_names));
  r.tables.emplace_back("se_vc", matrix_table(fit.se_vc, fit.vc_names));
  r.tables.emplace_back("p_vc", matrix_table(fit.p_vc, fit.vc_names));
  Table s{fit.vc_names, {"shrink_sf_SE", "shrink_sf_alpha"}, Eigen::MatrixXd(2, static_cast<Eigen::Index>(fit.shrinkage.size()))};
  for (std::size_t k = 0; k < fit.shrinkage.size(); ++k) {
    s.values(0, static_cast<Eigen::Index>(k)) = fit.shrinkage[k].sigma_gamma;
    s.values(1, static_cast<Eigen::Index>(k)) = fit.shrinkage[k].alpha;
  }
  r.tables.emplace_back("s", std::move(s));
  r.tables.emplace_back("e", mixed_stats_table(fit.stats));
  return r;
}

Report to_report(const QrFit& fit) {
  Report r;
  r.kind = "resf_qr";
  r.attributes["boot"] = fit.boot ? "true" : "false";
  r.attributes["n_boot"] = std::to_string(fit.n_boot);
  r.attributes["seed"] = std::to_string(fit.seed);
  const auto m = static_cast<Eigen::Index>(fit.per_tau.size());
  std::vector<std::string> labels;
  for (const auto& f : fit.per_tau) labels.push_back(tau_label(f.tau));

  Table b{labels, {}, Eigen::MatrixXd()};
  Table s{labels, {"shrink_sf_SE", "shrink_sf_alpha"}, Eigen::MatrixXd(2, m)};
  Table e{labels, {"resid_SE", "quasi_adjR2(cond)"}, Eigen::MatrixXd(2, m)};
  if (m > 0) {
    for (const auto& c : fit.per_tau.front().b) b.rows.push_back(c.name);
    b.values.resize(static_cast<Eigen::Index>(b.rows.size()), m);
  }
  for (Eigen::Index k = 0; k < m; ++k) {
    const auto& f = fit.per_tau[static_cast<std::size_t>(k)];
    for (std::size_t j = 0; j < f.b.size(); ++j) b.values(static_cast<Eigen::Index>(j), k) = f.b[j].estimate;
    s.values.col(k) << f.s.sigma_gamma, f.s.alpha;
    e.values.col(k) << f.e.resid_se, f.e.adj_r2_cond;
  }
  r.tables.emplace_back("b", std::move(b));
  r.tables.emplace_back("s", std::move(s));
  r.tables.emplace_back("e", std::move(e));
  if (fit.boot) {
    r.tables.emplace_back("B", boot_table(fit.per_tau, false));
    r.tables.emplace_back("S", boot_table(fit.per_tau, true));
    Table d{{"iterations", "failures", "working_dimension"}, labels, Eigen::MatrixXd(m, 3)};
    for (Eigen::Index k = 0; k < m; ++k) {
      const auto& diag = fit.per_tau[static_cast<std::size_t>(k)].boot->diagnostics;
      d.values.row(k) << diag.iterations, diag.failures, static_cast<double>(diag.working_dimension);
    }
    r.tables.emplace_back("boot_diagnostics", std::move(d));
  }
  return r;
}

std::string to_csv(const Table& table) {
  std::string out;
  for (const auto& c : table.columns) out += "," + csv_field(c);
  out += "\n";
  for (Eigen::Index i = 0; i < table.values.rows(); ++i) {
    out += csv_field(table.rows[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < table.values.cols(); ++j) out += "," + format_number(table.values(i, j));
    out += "\n";
  }
  return out;
}

Table table_from_csv(const std::string& text) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw InputError(kModule, "table text is empty");
  Table t;
  auto header = split_csv_line(lines.front());
  t.columns.assign(header.begin() + 1, header.end());
  t.values.resize(static_cast<Eigen::Index>(lines.size() - 1), static_cast<Eigen::Index>(t.columns.size()));
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split_csv_line(lines[i]);
    if (cells.size() != t.columns.size() + 1) throw InputError(kModule, "table row " + std::to_string(i) + " has the wrong field count");
    t.rows.push_back(cells.front());
    for (std::size_t j = 1; j < cells.size(); ++j)
      t.values(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(j - 1)) = decode_number(cells[j]);
  }
  return t;
}

std::string to_json(const Report& report) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["kind"] = report.kind;
  doc["attributes"] = ordered_json::object();
  for (const auto& [k, v] : report.attributes) doc["attributes"][k] = v;
  doc["warnings"] = report.warnings;
  doc["tables"] = ordered_json::array();
  for (const auto& [name, t] : report.tables) {
    ordered_json values = ordered_json::array();
    for (Eigen::Index i = 0; i < t.values.rows(); ++i) {
      ordered_json row = ordered_json::array();
      for (Eigen::Index j = 0; j < t.values.cols(); ++j) {
        const double v = t.values(i, j);
        if (std::isfinite(v)) row.push_back(v);
        else row.push_back(format_number(v));
      }
      values.push_back(std::move(row));
    }
    doc["tables"].push_back({{"name", name}, {"columns", t.columns}, {"rows", t.rows}, {"values", std::move(values)}});
  }
  return doc.dump(2) + "\n";
}

Report report_from_json(const std::string& text) {
  using nlohmann::ordered_json;
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const ordered_json::exception& e) {
    throw InputError(kModule, std::string("invalid JSON: ") + e.what());
  }
  Report r;
  try {
    r.kind = doc.at("kind").get<std::string>();
    for (const auto& [k, v] : doc.at("attributes").items()) r.attributes[k] = v.get<std::string>();
    r.warnings = doc.at("warnings").get<std::vector<std::string>>();
    for (const auto& jt : doc.at("tables")) {
      Table t;
      t.columns = jt.at("columns").get<std::vector<std::string>>();
      t.rows = jt.at("rows").get<std::vector<std::string>>();
      const auto& values = jt.at("values");
      t.values.resize(static_cast<Eigen::Index>(values.size()), static_cast<Eigen::Index>(t.columns.size()));
      for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i].size() != t.columns.size()) throw InputError(kModule, "JSON table row has the wrong length");
        for (std::size_t j = 0; j < values[i].size(); ++j) {
          const auto& cell = values[i][j];
          t.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
              cell.is_string() ? decode_number(cell.get<std::string>()) : cell.get<double>();
        }
      }
      r.tables.emplace_back(jt.at("name").get<std::string>(), std::move(t));
    }
  } catch (const ordered_json::exception& e) {
    throw InputError(kModule, std::string("malformed report: ") + e.what());
  }
  return r;
}

void write_fit(const Report& report, OutputFormat format, const std::filesystem::path& path) {
  if (format == OutputFormat::json) {
    write_file(path, to_json(report));
    return;
  }
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) throw InputError(kModule, "cannot create directory '" + path.string() + "': " + ec.message());
  for (const auto& [name, t] : report.tables) write_file(path / (name + ".csv"), to_csv(t));
}

}  // namespace moran

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "moran/eigen.hpp"
#include "moran/esf.hpp"
#include "moran/mixed.hpp"
#include "moran/quantile.hpp"

namespace moran {

/// Column roles for load_table. Unnamed roles are simply not checked.
struct TableSchema {
  std::string px, py, y;
  std::vector<std::string> x, xconst;

  std::vector<std::string> designated() const;
};

/// Numeric view of a CSV file. Cells of columns outside the schema are kept
/// when they parse and set to NaN otherwise.
struct Dataset {
  std::vector<std::string> columns;
  Eigen::MatrixXd values;
  TableSchema schema;

  Eigen::Index rows() const noexcept { return values.rows(); }
  Eigen::Index index(const std::string& name) const;
  Eigen::VectorXd column(const std::string& name) const;
  Eigen::MatrixXd columns_of(const std::vector<std::string>& names) const;
  Eigen::MatrixX2d coordinates() const;
};

/// Reads a comma-separated file with a header row. Every designated cell
/// must be a finite number; failures name the 1-based data row and column.
Dataset load_table(const std::filesystem::path& path, const TableSchema& schema = {});
Dataset parse_table(const std::string& text, const TableSchema& schema = {},
                    const std::string& source = "<memory>");

/// Headerless numeric matrix (e.g. a user connectivity matrix).
Eigen::MatrixXd load_matrix_csv(const std::filesystem::path& path);

/// A named grid of numbers with row and column labels.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::string> rows;
  Eigen::MatrixXd values;

  bool operator==(const Table& other) const;
};

/// Serializable form of any fit: ordered tables plus string attributes.
struct Report {
  std::string kind;
  std::map<std::string, std::string> attributes;
  std::vector<std::pair<std::string, Table>> tables;
  std::vector<std::string> warnings;

  const Table& table(const std::string& name) const;
  bool operator==(const Report& other) const;
};

Report to_report(const EigenBasis& basis);
Report to_report(const LinearFit& fit);
Report to_report(const ResfFit& fit);
Report to_report(const SvcFit& fit);
Report to_report(const QrFit& fit);

enum class OutputFormat { csv, json };

/// JSON: one document at `path`. CSV: one file per table inside the
/// directory `path`, named <table>.csv. Numbers carry 17 significant digits;
/// non-finite values are written as the strings "inf", "-inf" and "nan".
void write_fit(const Report& report, OutputFormat format, const std::filesystem::path& path);

std::string to_json(const Report& report);
Report report_from_json(const std::string& text);
std::string to_csv(const Table& table);
Table table_from_csv(const std::string& text);

/// Formats with 17 significant digits ("%.17g"), or inf/-inf/nan.
std::string format_number(double v);

/// One plotted parameter of a quantile fit across tau.
struct PlotSpec {
  struct Point {
    double tau = 0.0;
    double estimate = 0.0;
    std::optional<double> lo95, hi95;
  };
  int pnum = 1;
  char par = 'b';
  std::string label;
  std::vector<Point> series;

  bool has_band() const noexcept;
};

/// par 'b': pnum-th coefficient (1 = intercept). par 's': 1 = shrink_sf_SE,
/// 2 = shrink_sf_alpha.
PlotSpec plot_qr(const QrFit& fit, int pnum, char par = 'b');

/// 640x480 SVG 1.1 line plot with a grey 95% band when bounds exist.
std::string render_svg(const PlotSpec& spec);
std::string plot_csv(const PlotSpec& spec);

}  // namespace moran

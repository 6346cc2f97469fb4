#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace moran::cli {

struct RunConfig {
  std::string subcommand;  // meigen, esf, resf, resf-vc, resf-qr
  std::filesystem::path input;
  std::string px = "px", py = "py", y;
  std::vector<std::string> x, xconst;

  // Exactly one connectivity source.
  bool kernel = false;
  std::optional<int> knn;
  std::optional<std::filesystem::path> cmat;

  double threshold = 0.0;
  std::optional<long> enum_count;
  bool fast = false;
  std::string fn = "r2";
  std::optional<double> vif;
  std::string method = "reml";
  std::vector<double> taus;
  bool boot = false;
  int n_boot = 200;
  std::uint64_t seed = 20170913;
  std::filesystem::path out = "out";
  unsigned threads = 0;
};

/// Validates the configuration, runs the pipeline and writes artifacts under
/// config.out. Returns the process exit status; library errors are reported
/// on `err` with their module prefix.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv and calls run.
int main_entry(int argc, char** argv);

}  // namespace moran::cli

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace moran {

/// Failure categories; each maps to a distinct process exit code in the CLI.
enum class ErrorKind {
  input,
  singular_design,
  convergence,
  bootstrap_unstable,
};

int exit_code(ErrorKind kind) noexcept;

/// Base of every library error. The message is prefixed with the module name.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& module, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& module() const noexcept { return module_; }

 private:
  ErrorKind kind_;
  std::string module_;
};

class InputError : public Error {
 public:
  InputError(const std::string& module, const std::string& what)
      : Error(ErrorKind::input, module, what) {}
};

/// Design matrix without full column rank. `column` is the first dependent column.
class SingularDesignError : public Error {
 public:
  SingularDesignError(const std::string& module, const std::string& what,
                      long column = -1)
      : Error(ErrorKind::singular_design, module, what), column_(column) {}

  long column() const noexcept { return column_; }

 private:
  long column_;
};

/// Optimizer gave up. Carries the best point and objective seen so far.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& module, const std::string& what,
                   std::vector<double> best_params, double best_objective)
      : Error(ErrorKind::convergence, module, what),
        best_params_(std::move(best_params)),
        best_objective_(best_objective) {}

  const std::vector<double>& best_params() const noexcept { return best_params_; }
  double best_objective() const noexcept { return best_objective_; }

 private:
  std::vector<double> best_params_;
  double best_objective_;
};

class BootstrapUnstableError : public Error {
 public:
  BootstrapUnstableError(const std::string& module, const std::string& what)
      : Error(ErrorKind::bootstrap_unstable, module, what) {}
};

}  // namespace moran

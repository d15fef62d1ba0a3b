#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "selection/model.hpp"
#include "selection/state.hpp"

namespace selection::cli {

enum ExitCode : int {
  kSuccess = 0,
  kInvariantFailure = 1,
  kInputError = 2,
  kRuntimeError = 3,
};

/// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "SELECTION_OUT_DIR";

struct Options {
  std::optional<std::string> scheme;
  std::optional<double> dt;
  std::optional<double> t_end;
  std::optional<int> sample_every;
  std::optional<std::string> out;
  bool quiet = false;
};

/// --out, else $SELECTION_OUT_DIR, else "out".
std::string output_directory(const Options& options);

/// Loads a scenario file and applies --scheme/--dt/--t-end.
Scenario load_with_overrides(const std::string& path, const Options& options);

struct InvariantResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Checks a finished run against the long-time theory: corridor, Lyapunov
/// monotonicity, D >= 0, residual decay, rho limit, support conservation,
/// concentration and (boundary maximum only) monotone blow-up.
std::vector<InvariantResult> verify_trajectory(const Scenario& scenario,
                                               const Trajectory& trajectory);

int cmd_predict(const std::string& path, const Options& options, std::ostream& out,
                std::ostream& err);
int cmd_run(const std::string& path, const Options& options, std::ostream& out, std::ostream& err);
int cmd_verify(const std::string& path, const Options& options, std::ostream& out,
               std::ostream& err);
int cmd_sweep(const std::string& path, const std::string& parameter,
              const std::vector<double>& values, const Options& options, std::ostream& out,
              std::ostream& err);

struct SweepPoint {
  double value = 0.0;
  double rho_final = 0.0;
  double abs_error = 0.0;  // |rho(T) - rho_bar|
  std::string status;      // "ok" or the error message
};

/// Observed order from successive differences of rho(T) (three or more points)
/// or from |rho(T) - rho_bar| (two points). NaN when undetermined.
double fitted_order(const std::vector<SweepPoint>& points, const std::vector<double>& step_sizes);

}  // namespace selection::cli

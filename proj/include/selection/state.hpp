#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "selection/model.hpp"

namespace selection {

/// Population at one instant.
///
/// The exponential scheme stores the cumulative exponents
///   A(t) = int_0^t 1/(1 + c0 rho(s)) ds,   B(t) = int_0^t rho(s) ds,
/// from which u(x_i, t) = u0(x_i) exp(b(x_i) A - d(x_i) B) exactly.
struct PopulationState {
  double t = 0.0;
  double A = 0.0;
  double B = 0.0;
  std::vector<double> log_u;  // -inf outside the support
  std::vector<double> u;      // linear density; may overflow to inf in blow-up runs
  double rho = 0.0;
  long undershoot_clamps = 0;  // direct scheme only, cumulative
};

/// One sampled row of run diagnostics.
struct DiagnosticsRecord {
  double t = 0.0;
  double rho = 0.0;
  double V = 0.0;
  double D = 0.0;
  double W = 0.0;
  double max_log_u = 0.0;
  double x_mode = 0.0;
  double mass_near_xbar = 0.0;
  double tail_mass = 0.0;
  long undershoot_clamps = 0;
  // V, D, W and tail_mass are multiplied by exp(-log_scale) when the raw
  // density overflows double precision.
  bool rescaled = false;
  double log_scale = 0.0;
};

struct Snapshot {
  double t = 0.0;
  std::vector<double> u;
  std::vector<double> log_u;
};

struct InvariantBreach {
  double t = 0.0;
  double rho = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

struct Trajectory {
  std::string fingerprint;
  Scheme scheme = Scheme::exponential;
  double dt = 0.0;
  double dx = 0.0;
  EquilibriumPrediction prediction;
  std::vector<DiagnosticsRecord> records;
  std::vector<Snapshot> snapshots;
  std::vector<InvariantBreach> breaches;  // first kMaxStoredBreaches only
  std::size_t breach_count = 0;
  PopulationState final_state;
  std::size_t steps = 0;
  bool stopped_early = false;
  bool support_preserved = true;
};

}  // namespace selection

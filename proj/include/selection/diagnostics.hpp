#pragma once

// Functionals used in the long-time analysis, evaluated with the same trapezoid
// rule as rho so that the discrete identity dV/dt = D holds exactly in the
// semi-discrete system:
//
//   P(rho) = c0 rho^2/3 + rho/2,     Q(rho) = c0 rho^2 + rho  (rho P' + P = Q)
//   V = int (b/d - P(rho)) u dx
//   D = int (1 + c0 rho)/d  G(x, rho)^2 u dx
//   W = int (b/d - Q(rho))^2 u dx
//
// With c0 = 1 these are the textbook P, Q.

#include <cstddef>

#include "selection/model.hpp"
#include "selection/state.hpp"

namespace selection {

double lyapunov_P(double rho, double c0 = 1.0);
double lyapunov_Q(double rho, double c0 = 1.0);

double compute_V(const PopulationState& state, const Scenario& scenario);
double compute_D(const PopulationState& state, const Scenario& scenario);
double compute_W(const PopulationState& state, const Scenario& scenario);

struct ConcentrationReport {
  double mass_near_xbar = 0.0;  // fraction of total mass with |x - x_bar| <= epsilon
  double x_mode = 0.0;
  std::size_t mode_index = 0;
  double max_log_u = 0.0;
};

ConcentrationReport concentration_report(const PopulationState& state, const Scenario& scenario,
                                         const EquilibriumPrediction& pred, double epsilon);

/// Every field of a DiagnosticsRecord for one state.
DiagnosticsRecord make_record(const PopulationState& state, const Scenario& scenario,
                              const EquilibriumPrediction& pred);

struct BlowUpReport {
  bool monotone_growth = false;
  double growth_rate_estimate = 0.0;  // least-squares slope of max_log_u against t
  double boundary_cell_mass = 0.0;    // mass of the cells adjacent to x_bar at final time
  std::size_t samples = 0;
};

/// Uses records with t >= t_final/2. Throws InputError with fewer than 10 such records.
BlowUpReport blow_up_report(const Trajectory& trajectory);

}  // namespace selection

#pragma once

#include "selection/model.hpp"
#include "selection/state.hpp"

namespace selection {

inline constexpr double kCorridorTolerance = 1e-6;
inline constexpr std::size_t kMaxStoredBreaches = 1000;
/// Consecutive samples that must satisfy stop_tol before a run ends early.
inline constexpr std::size_t kStopWindow = 100;

/// t = 0, A = B = 0, density from u0. Throws InputError on empty support.
PopulationState init_state(const Scenario& scenario);

/// rho(A, B) = int u0 exp(b A - d B) dx, evaluated with a max shift.
/// Throws NumericalError if the result overflows.
double rho_from_exponents(double A, double B, const Scenario& scenario);

/// One RK4 step of A' = 1/(1 + c0 rho(A,B)), B' = rho(A,B); the density is then
/// rebuilt in closed form, so positivity and support are exact.
PopulationState step_exponential(const PopulationState& state, double dt, const Scenario& scenario);

/// One RK4 step of the method-of-lines system u_i' = G(x_i, rho) u_i. Negative
/// undershoot is clamped to zero and counted. Throws NumericalError on NaN.
PopulationState step_direct(const PopulationState& state, double dt, const Scenario& scenario);

/// Integrates to t_end with the scenario's scheme and fixed dt.
Trajectory run(const Scenario& scenario);

/// Same as run() but fills `out` progressively, so a NumericalError leaves
/// the records gathered so far in place.
void run_into(const Scenario& scenario, Trajectory& out);

}  // namespace selection

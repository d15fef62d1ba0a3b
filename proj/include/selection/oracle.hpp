#pragma once

// Independent references: point-mass dynamics and fine-step direct reruns.

#include <vector>

#include "selection/model.hpp"
#include "selection/state.hpp"

namespace selection::oracle {

struct Atom {
  double b = 0.0;
  double d = 0.0;
  double m = 0.0;
};

/// Point masses at abstract traits: m_i' = G_i(rho) m_i, rho = sum of m_i.
struct AtomSystem {
  std::vector<Atom> atoms;
  double c0 = 1.0;

  double total_mass() const;
};

inline constexpr double kMaxAtomStep = 1e-4;

/// Classical RK4 with fixed dt <= kMaxAtomStep. Throws InputError on an invalid system.
AtomSystem integrate_atoms(const AtomSystem& sys, double t_end, double dt);

/// Direct-scheme rerun of `scenario` at dt_fine (<= scenario dt / 10), sampled
/// at the same times as the scenario's own run.
Trajectory reference_grid_run(const Scenario& scenario, double dt_fine);

}  // namespace selection::oracle

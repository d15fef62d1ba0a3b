#include "selection/oracle.hpp"

#include <cmath>
#include <string>

#include "selection/errors.hpp"
#include "selection/integrator.hpp"

namespace selection::oracle {

double AtomSystem::total_mass() const {
  double rho = 0.0;
  for (const auto& a : atoms) rho += a.m;
  return rho;
}

namespace {

void rates(const AtomSystem& sys, const std::vector<double>& m, std::vector<double>& dm) {
  double rho = 0.0;
  for (double v : m) rho += v;
  dm.resize(m.size());
  for (std::size_t i = 0; i < m.size(); ++i)
    dm[i] = fitness(sys.atoms[i].b, sys.atoms[i].d, rho, sys.c0) * m[i];
}

}  // namespace

AtomSystem integrate_atoms(const AtomSystem& sys, double t_end, double dt) {
  if (!(dt > 0.0) || dt > kMaxAtomStep)
    throw InputError("atom oracle: dt must be in (0, 1e-4], got " + std::to_string(dt));
  if (!(t_end >= 0.0)) throw InputError("atom oracle: t_end must be nonnegative");
  if (sys.atoms.empty()) throw InputError("atom oracle: no atoms");
  for (const auto& a : sys.atoms) {
    if (!(a.b > 0.0) || !(a.d > 0.0) || !(a.m >= 0.0))
      throw InputError("atom oracle: atoms need b > 0, d > 0, m >= 0");
  }
  if (!(sys.total_mass() > 0.0)) throw InputError("atom oracle: total mass must be positive");

  const std::size_t n = sys.atoms.size();
  std::vector<double> m(n), k1, k2, k3, k4, stage(n);
  for (std::size_t i = 0; i < n; ++i) m[i] = sys.atoms[i].m;

  const auto steps = static_cast<long long>(std::llround(t_end / dt));
  for (long long k = 0; k < steps; ++k) {
    rates(sys, m, k1);
    for (std::size_t i = 0; i < n; ++i) stage[i] = m[i] + 0.5 * dt * k1[i];
    rates(sys, stage, k2);
    for (std::size_t i = 0; i < n; ++i) stage[i] = m[i] + 0.5 * dt * k2[i];
    rates(sys, stage, k3);
    for (std::size_t i = 0; i < n; ++i) stage[i] = m[i] + dt * k3[i];
    rates(sys, stage, k4);
    for (std::size_t i = 0; i < n; ++i)
      m[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }

  AtomSystem out = sys;
  for (std::size_t i = 0; i < n; ++i) out.atoms[i].m = m[i];
  return out;
}

Trajectory reference_grid_run(const Scenario& scenario, double dt_fine) {
  const ScenarioSettings& cfg = scenario.settings();
  if (!(dt_fine > 0.0) || dt_fine > cfg.dt / 10.0 * (1.0 + 1e-12))
    throw InputError("reference run: dt_fine must be at most dt/10 = " +
                     std::to_string(cfg.dt / 10.0));
  ScenarioSettings fine = cfg;
  fine.scheme = Scheme::direct;
  fine.dt = dt_fine;
  fine.stop_tol.reset();
  const double ratio = cfg.dt / dt_fine;
  fine.sample_every = static_cast<int>(std::llround(cfg.sample_every * ratio));
  if (fine.sample_every < 1) fine.sample_every = 1;
  return run(scenario.with_settings(fine));
}

}  // namespace selection::oracle

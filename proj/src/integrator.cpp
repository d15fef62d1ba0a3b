#include "selection/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "selection/diagnostics.hpp"
#include "selection/errors.hpp"

namespace selection {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Exponential scheme: the state is (A, B); the density is a closed form.

struct Exponents {
  double A;
  double B;
};

Exponents exponent_rate(double rho, double c0) { return {1.0 / (1.0 + c0 * rho), rho}; }

void advance_exponential(PopulationState& s, double dt, const Scenario& scenario) {
  const double c0 = scenario.c0();
  const Exponents k1 = exponent_rate(s.rho, c0);
  const Exponents k2 =
      exponent_rate(rho_from_exponents(s.A + 0.5 * dt * k1.A, s.B + 0.5 * dt * k1.B, scenario), c0);
  const Exponents k3 =
      exponent_rate(rho_from_exponents(s.A + 0.5 * dt * k2.A, s.B + 0.5 * dt * k2.B, scenario), c0);
  const Exponents k4 =
      exponent_rate(rho_from_exponents(s.A + dt * k3.A, s.B + dt * k3.B, scenario), c0);
  s.A += dt / 6.0 * (k1.A + 2.0 * k2.A + 2.0 * k3.A + k4.A);
  s.B += dt / 6.0 * (k1.B + 2.0 * k2.B + 2.0 * k3.B + k4.B);
  s.t += dt;
  s.rho = rho_from_exponents(s.A, s.B, scenario);
}

void refresh_exponential(PopulationState& s, const Scenario& scenario) {
  const auto& b = scenario.b().samples;
  const auto& d = scenario.d().samples;
  const auto& u0 = scenario.u0().samples;
  const auto& log_u0 = scenario.log_u0();
  const std::size_t n = scenario.grid().size();
  s.log_u.assign(n, kNegInf);
  s.u.assign(n, 0.0);
  for (std::size_t i : scenario.support()) {
    const double exponent = b[i] * s.A - d[i] * s.B;
    s.log_u[i] = log_u0[i] + exponent;
    s.u[i] = u0[i] * std::exp(exponent);
  }
}

// ---------------------------------------------------------------------------
// Direct scheme: method of lines on the linear density.

struct DirectWorkspace {
  std::vector<double> k1, k2, k3, k4, stage;
};

double weighted_sum(const std::vector<double>& u, const std::vector<double>& w) {
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) sum += w[i] * u[i];
  return sum;
}

// du = G(x, rho) u with rho from the trapezoid rule; returns rho.
double direct_rhs(const std::vector<double>& u, std::vector<double>& du, const Scenario& scenario) {
  const auto& b = scenario.b().samples;
  const auto& d = scenario.d().samples;
  const double rho = weighted_sum(u, scenario.grid().weights());
  const double birth = 1.0 / (1.0 + scenario.c0() * rho);
  du.resize(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) du[i] = (b[i] * birth - d[i] * rho) * u[i];
  return rho;
}

void check_finite(double v, const PopulationState& s, double dt, const char* what) {
  if (!std::isfinite(v))
    throw NumericalError(std::string("direct scheme: non-finite ") + what + " in step from t = " +
                         num(s.t) + " with dt = " + num(dt));
}

void advance_direct(PopulationState& s, double dt, const Scenario& scenario, DirectWorkspace& ws) {
  const double c0 = scenario.c0();
  const std::size_t n = s.u.size();
  ws.stage.resize(n);

  const double r1 = direct_rhs(s.u, ws.k1, scenario);
  for (std::size_t i = 0; i < n; ++i) ws.stage[i] = s.u[i] + 0.5 * dt * ws.k1[i];
  const double r2 = direct_rhs(ws.stage, ws.k2, scenario);
  for (std::size_t i = 0; i < n; ++i) ws.stage[i] = s.u[i] + 0.5 * dt * ws.k2[i];
  const double r3 = direct_rhs(ws.stage, ws.k3, scenario);
  for (std::size_t i = 0; i < n; ++i) ws.stage[i] = s.u[i] + dt * ws.k3[i];
  const double r4 = direct_rhs(ws.stage, ws.k4, scenario);
  check_finite(r1 + r2 + r3 + r4, s, dt, "mass");

  long clamps = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double v = s.u[i] + dt / 6.0 * (ws.k1[i] + 2.0 * ws.k2[i] + 2.0 * ws.k3[i] + ws.k4[i]);
    check_finite(v, s, dt, "density");
    if (v < 0.0) {
      v = 0.0;
      ++clamps;
    }
    s.u[i] = v;
  }
  s.undershoot_clamps += clamps;

  s.A += dt / 6.0 *
         (1.0 / (1.0 + c0 * r1) + 2.0 / (1.0 + c0 * r2) + 2.0 / (1.0 + c0 * r3) +
          1.0 / (1.0 + c0 * r4));
  s.B += dt / 6.0 * (r1 + 2.0 * r2 + 2.0 * r3 + r4);
  s.t += dt;
  s.rho = weighted_sum(s.u, scenario.grid().weights());
  check_finite(s.rho, s, dt, "mass");
}

void refresh_direct(PopulationState& s) {
  s.log_u.resize(s.u.size());
  for (std::size_t i = 0; i < s.u.size(); ++i) s.log_u[i] = s.u[i] > 0.0 ? std::log(s.u[i]) : kNegInf;
}

void require_positive_dt(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InputError("time step must be positive, got " + num(dt));
}

}  // namespace

PopulationState init_state(const Scenario& scenario) {
  if (scenario.support().empty()) throw InputError("empty support: u0 is zero on every node");
  PopulationState s;
  s.u = scenario.u0().samples;
  for (double v : s.u) {
    if (v < 0.0) throw InputError("u0 has negative values");
  }
  s.log_u = scenario.log_u0();
  s.rho = quadrature(s.u, scenario.grid());
  if (!(s.rho > 0.0)) throw InputError("initial mass must be positive");
  return s;
}

double rho_from_exponents(double A, double B, const Scenario& scenario) {
  const auto& b = scenario.b().samples;
  const auto& d = scenario.d().samples;
  const auto& log_u0 = scenario.log_u0();
  const auto& w = scenario.grid().weights();
  const auto& support = scenario.support();

  double shift = kNegInf;
  for (std::size_t i : support) shift = std::max(shift, log_u0[i] + b[i] * A - d[i] * B);
  if (!std::isfinite(shift))
    throw NumericalError("rho_from_exponents: non-finite exponent " + num(shift) + " at A = " +
                         num(A) + ", B = " + num(B));
  double sum = 0.0;
  for (std::size_t i : support) sum += w[i] * std::exp(log_u0[i] + b[i] * A - d[i] * B - shift);
  const double rho = std::exp(shift) * sum;
  if (!std::isfinite(rho))
    throw NumericalError("rho_from_exponents: overflow, max exponent " + num(shift) + " at A = " +
                         num(A) + ", B = " + num(B));
  return rho;
}

PopulationState step_exponential(const PopulationState& state, double dt, const Scenario& scenario) {
  require_positive_dt(dt);
  PopulationState next = state;
  advance_exponential(next, dt, scenario);
  refresh_exponential(next, scenario);
  return next;
}

PopulationState step_direct(const PopulationState& state, double dt, const Scenario& scenario) {
  require_positive_dt(dt);
  PopulationState next = state;
  if (next.u.size() != scenario.grid().size()) {
    next.u.assign(next.log_u.size(), 0.0);
    for (std::size_t i = 0; i < next.u.size(); ++i) next.u[i] = std::exp(next.log_u[i]);
  }
  DirectWorkspace ws;
  advance_direct(next, dt, scenario, ws);
  refresh_direct(next);
  return next;
}

Trajectory run(const Scenario& scenario) {
  Trajectory out;
  run_into(scenario, out);
  return out;
}

void run_into(const Scenario& scenario, Trajectory& out) {
  const ScenarioSettings& cfg = scenario.settings();
  const double dt = cfg.dt;
  require_positive_dt(dt);

  out = Trajectory{};
  out.fingerprint = scenario.fingerprint();
  out.scheme = cfg.scheme;
  out.dt = dt;
  out.dx = scenario.grid().dx();
  out.prediction = predict_equilibrium(scenario);
  const EquilibriumPrediction& pred = out.prediction;

  const auto n_steps = static_cast<std::size_t>(std::llround(cfg.t_end / dt));
  const double lower = pred.rho_m - kCorridorTolerance;
  const double upper = pred.rho_M + kCorridorTolerance;

  std::vector<double> pending_snapshots = cfg.snapshot_times;
  std::sort(pending_snapshots.begin(), pending_snapshots.end());
  std::size_t next_snapshot = 0;

  PopulationState s = init_state(scenario);
  DirectWorkspace ws;
  std::size_t stop_streak = 0;

  auto refresh = [&] {
    if (cfg.scheme == Scheme::exponential) {
      refresh_exponential(s, scenario);
    } else {
      refresh_direct(s);
    }
  };

  auto check_corridor = [&] {
    if (s.rho >= lower && s.rho <= upper) return;
    ++out.breach_count;
    if (out.breaches.size() < kMaxStoredBreaches) out.breaches.push_back({s.t, s.rho, lower, upper});
  };

  // Snapshots land on the first step whose time is within dt/2 of the request.
  auto take_snapshots = [&](bool last) {
    while (next_snapshot < pending_snapshots.size() &&
           (s.t >= pending_snapshots[next_snapshot] - 0.5 * dt || last)) {
      out.snapshots.push_back({s.t, s.u, s.log_u});
      ++next_snapshot;
    }
  };

  auto record = [&] {
    out.records.push_back(make_record(s, scenario, pred));
    if (cfg.stop_tol) {
      const auto& r = out.records.back();
      if (std::abs(r.rho - pred.rho_bar) < *cfg.stop_tol && r.W < *cfg.stop_tol) {
        ++stop_streak;
      } else {
        stop_streak = 0;
      }
    }
  };

  auto finish = [&] {
    out.final_state = s;
    for (std::size_t i = 0; i < s.log_u.size(); ++i) {
      if ((s.log_u[i] > kNegInf) != scenario.in_support(i)) {
        out.support_preserved = false;
        break;
      }
    }
  };

  check_corridor();
  take_snapshots(false);
  record();

  try {
    for (std::size_t k = 1; k <= n_steps; ++k) {
      if (cfg.scheme == Scheme::exponential) {
        advance_exponential(s, dt, scenario);
      } else {
        advance_direct(s, dt, scenario, ws);
      }
      s.t = static_cast<double>(k) * dt;
      out.steps = k;
      check_corridor();

      const bool last = k == n_steps;
      const bool sample = k % static_cast<std::size_t>(cfg.sample_every) == 0 || last;
      const bool snapshot_due = next_snapshot < pending_snapshots.size() &&
                                (s.t >= pending_snapshots[next_snapshot] - 0.5 * dt || last);
      if (sample || snapshot_due) refresh();
      if (snapshot_due) take_snapshots(last);
      if (sample) {
        record();
        if (cfg.stop_tol && stop_streak >= kStopWindow) {
          out.stopped_early = !last;
          break;
        }
      }
    }
  } catch (...) {
    refresh();
    finish();
    throw;
  }
  refresh();
  finish();
}

}  // namespace selection

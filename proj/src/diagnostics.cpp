#include "selection/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "selection/errors.hpp"

namespace selection {

namespace {

constexpr double kMaxLog = 709.0;  // exp() overflows just above this

double max_log(const PopulationState& state) {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : state.log_u) m = std::max(m, v);
  return m;
}

// Trapezoid masses w_i exp(log_u_i - shift), shift = max log_u, so that the
// density can be integrated past the overflow point of u itself.
struct ScaledDensity {
  std::vector<double> mass;
  double shift = 0.0;
};

ScaledDensity scale(const PopulationState& state, const Scenario& scenario) {
  const auto& w = scenario.grid().weights();
  ScaledDensity sd;
  sd.shift = max_log(state);
  sd.mass.assign(state.log_u.size(), 0.0);
  if (!std::isfinite(sd.shift)) return sd;
  for (std::size_t i = 0; i < state.log_u.size(); ++i) {
    if (state.log_u[i] == -std::numeric_limits<double>::infinity()) continue;
    sd.mass[i] = w[i] * std::exp(state.log_u[i] - sd.shift);
  }
  return sd;
}

struct ScaledSum {
  double value = 0.0;
  double log_scale = 0.0;
  bool rescaled = false;
};

// int f_i u_i dx, multiplied back by exp(shift) unless that would overflow.
template <typename Integrand>
ScaledSum integrate(const ScaledDensity& sd, Integrand&& f) {
  ScaledSum out;
  if (!std::isfinite(sd.shift)) return out;
  double sum = 0.0;
  for (std::size_t i = 0; i < sd.mass.size(); ++i) {
    if (sd.mass[i] != 0.0) sum += f(i) * sd.mass[i];
  }
  if (sd.shift > kMaxLog) {
    out.value = sum;
    out.log_scale = sd.shift;
    out.rescaled = true;
  } else {
    out.value = sum * std::exp(sd.shift);
  }
  return out;
}

template <typename Integrand>
ScaledSum integrate(const PopulationState& state, const Scenario& scenario, Integrand&& f) {
  return integrate(scale(state, scenario), std::forward<Integrand>(f));
}

}  // namespace

double lyapunov_P(double rho, double c0) { return c0 * rho * rho / 3.0 + rho / 2.0; }

double lyapunov_Q(double rho, double c0) { return c0 * rho * rho + rho; }

double compute_V(const PopulationState& state, const Scenario& scenario) {
  const auto& b = scenario.b().samples;
  const auto& d = scenario.d().samples;
  const double p = lyapunov_P(state.rho, scenario.c0());
  return integrate(state, scenario, [&](std::size_t i) { return b[i] / d[i] - p; }).value;
}

double compute_D(const PopulationState& state, const Scenario& scenario) {
  const auto& b = scenario.b().samples;
  const auto& d = scenario.d().samples;
  const double c0 = scenario.c0();
  const double rho = state.rho;
  return integrate(state, scenario, [&](std::size_t i) {
           const double g = fitness(b[i], d[i], rho, c0);
           return (1.0 + c0 * rho) / d[i] * g * g;
         }).value;
}

double compute_W(const PopulationState& state, const Scenario& scenario) {
  const auto& b = scenario.b().samples;
  const auto& d = scenario.d().samples;
  const double q = lyapunov_Q(state.rho, scenario.c0());
  return integrate(state, scenario, [&](std::size_t i) {
           const double r = b[i] / d[i] - q;
           return r * r;
         }).value;
}

ConcentrationReport concentration_report(const PopulationState& state, const Scenario& scenario,
                                         const EquilibriumPrediction& pred, double epsilon) {
  if (!(epsilon > 0.0)) throw InputError("concentration radius must be positive");
  const Grid& grid = scenario.grid();
  ConcentrationReport rep;
  rep.max_log_u = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < state.log_u.size(); ++i) {
    if (state.log_u[i] > rep.max_log_u) {
      rep.max_log_u = state.log_u[i];
      rep.mode_index = i;
    }
  }
  rep.x_mode = grid.node(rep.mode_index);

  // Relative slack keeps nodes at exactly k*dx from x_bar inside the window.
  const double radius = epsilon * (1.0 + 1e-9);
  const auto near = integrate(state, scenario, [&](std::size_t i) {
    return std::abs(grid.node(i) - pred.x_bar) <= radius ? 1.0 : 0.0;
  });
  const auto total = integrate(state, scenario, [](std::size_t) { return 1.0; });
  rep.mass_near_xbar = total.value > 0.0 ? std::min(1.0, near.value / total.value) : 0.0;
  return rep;
}

DiagnosticsRecord make_record(const PopulationState& state, const Scenario& scenario,
                              const EquilibriumPrediction& pred) {
  DiagnosticsRecord r;
  r.t = state.t;
  r.rho = state.rho;
  r.undershoot_clamps = state.undershoot_clamps;

  const auto& b = scenario.b().samples;
  const auto& d = scenario.d().samples;
  const double c0 = scenario.c0();
  const double rho = state.rho;
  const double p = lyapunov_P(rho, c0);
  const double q = lyapunov_Q(rho, c0);

  const ScaledDensity sd = scale(state, scenario);
  const auto V = integrate(sd, [&](std::size_t i) { return b[i] / d[i] - p; });
  const auto D = integrate(sd, [&](std::size_t i) {
    const double g = fitness(b[i], d[i], rho, c0);
    return (1.0 + c0 * rho) / d[i] * g * g;
  });
  const auto W = integrate(sd, [&](std::size_t i) {
    const double res = b[i] / d[i] - q;
    return res * res;
  });
  r.V = V.value;
  r.D = D.value;
  r.W = W.value;
  r.rescaled = V.rescaled;
  r.log_scale = V.log_scale;

  const auto conc = concentration_report(state, scenario, pred, scenario.epsilon());
  r.max_log_u = conc.max_log_u;
  r.x_mode = conc.x_mode;
  r.mass_near_xbar = conc.mass_near_xbar;

  if (const auto& R = scenario.settings().tail_R) {
    const Grid& grid = scenario.grid();
    r.tail_mass = integrate(sd, [&](std::size_t i) {
                    return std::abs(grid.node(i)) >= *R ? 1.0 : 0.0;
                  }).value;
  }
  return r;
}

BlowUpReport blow_up_report(const Trajectory& trajectory) {
  if (trajectory.records.empty()) throw InputError("blow-up report: empty trajectory");
  const double cutoff = 0.5 * trajectory.records.back().t;
  std::vector<const DiagnosticsRecord*> window;
  for (const auto& r : trajectory.records) {
    if (r.t >= cutoff) window.push_back(&r);
  }
  if (window.size() < 10)
    throw InputError("blow-up report: need at least 10 samples after t = " +
                     std::to_string(cutoff) + ", have " + std::to_string(window.size()));

  BlowUpReport rep;
  rep.samples = window.size();
  // Roundoff in b A - d B is allowed; anything larger is a real decrease.
  rep.monotone_growth = true;
  for (std::size_t k = 1; k < window.size(); ++k) {
    const double prev = window[k - 1]->max_log_u;
    if (window[k]->max_log_u < prev - 1e-12 * (1.0 + std::abs(prev))) {
      rep.monotone_growth = false;
      break;
    }
  }

  double mean_t = 0.0, mean_v = 0.0;
  for (const auto* r : window) {
    mean_t += r->t;
    mean_v += r->max_log_u;
  }
  mean_t /= window.size();
  mean_v /= window.size();
  double sxy = 0.0, sxx = 0.0;
  for (const auto* r : window) {
    sxy += (r->t - mean_t) * (r->max_log_u - mean_v);
    sxx += (r->t - mean_t) * (r->t - mean_t);
  }
  rep.growth_rate_estimate = sxx > 0.0 ? sxy / sxx : 0.0;

  const auto& u = trajectory.final_state.u;
  const std::size_t i = trajectory.prediction.x_bar_index;
  const double h = trajectory.dx;
  if (i < u.size()) {
    if (i > 0) rep.boundary_cell_mass += 0.5 * h * (u[i - 1] + u[i]);
    if (i + 1 < u.size()) rep.boundary_cell_mass += 0.5 * h * (u[i] + u[i + 1]);
  }
  return rep;
}

}  // namespace selection

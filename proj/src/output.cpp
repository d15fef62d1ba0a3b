#include "selection/output.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace selection {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory) {
  os << kTrajectoryHeader << '\n';
  for (const auto& r : trajectory.records) {
    os << format_number(r.t) << ',' << format_number(r.rho) << ',' << format_number(r.V) << ','
       << format_number(r.D) << ',' << format_number(r.W) << ',' << format_number(r.max_log_u)
       << ',' << format_number(r.x_mode) << ',' << format_number(r.mass_near_xbar) << ','
       << format_number(r.tail_mass) << ',' << r.undershoot_clamps << '\n';
  }
}

void write_snapshot_csv(std::ostream& os, const Snapshot& snapshot, const Grid& grid) {
  os << kSnapshotHeader << '\n';
  for (std::size_t i = 0; i < grid.size(); ++i) {
    os << format_number(grid.node(i)) << ',' << format_number(snapshot.u[i]) << ','
       << format_number(snapshot.log_u[i]) << '\n';
  }
}

std::string snapshot_file_name(double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "snapshot_%.10g.csv", t);
  return buf;
}

namespace {

// JSON has no infinities; they are written as strings.
nlohmann::ordered_json real(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

}  // namespace

nlohmann::ordered_json prediction_json(const EquilibriumPrediction& pred) {
  nlohmann::ordered_json j;
  j["x_bar"] = real(pred.x_bar);
  j["x_bar_index"] = pred.x_bar_index;
  j["rho_bar"] = real(pred.rho_bar);
  j["kappa"] = real(pred.kappa);
  j["b_m"] = real(pred.b_m);
  j["b_M"] = real(pred.b_M);
  j["d_m"] = real(pred.d_m);
  j["d_M"] = real(pred.d_M);
  j["r_m"] = real(pred.r_m);
  j["r_M"] = real(pred.r_M);
  j["rho_m"] = real(pred.rho_m);
  j["rho_M"] = real(pred.rho_M);
  j["x_bar_on_boundary"] = pred.x_bar_on_boundary;
  j["alpha_R"] = pred.alpha_R ? real(*pred.alpha_R) : nlohmann::ordered_json(nullptr);
  j["warnings"] = pred.warnings;
  return j;
}

nlohmann::ordered_json record_json(const DiagnosticsRecord& r) {
  nlohmann::ordered_json j;
  j["t"] = real(r.t);
  j["rho"] = real(r.rho);
  j["V"] = real(r.V);
  j["D"] = real(r.D);
  j["W"] = real(r.W);
  j["max_log_u"] = real(r.max_log_u);
  j["x_mode"] = real(r.x_mode);
  j["mass_near_xbar"] = real(r.mass_near_xbar);
  j["tail_mass"] = real(r.tail_mass);
  j["undershoot_clamps"] = r.undershoot_clamps;
  j["rescaled"] = r.rescaled;
  return j;
}

nlohmann::ordered_json summary_json(const Scenario& scenario, const Trajectory& trajectory,
                                    const SummaryExtras& extras) {
  const ScenarioSettings& cfg = scenario.settings();
  nlohmann::ordered_json j;
  j["fingerprint"] = trajectory.fingerprint;
  nlohmann::ordered_json sc;
  sc["x_min"] = scenario.grid().x_min();
  sc["x_max"] = scenario.grid().x_max();
  sc["n_cells"] = scenario.grid().n_cells();
  sc["c0"] = cfg.c0;
  sc["b"] = expr::print(scenario.b().expression);
  sc["d"] = expr::print(scenario.d().expression);
  sc["u0"] = expr::print(scenario.u0().expression);
  sc["t_end"] = cfg.t_end;
  sc["dt"] = cfg.dt;
  sc["sample_every"] = cfg.sample_every;
  sc["epsilon"] = scenario.epsilon();
  sc["tail_R"] = cfg.tail_R ? nlohmann::ordered_json(*cfg.tail_R) : nlohmann::ordered_json(nullptr);
  j["scenario"] = sc;
  j["scheme"] = to_string(trajectory.scheme);
  j["prediction"] = prediction_json(trajectory.prediction);
  j["steps"] = trajectory.steps;
  j["stopped_early"] = trajectory.stopped_early;
  j["support_preserved"] = trajectory.support_preserved;
  j["final"] = trajectory.records.empty() ? nlohmann::ordered_json(nullptr)
                                          : record_json(trajectory.records.back());
  nlohmann::ordered_json breaches = nlohmann::ordered_json::array();
  for (const auto& b : trajectory.breaches) {
    breaches.push_back({{"kind", "corridor"},
                        {"t", real(b.t)},
                        {"rho", real(b.rho)},
                        {"lower", real(b.lower)},
                        {"upper", real(b.upper)}});
  }
  j["breach_count"] = trajectory.breach_count;
  j["breaches"] = breaches;
  if (extras.blow_up) {
    j["blow_up"] = {{"monotone_growth", extras.blow_up->monotone_growth},
                    {"growth_rate_estimate", real(extras.blow_up->growth_rate_estimate)},
                    {"boundary_cell_mass", real(extras.blow_up->boundary_cell_mass)},
                    {"samples", extras.blow_up->samples}};
  }
  if (extras.error) j["error"] = *extras.error;
  return j;
}

std::string plot_script(const Trajectory& trajectory, const std::vector<std::string>& snapshot_files) {
  std::ostringstream os;
  os << "# gnuplot script; run with: gnuplot plot.gp\n";
  os << "set datafile separator ','\n";
  os << "set terminal pngcairo size 1200,900\n";
  os << "set key autotitle columnhead\n";
  os << "set output 'trajectory.png'\n";
  os << "set multiplot layout 2,2\n";
  os << "set xlabel 't'\n";
  os << "set title 'total mass'\n";
  os << "plot 'trajectory.csv' using 1:2 with lines, " << format_number(trajectory.prediction.rho_bar)
     << " title 'rho_bar' dashtype 2\n";
  os << "set title 'Lyapunov functional V'\n";
  os << "plot 'trajectory.csv' using 1:3 with lines\n";
  os << "set title 'dissipation D and residual W'\n";
  os << "set logscale y\n";
  os << "plot 'trajectory.csv' using 1:4 with lines, '' using 1:5 with lines\n";
  os << "unset logscale y\n";
  os << "set title 'max log density'\n";
  os << "plot 'trajectory.csv' using 1:6 with lines\n";
  os << "unset multiplot\n";
  if (!snapshot_files.empty()) {
    os << "set output 'snapshots.png'\n";
    os << "set xlabel 'x'\n";
    os << "set title 'log density'\n";
    os << "plot ";
    for (std::size_t i = 0; i < snapshot_files.size(); ++i) {
      if (i) os << ", ";
      os << "'" << snapshot_files[i] << "' using 1:3 with lines title '" << snapshot_files[i] << "'";
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace selection

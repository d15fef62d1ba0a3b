#include "selection/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <limits>

#include "selection/diagnostics.hpp"
#include "selection/errors.hpp"
#include "selection/integrator.hpp"
#include "selection/output.hpp"
#include "selection/scenario_file.hpp"

namespace selection::cli {

namespace fs = std::filesystem;

namespace {

constexpr double kLyapunovSlack = 1e-8;
constexpr double kResidualDecay = 1e-2;
constexpr double kInteriorRhoTol = 1e-3;
constexpr double kBoundaryRhoTol = 1e-2;
constexpr double kInteriorMassFraction = 0.99;
constexpr double kBoundaryMassFraction = 0.95;

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("cannot write " + path.string());
  os << content;
}

std::optional<BlowUpReport> try_blow_up(const Trajectory& trajectory) {
  try {
    return blow_up_report(trajectory);
  } catch (const InputError&) {
    return std::nullopt;
  }
}

void write_outputs(const Scenario& scenario, const Trajectory& trajectory,
                   const SummaryExtras& extras, const fs::path& dir) {
  fs::create_directories(dir);
  {
    std::ofstream os(dir / "trajectory.csv", std::ios::binary);
    write_trajectory_csv(os, trajectory);
  }
  std::vector<std::string> snapshot_files;
  for (const auto& snap : trajectory.snapshots) {
    const std::string name = snapshot_file_name(snap.t);
    std::ofstream os(dir / name, std::ios::binary);
    write_snapshot_csv(os, snap, scenario.grid());
    snapshot_files.push_back(name);
  }
  write_file(dir / "summary.json", summary_json(scenario, trajectory, extras).dump(2) + "\n");
  write_file(dir / "plot.gp", plot_script(trajectory, snapshot_files));
}

std::string sanitize(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

}  // namespace

std::string output_directory(const Options& options) {
  if (options.out) return *options.out;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
  return "out";
}

Scenario load_with_overrides(const std::string& path, const Options& options) {
  Scenario scenario = load_scenario(path);
  if (!options.scheme && !options.dt && !options.t_end && !options.sample_every) return scenario;
  ScenarioSettings cfg = scenario.settings();
  if (options.scheme) cfg.scheme = scheme_from_string(*options.scheme);
  if (options.dt) cfg.dt = *options.dt;
  if (options.t_end) cfg.t_end = *options.t_end;
  if (options.sample_every) cfg.sample_every = *options.sample_every;
  return scenario.with_settings(cfg);
}

std::vector<InvariantResult> verify_trajectory(const Scenario& scenario,
                                               const Trajectory& trajectory) {
  std::vector<InvariantResult> results;
  const EquilibriumPrediction& pred = trajectory.prediction;
  const auto& recs = trajectory.records;
  if (recs.empty()) return {{"trajectory", false, "no records"}};
  const auto& first = recs.front();
  const auto& last = recs.back();

  {
    const double lo = pred.rho_m - kCorridorTolerance;
    const double hi = pred.rho_M + kCorridorTolerance;
    double worst_lo = std::numeric_limits<double>::infinity();
    double worst_hi = -std::numeric_limits<double>::infinity();
    for (const auto& r : recs) {
      worst_lo = std::min(worst_lo, r.rho);
      worst_hi = std::max(worst_hi, r.rho);
    }
    const bool ok = trajectory.breach_count == 0 && worst_lo >= lo && worst_hi <= hi;
    std::string detail = "rho in [" + format_number(worst_lo) + ", " + format_number(worst_hi) +
                         "], corridor [" + format_number(pred.rho_m) + ", " +
                         format_number(pred.rho_M) + "]";
    if (trajectory.breach_count) {
      const auto& b = trajectory.breaches.front();
      detail += "; " + std::to_string(trajectory.breach_count) + " breaches, first at t = " +
                format_number(b.t) + " rho = " + format_number(b.rho);
    }
    results.push_back({"corridor", ok, detail});
  }

  {
    bool ok = true;
    std::string detail = "V nondecreasing over " + std::to_string(recs.size()) + " samples";
    for (std::size_t k = 1; k < recs.size(); ++k) {
      const double prev = recs[k - 1].V;
      if (recs[k].V < prev - kLyapunovSlack * (1.0 + std::abs(prev))) {
        ok = false;
        detail = "V decreased at t = " + format_number(recs[k].t) + ": " + format_number(prev) +
                 " -> " + format_number(recs[k].V);
        break;
      }
    }
    results.push_back({"lyapunov_monotone", ok, detail});
  }

  {
    double min_d = std::numeric_limits<double>::infinity();
    for (const auto& r : recs) min_d = std::min(min_d, r.D);
    results.push_back({"dissipation_nonnegative", min_d >= 0.0, "min D = " + format_number(min_d)});
  }

  results.push_back({"residual_decay", last.W <= kResidualDecay * first.W,
                     "W(T)/W(0) = " + format_number(first.W > 0 ? last.W / first.W : 0.0) +
                         " (W(0) = " + format_number(first.W) + ")"});

  {
    const double tol = pred.x_bar_on_boundary ? kBoundaryRhoTol : kInteriorRhoTol;
    const double err = std::abs(last.rho - pred.rho_bar);
    results.push_back({"rho_limit", err < tol,
                       "|rho(T) - rho_bar| = " + format_number(err) + " (tol " +
                           format_number(tol) + ")"});
  }

  results.push_back({"support_conserved", trajectory.support_preserved,
                     trajectory.support_preserved ? "positive node set unchanged"
                                                  : "positive node set changed"});

  {
    const double need = pred.x_bar_on_boundary ? kBoundaryMassFraction : kInteriorMassFraction;
    bool ok = last.mass_near_xbar >= need;
    std::string detail = "mass within " + format_number(scenario.epsilon()) + " of x_bar = " +
                         format_number(last.mass_near_xbar) + " (need " + format_number(need) + ")";
    if (!pred.x_bar_on_boundary) {
      ok = ok && last.x_mode == pred.x_bar;
      detail += ", x_mode = " + format_number(last.x_mode) + ", x_bar = " + format_number(pred.x_bar);
    }
    results.push_back({"concentration", ok, detail});
  }

  if (pred.x_bar_on_boundary) {
    try {
      const BlowUpReport rep = blow_up_report(trajectory);
      results.push_back({"blow_up_monotone", rep.monotone_growth,
                         "slope " + format_number(rep.growth_rate_estimate) +
                             ", boundary cell mass " + format_number(rep.boundary_cell_mass)});
    } catch (const InputError& e) {
      results.push_back({"blow_up_monotone", false, e.what()});
    }
  }
  return results;
}

int cmd_predict(const std::string& path, const Options& options, std::ostream& out,
                std::ostream& err) {
  try {
    const Scenario scenario = load_with_overrides(path, options);
    const EquilibriumPrediction pred = predict_equilibrium(scenario);
    for (const auto& w : pred.warnings) err << "warning: " << w << '\n';
    if (!options.quiet) {
      auto line = [&](const char* name, const std::string& value) {
        out << std::left << std::setw(20) << name << value << '\n';
      };
      line("x_bar", format_number(pred.x_bar));
      line("rho_bar", format_number(pred.rho_bar));
      line("kappa", format_number(pred.kappa));
      line("b_m", format_number(pred.b_m));
      line("b_M", format_number(pred.b_M));
      line("d_m", format_number(pred.d_m));
      line("d_M", format_number(pred.d_M));
      line("r_m", format_number(pred.r_m));
      line("r_M", format_number(pred.r_M));
      line("rho_m", format_number(pred.rho_m));
      line("rho_M", format_number(pred.rho_M));
      line("x_bar_on_boundary", pred.x_bar_on_boundary ? "true" : "false");
      line("alpha_R", pred.alpha_R ? format_number(*pred.alpha_R) : "none");
    }
    out << prediction_json(pred).dump() << '\n';
    return kSuccess;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
}

int cmd_run(const std::string& path, const Options& options, std::ostream& out, std::ostream& err) {
  std::optional<Scenario> scenario;
  try {
    scenario = load_with_overrides(path, options);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
  const fs::path dir = output_directory(options);
  Trajectory trajectory;
  SummaryExtras extras;
  int code = kSuccess;
  try {
    run_into(*scenario, trajectory);
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    extras.error = e.what();
    code = kRuntimeError;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
  if (trajectory.prediction.x_bar_on_boundary) extras.blow_up = try_blow_up(trajectory);
  try {
    write_outputs(*scenario, trajectory, extras, dir);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  if (!options.quiet && !trajectory.records.empty()) {
    const auto& last = trajectory.records.back();
    out << "scheme " << to_string(trajectory.scheme) << ", " << trajectory.steps << " steps, t = "
        << format_number(last.t) << ", rho = " << format_number(last.rho)
        << ", rho_bar = " << format_number(trajectory.prediction.rho_bar) << '\n';
    out << "wrote " << (dir / "trajectory.csv").string() << '\n';
  }
  return code;
}

int cmd_verify(const std::string& path, const Options& options, std::ostream& out,
               std::ostream& err) {
  std::optional<Scenario> scenario;
  Trajectory trajectory;
  try {
    scenario = load_with_overrides(path, options);
    run_into(*scenario, trajectory);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  const auto results = verify_trajectory(*scenario, trajectory);
  bool all = true;
  for (const auto& r : results) {
    out << (r.pass ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
    all = all && r.pass;
  }
  if (trajectory.prediction.x_bar_on_boundary && !options.quiet) {
    if (const auto rep = try_blow_up(trajectory)) {
      out << "blow-up report: monotone_growth=" << (rep->monotone_growth ? "true" : "false")
          << " growth_rate=" << format_number(rep->growth_rate_estimate)
          << " boundary_cell_mass=" << format_number(rep->boundary_cell_mass) << '\n';
    }
  }
  return all ? kSuccess : kInvariantFailure;
}

double fitted_order(const std::vector<SweepPoint>& points, const std::vector<double>& step_sizes) {
  struct Pt {
    double h, rho, err;
  };
  std::vector<Pt> ok;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].status == "ok") ok.push_back({step_sizes[i], points[i].rho_final, points[i].abs_error});
  }
  std::sort(ok.begin(), ok.end(), [](const Pt& a, const Pt& b) { return a.h > b.h; });
  const double nan = std::numeric_limits<double>::quiet_NaN();

  std::vector<std::pair<double, double>> xy;  // (log h, log error proxy)
  if (ok.size() >= 3) {
    for (std::size_t k = 0; k + 1 < ok.size(); ++k) {
      const double diff = std::abs(ok[k].rho - ok[k + 1].rho);
      if (!(diff > 0.0)) return nan;
      xy.emplace_back(std::log(ok[k].h), std::log(diff));
    }
  } else if (ok.size() == 2) {
    for (const auto& p : ok) {
      if (!(p.err > 0.0)) return nan;
      xy.emplace_back(std::log(p.h), std::log(p.err));
    }
  } else {
    return nan;
  }
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : xy) {
    mx += x;
    my += y;
  }
  mx /= xy.size();
  my /= xy.size();
  double sxy = 0.0, sxx = 0.0;
  for (const auto& [x, y] : xy) {
    sxy += (x - mx) * (y - my);
    sxx += (x - mx) * (x - mx);
  }
  return sxx > 0.0 ? sxy / sxx : nan;
}

int cmd_sweep(const std::string& path, const std::string& parameter,
              const std::vector<double>& values, const Options& options, std::ostream& out,
              std::ostream& err) {
  std::optional<Scenario> base;
  try {
    if (parameter != "dt" && parameter != "n_cells")
      throw InputError("sweep parameter must be dt or n_cells, got '" + parameter + "'");
    if (values.size() < 2) throw InputError("sweep needs at least 2 values");
    if (parameter == "n_cells") {
      for (double v : values) {
        if (v != std::floor(v) || v < 2) throw InputError("n_cells values must be integers >= 2");
      }
    }
    base = load_with_overrides(path, options);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }

  std::vector<std::future<SweepPoint>> jobs;
  for (double v : values) {
    jobs.push_back(std::async(std::launch::async, [&base, &parameter, v] {
      SweepPoint p;
      p.value = v;
      try {
        Scenario child = *base;
        if (parameter == "dt") {
          ScenarioSettings cfg = base->settings();
          cfg.dt = v;
          child = base->with_settings(cfg);
        } else {
          const Grid& g = base->grid();
          child = base->with_grid(Grid(g.x_min(), g.x_max(), static_cast<int>(v)));
        }
        const Trajectory traj = run(child);
        p.rho_final = traj.records.back().rho;
        p.abs_error = std::abs(p.rho_final - traj.prediction.rho_bar);
        p.status = "ok";
      } catch (const std::exception& e) {
        p.status = sanitize(e.what());
      }
      return p;
    }));
  }
  std::vector<SweepPoint> points;
  std::vector<double> steps;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    points.push_back(jobs[i].get());
    const double v = values[i];
    steps.push_back(parameter == "dt" ? v : (base->grid().x_max() - base->grid().x_min()) / v);
  }
  const double order = fitted_order(points, steps);

  const fs::path dir = output_directory(options);
  try {
    fs::create_directories(dir);
    std::ofstream os(dir / "sweep.csv", std::ios::binary);
    os << "value,rho_final,abs_error,status,fitted_order\n";
    for (const auto& p : points) {
      os << format_number(p.value) << ',' << format_number(p.rho_final) << ','
         << format_number(p.abs_error) << ',' << p.status << ',' << format_number(order) << '\n';
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  bool any_failed = false;
  for (const auto& p : points) {
    if (p.status != "ok") {
      any_failed = true;
      err << "error: " << parameter << " = " << format_number(p.value) << ": " << p.status << '\n';
    }
  }
  if (!options.quiet) {
    for (const auto& p : points) {
      out << parameter << " = " << format_number(p.value) << ": rho(T) = "
          << format_number(p.rho_final) << ", |rho - rho_bar| = " << format_number(p.abs_error)
          << '\n';
    }
  }
  out << "fitted_order " << format_number(order) << '\n';
  return any_failed ? kRuntimeError : kSuccess;
}

}  // namespace selection::cli

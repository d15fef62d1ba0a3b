#include "selection/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <sstream>
#include <tuple>

#include "selection/errors.hpp"

namespace selection {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Grid::Grid(double x_min, double x_max, int n_cells) : x_min_(x_min), x_max_(x_max), n_cells_(n_cells) {
  if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_min < x_max))
    throw InputError("domain: x_min must be less than x_max");
  if (n_cells < 2) throw InputError("domain: n_cells must be at least 2");
  nodes_.resize(size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) nodes_[i] = node(i);
  const double h = dx();
  weights_.assign(size(), h);
  weights_.front() = 0.5 * h;
  weights_.back() = 0.5 * h;
}

double Grid::node(std::size_t i) const noexcept {
  if (i == static_cast<std::size_t>(n_cells_)) return x_max_;
  return x_min_ + (x_max_ - x_min_) * static_cast<double>(i) / n_cells_;
}

TraitFunction TraitFunction::sample(const std::string& source, const Grid& grid) {
  TraitFunction f;
  f.source = source;
  f.expression = expr::parse(source);
  f.samples.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = expr::eval(f.expression, grid.node(i));
    if (!std::isfinite(v))
      throw InputError("expression '" + source + "' is not finite at x = " + num(grid.node(i)));
    f.samples[i] = v;
  }
  const auto [lo, hi] = std::minmax_element(f.samples.begin(), f.samples.end());
  f.min = *lo;
  f.max = *hi;
  return f;
}

std::string to_string(Scheme scheme) {
  return scheme == Scheme::exponential ? "exponential" : "direct";
}

Scheme scheme_from_string(const std::string& name) {
  if (name == "exponential") return Scheme::exponential;
  if (name == "direct") return Scheme::direct;
  throw InputError("unknown scheme '" + name + "' (expected exponential or direct)");
}

Scenario::Scenario(Grid grid, TraitFunction b, TraitFunction d, TraitFunction u0,
                   ScenarioSettings settings)
    : grid_(std::move(grid)),
      b_(std::move(b)),
      d_(std::move(d)),
      u0_(std::move(u0)),
      settings_(std::move(settings)) {
  in_support_.assign(grid_.size(), 0);
  log_u0_.assign(grid_.size(), -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    if (u0_.samples[i] > 0.0) {
      support_.push_back(i);
      in_support_[i] = 1;
      log_u0_[i] = std::log(u0_.samples[i]);
    }
  }
  rho0_ = quadrature(u0_.samples, grid_);
}

Scenario Scenario::assemble(const Grid& grid, const std::string& b, const std::string& d,
                            const std::string& u0, const ScenarioSettings& settings) {
  if (!(settings.c0 >= 0.0) || !std::isfinite(settings.c0))
    throw InputError("model.c0 must be finite and nonnegative");
  if (!(settings.dt > 0.0) || !std::isfinite(settings.dt))
    throw InputError("run.dt must be positive");
  if (!(settings.t_end >= 0.0) || !std::isfinite(settings.t_end))
    throw InputError("run.t_end must be nonnegative");
  if (settings.sample_every < 1) throw InputError("run.sample_every must be at least 1");
  if (settings.stop_tol && !(*settings.stop_tol > 0.0))
    throw InputError("run.stop_tol must be positive");
  if (settings.epsilon && !(*settings.epsilon > 0.0))
    throw InputError("diagnostics.epsilon must be positive");
  for (double t : settings.snapshot_times) {
    if (!(t >= 0.0) || !std::isfinite(t))
      throw InputError("run.snapshot_times must be finite and nonnegative");
  }

  auto sample = [&](const std::string& source, const char* key) {
    try {
      return TraitFunction::sample(source, grid);
    } catch (const InputError& e) {
      throw InputError(std::string(key) + ": " + e.what());
    }
  };
  auto bf = sample(b, "model.b");
  auto df = sample(d, "model.d");
  auto uf = sample(u0, "model.u0");
  if (!(bf.min > 0.0))
    throw InputError("model.b must be positive on the grid (min " + num(bf.min) + ")");
  if (!(df.min > 0.0))
    throw InputError("model.d must be positive on the grid (min " + num(df.min) + ")");
  if (uf.min < 0.0)
    throw InputError("model.u0 must be nonnegative on the grid (min " + num(uf.min) + ")");
  if (!(uf.max > 0.0)) throw InputError("model.u0 has empty support on the grid");

  Scenario s(grid, std::move(bf), std::move(df), std::move(uf), settings);
  if (!(s.rho0_ > 0.0)) throw InputError("initial mass must be positive");
  return s;
}

double Scenario::epsilon() const noexcept {
  return settings_.epsilon.value_or(5.0 * grid_.dx());
}

Scenario Scenario::with_settings(const ScenarioSettings& settings) const {
  return assemble(grid_, b_.source, d_.source, u0_.source, settings);
}

Scenario Scenario::with_grid(const Grid& grid) const {
  return assemble(grid, b_.source, d_.source, u0_.source, settings_);
}

std::string Scenario::canonical_text() const {
  std::ostringstream os;
  os << "domain " << num(grid_.x_min()) << ' ' << num(grid_.x_max()) << ' ' << grid_.n_cells()
     << '\n';
  os << "c0 " << num(settings_.c0) << '\n';
  os << "b " << expr::print(b_.expression) << '\n';
  os << "d " << expr::print(d_.expression) << '\n';
  os << "u0 " << expr::print(u0_.expression) << '\n';
  os << "run " << num(settings_.t_end) << ' ' << num(settings_.dt) << ' '
     << settings_.sample_every << ' ' << to_string(settings_.scheme) << '\n';
  os << "stop_tol " << (settings_.stop_tol ? num(*settings_.stop_tol) : "none") << '\n';
  os << "snapshots";
  for (double t : settings_.snapshot_times) os << ' ' << num(t);
  os << '\n';
  os << "epsilon " << num(epsilon()) << '\n';
  os << "tail_R " << (settings_.tail_R ? num(*settings_.tail_R) : "none") << '\n';
  return os.str();
}

std::string Scenario::fingerprint() const {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : canonical_text()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

double eval_fitness(double x, double rho, const Scenario& scenario) {
  return fitness(scenario.b()(x), scenario.d()(x), rho, scenario.c0());
}

double equilibrium_root(double kappa, double c0) {
  if (!(kappa >= 0.0)) throw InputError("equilibrium root requires kappa >= 0, got " + num(kappa));
  // 2k / (1 + sqrt(1 + 4 c0 k)) avoids the cancellation of the textbook form.
  return 2.0 * kappa / (1.0 + std::sqrt(1.0 + 4.0 * c0 * kappa));
}

double positive_root(double kappa) { return equilibrium_root(kappa, 1.0); }

EquilibriumPrediction predict_equilibrium(const Scenario& scenario) {
  const Grid& grid = scenario.grid();
  const auto& b = scenario.b().samples;
  const auto& d = scenario.d().samples;
  const std::size_t n = grid.size();
  if (scenario.support().empty()) throw InputError("empty support");

  std::vector<char> closure(n, 0);
  for (std::size_t i : scenario.support()) {
    closure[i] = 1;
    if (i > 0) closure[i - 1] = 1;
    if (i + 1 < n) closure[i + 1] = 1;
  }

  EquilibriumPrediction pred;
  double best = -std::numeric_limits<double>::infinity();
  std::size_t best_i = 0;
  std::size_t ties = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!closure[i]) continue;
    const double ratio = b[i] / d[i];
    if (!std::isfinite(ratio)) throw InputError("b/d is not finite at x = " + num(grid.node(i)));
    if (ratio > best) {
      best = ratio;
      best_i = i;
      ties = 1;
    } else if (ratio == best) {
      ++ties;
    }
  }
  if (ties > 1) {
    pred.warnings.push_back("b/d maximum is attained at " + std::to_string(ties) +
                            " nodes (argmax not unique); using smallest x = " +
                            num(grid.node(best_i)));
  }

  pred.x_bar_index = best_i;
  pred.x_bar = grid.node(best_i);
  pred.kappa = best;
  pred.rho_bar = equilibrium_root(best, scenario.c0());
  pred.b_m = scenario.b().min;
  pred.b_M = scenario.b().max;
  pred.d_m = scenario.d().min;
  pred.d_M = scenario.d().max;
  pred.r_m = equilibrium_root(pred.b_m / pred.d_M, scenario.c0());
  pred.r_M = equilibrium_root(pred.b_M / pred.d_m, scenario.c0());
  std::tie(pred.rho_m, pred.rho_M) = apriori_corridor(pred, scenario.initial_mass());

  const std::size_t i = best_i;
  pred.x_bar_on_boundary = !scenario.in_support(i) || i == 0 || i + 1 == n ||
                           !scenario.in_support(i - 1) || !scenario.in_support(i + 1);

  if (const auto& R = scenario.settings().tail_R) {
    pred.alpha_R = check_tail_condition(scenario, pred, *R);
    if (pred.alpha_R && *pred.alpha_R >= 0.0) {
      pred.warnings.push_back("tail condition fails: alpha_R = " + num(*pred.alpha_R) +
                              " >= 0 for R = " + num(*R));
    }
  }
  return pred;
}

std::pair<double, double> apriori_corridor(const EquilibriumPrediction& pred, double rho0) {
  return {std::min(pred.r_m, rho0), std::max(pred.r_M, rho0)};
}

std::optional<double> check_tail_condition(const Scenario& scenario,
                                           const EquilibriumPrediction& pred, double R) {
  const Grid& grid = scenario.grid();
  std::optional<double> alpha;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (std::abs(grid.node(i)) < R) continue;
    const double g = fitness(scenario.b().samples[i], scenario.d().samples[i], pred.rho_bar,
                             scenario.c0());
    alpha = alpha ? std::max(*alpha, g) : g;
  }
  return alpha;
}

double quadrature(std::span<const double> values, const Grid& grid) {
  if (values.size() != grid.size())
    throw InputError("quadrature: expected " + std::to_string(grid.size()) + " values, got " +
                     std::to_string(values.size()));
  const auto& w = grid.weights();
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (std::isnan(v) || v < 0.0)
      throw InputError("quadrature: invalid density value " + num(v) + " at node " +
                       std::to_string(i));
    sum += w[i] * v;
  }
  return sum;
}

}  // namespace selection

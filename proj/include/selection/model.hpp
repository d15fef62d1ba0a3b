#pragma once

// Static problem analysis for the nonlocal selection model
//
//     du/dt (x,t) = G(x, rho(t)) u(x,t),   G(x, rho) = b(x)/(1 + c0 rho) - d(x) rho,
//     rho(t) = integral of u(x,t) dx,
//
// on a uniform trait lattice.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "selection/exprlang.hpp"
#include "selection/grid.hpp"

namespace selection {

/// A parsed function of the trait, sampled on a grid with grid-certified bounds.
struct TraitFunction {
  std::string source;
  expr::Expr expression;
  std::vector<double> samples;  // one per grid node
  double min = 0.0;
  double max = 0.0;

  /// Parses and samples. Throws InputError on parse/eval failure or non-finite samples.
  static TraitFunction sample(const std::string& source, const Grid& grid);

  double operator()(double x) const { return expr::eval(expression, x); }
};

enum class Scheme { exponential, direct };

std::string to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& name);

struct ScenarioSettings {
  double c0 = 1.0;
  double t_end = 0.0;
  double dt = 0.0;
  int sample_every = 1;
  Scheme scheme = Scheme::exponential;
  std::optional<double> stop_tol;
  std::vector<double> snapshot_times;
  std::optional<double> epsilon;  // concentration radius; defaults to 5 dx
  std::optional<double> tail_R;
};

/// Full, validated problem description. Immutable once assembled.
class Scenario {
 public:
  /// Validates: b_m > 0, d_m > 0, u0 >= 0 with positive mass, dt > 0, t_end >= 0,
  /// c0 >= 0, sample_every >= 1. Throws InputError with a descriptive message.
  static Scenario assemble(const Grid& grid, const std::string& b, const std::string& d,
                           const std::string& u0, const ScenarioSettings& settings);

  const Grid& grid() const noexcept { return grid_; }
  const TraitFunction& b() const noexcept { return b_; }
  const TraitFunction& d() const noexcept { return d_; }
  const TraitFunction& u0() const noexcept { return u0_; }
  const ScenarioSettings& settings() const noexcept { return settings_; }
  double c0() const noexcept { return settings_.c0; }
  double epsilon() const noexcept;

  /// Nodes with u0 > 0, ascending.
  const std::vector<std::size_t>& support() const noexcept { return support_; }
  bool in_support(std::size_t i) const noexcept { return in_support_[i] != 0; }
  /// log u0 at each node (-inf outside the support).
  const std::vector<double>& log_u0() const noexcept { return log_u0_; }
  double initial_mass() const noexcept { return rho0_; }

  /// Same problem with different run controls (used by CLI overrides and sweeps).
  Scenario with_settings(const ScenarioSettings& settings) const;
  Scenario with_grid(const Grid& grid) const;

  /// Canonical text of every field; equal scenarios give equal text.
  std::string canonical_text() const;
  /// FNV-1a 64-bit hash of canonical_text(), as 16 hex digits.
  std::string fingerprint() const;

 private:
  Scenario(Grid grid, TraitFunction b, TraitFunction d, TraitFunction u0,
           ScenarioSettings settings);

  Grid grid_;
  TraitFunction b_;
  TraitFunction d_;
  TraitFunction u0_;
  ScenarioSettings settings_;
  std::vector<std::size_t> support_;
  std::vector<char> in_support_;
  std::vector<double> log_u0_;
  double rho0_ = 0.0;
};

struct EquilibriumPrediction {
  double x_bar = 0.0;
  std::size_t x_bar_index = 0;
  double rho_bar = 0.0;
  double kappa = 0.0;  // b(x_bar)/d(x_bar)
  double b_m = 0.0, b_M = 0.0, d_m = 0.0, d_M = 0.0;
  double r_m = 0.0, r_M = 0.0;
  double rho_m = 0.0, rho_M = 0.0;
  bool x_bar_on_boundary = false;
  std::optional<double> alpha_R;
  std::vector<std::string> warnings;
};

inline double fitness(double b, double d, double rho, double c0) {
  return b / (1.0 + c0 * rho) - d * rho;
}

/// G(x, rho) with b and d evaluated at an arbitrary trait value.
double eval_fitness(double x, double rho, const Scenario& scenario);

/// Nonnegative root of r (1 + r) = kappa. Throws InputError for kappa < 0.
double positive_root(double kappa);

/// Nonnegative root of r (1 + c0 r) = kappa; reduces to kappa when c0 = 0.
double equilibrium_root(double kappa, double c0);

/// Argmax of b/d over the closed support, the limit mass and the a priori corridor.
/// Ties go to the smallest x and add a warning.
EquilibriumPrediction predict_equilibrium(const Scenario& scenario);

/// (min(r_m, rho0), max(r_M, rho0)).
std::pair<double, double> apriori_corridor(const EquilibriumPrediction& pred, double rho0);

/// max over nodes with |x| >= R of G(x, rho_bar); empty when no such node exists.
std::optional<double> check_tail_condition(const Scenario& scenario,
                                           const EquilibriumPrediction& pred, double R);

/// Trapezoid rule. Throws InputError on size mismatch, NaN or negative values.
double quadrature(std::span<const double> values, const Grid& grid);

}  // namespace selection

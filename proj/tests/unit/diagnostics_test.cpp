#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "selection/diagnostics.hpp"
#include "selection/errors.hpp"
#include "selection/integrator.hpp"
#include "test_support.hpp"

using namespace selection;
using selection::testing::scenario;
using selection::testing::settings;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// A state with the given density and an independently chosen rho.
PopulationState state_with(const Scenario& s, double rho) {
  PopulationState st = init_state(s);
  st.rho = rho;
  return st;
}

}  // namespace

TEST_CASE("P and Q") {
  CHECK(lyapunov_P(1.0) == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
  CHECK(lyapunov_Q(1.0) == 2.0);
  CHECK(lyapunov_Q(0.0) == 0.0);
  CHECK(lyapunov_Q(0.5) == 0.75);
  CHECK(lyapunov_Q(2.0) == 6.0);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> rho(0.0, 50.0), c(0.0, 3.0);
  for (int i = 0; i < 1000; ++i) {
    const double r = rho(rng), c0 = c(rng);
    const double dP = 2.0 * c0 * r / 3.0 + 0.5;
    const double lhs = r * dP + lyapunov_P(r, c0);
    REQUIRE(std::abs(lhs - lyapunov_Q(r, c0)) <= 1e-14 * std::max(1.0, lyapunov_Q(r, c0)));
  }
}

TEST_CASE("V, D, W on constant data") {
  const auto s = scenario("2", "1", "ind(0,1)", 100);
  CHECK(compute_V(state_with(s, 1.0), s) == doctest::Approx(7.0 / 6.0).epsilon(1e-14));
  CHECK(compute_D(state_with(s, 1.0), s) == doctest::Approx(0.0));
  CHECK(compute_W(state_with(s, 1.0), s) == doctest::Approx(0.0));
  CHECK(compute_D(state_with(s, 0.5), s) == doctest::Approx(1.5 * 25.0 / 36.0).epsilon(1e-14));
  CHECK(compute_W(state_with(s, 0.5), s) == doctest::Approx(1.5625).epsilon(1e-14));
}

TEST_CASE("V on two atoms matches a hand sum") {
  const auto s = scenario("1 + ind(0, 0.5)", "1 + x", "1", 100);
  PopulationState st = init_state(s);
  st.log_u.assign(s.grid().size(), kNegInf);
  st.log_u[20] = std::log(3.0);
  st.log_u[70] = std::log(5.0);
  st.rho = 0.8;
  const double h = s.grid().dx();
  const double P = lyapunov_P(0.8);
  const double expected = h * 3.0 * (2.0 / 1.2 - P) + h * 5.0 * (1.0 / 1.7 - P);
  CHECK(compute_V(st, s) == doctest::Approx(expected).epsilon(1e-13));
  const double G20 = 2.0 / 1.8 - 1.2 * 0.8, G70 = 1.0 / 1.8 - 1.7 * 0.8;
  const double D = h * 3.0 * 1.8 / 1.2 * G20 * G20 + h * 5.0 * 1.8 / 1.7 * G70 * G70;
  CHECK(compute_D(st, s) == doctest::Approx(D).epsilon(1e-13));
}

TEST_CASE("dV/dt equals D along a trajectory") {
  const auto s = scenario("2 - (x-0.3)^2", "1 + 0.5*x", "1 + 0.5*sin(6*x)", 200);
  const double h = 1e-3;
  auto back = init_state(s);
  for (int k = 0; k < 999; ++k) back = step_exponential(back, h, s);
  const auto mid = step_exponential(back, h, s);
  const auto fwd = step_exponential(mid, h, s);
  const double dV = (compute_V(fwd, s) - compute_V(back, s)) / (2.0 * h);
  const double D = compute_D(mid, s);
  CHECK(D > 0.0);
  CHECK(std::abs(dV - D) < 1e-5 * std::max(1.0, D));
}

TEST_CASE("rescaled diagnostics survive huge densities") {
  const auto s = scenario("2", "1", "1", 10);
  PopulationState st = init_state(s);
  for (auto& v : st.log_u) v = 800.0;
  st.rho = 1.0;
  const auto pred = predict_equilibrium(s);
  const auto r = make_record(st, s, pred);
  CHECK(r.rescaled);
  CHECK(r.log_scale == 800.0);
  CHECK(r.V == doctest::Approx(7.0 / 6.0));
  CHECK(std::isfinite(r.W));
}

TEST_CASE("concentration_report") {
  const auto s = scenario("2 - (x-0.3)^2", "1", "ind(0,1)", 200);
  const auto pred = predict_equilibrium(s);
  REQUIRE(pred.x_bar == 0.3);
  const auto st = init_state(s);
  const auto rep = concentration_report(st, s, pred, 0.05);
  CHECK(rep.mass_near_xbar == doctest::Approx(0.1).epsilon(0.06));

  PopulationState point = st;
  point.log_u.assign(s.grid().size(), kNegInf);
  point.log_u[60] = 4.0;
  const auto full = concentration_report(point, s, pred, 1e-6);
  CHECK(full.mass_near_xbar == 1.0);
  CHECK(full.x_mode == 0.3);
  CHECK(full.mode_index == 60);
  CHECK(full.max_log_u == 4.0);
  CHECK_THROWS_AS(concentration_report(st, s, pred, 0.0), InputError);
}

TEST_CASE("blow_up_report") {
  SUBCASE("stationary") {
    const auto tr = run(scenario("2", "1", "ind(0,1)", 20, settings(10.0, 0.1, 1)));
    const auto rep = blow_up_report(tr);
    CHECK(rep.monotone_growth);
    CHECK(std::abs(rep.growth_rate_estimate) < 1e-12);
  }
  SUBCASE("too few samples") {
    const auto tr = run(scenario("2", "1", "1", 20, settings(1.0, 0.1, 5)));
    CHECK_THROWS_AS(blow_up_report(tr), InputError);
  }
  SUBCASE("boundary maximum grows without bound") {
    const auto tr = run(scenario("1 + x", "1", "1", 100, settings(100.0, 1e-2, 100)));
    const auto rep = blow_up_report(tr);
    CHECK(rep.monotone_growth);
    CHECK(rep.growth_rate_estimate > 0.0);
    CHECK(rep.boundary_cell_mass > 0.0);
    CHECK(rep.samples >= 10);
  }
  SUBCASE("interior maximum: growth stalls at late times") {
    const auto tr = run(scenario("2 - (x-0.3)^2", "1", "1", 100, settings(2000.0, 1e-2, 1000)));
    const auto rep = blow_up_report(tr);
    CHECK(rep.growth_rate_estimate >= 0.0);
    CHECK(rep.growth_rate_estimate < 1e-3);
  }
}

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"
#include "selection/commands.hpp"
#include "selection/errors.hpp"
#include "selection/output.hpp"
#include "selection/scenario_file.hpp"

namespace fs = std::filesystem;
using namespace selection;
using namespace selection::cli;

namespace {

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("selection_test_" + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::vector<std::vector<double>> read_csv(const fs::path& p) {
  std::ifstream is(p);
  std::string line;
  std::getline(is, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(is, line)) {
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
    rows.push_back(row);
  }
  return rows;
}

std::string scenario_path(const std::string& name) {
  return std::string(SELECTION_SCENARIO_DIR) + "/" + name + ".ini";
}

const char* kSmall = R"(# small test scenario
[domain]
x_min = 0
x_max = 1
n_cells = 100

[model]
b = 2 - (x-0.3)^2
d = 1
u0 = ind(0,1)

[run]
t_end = 2
dt = 0.01
sample_every = 10
snapshot_times = [0, 1]
)";

const char* kTwoPeakCoarse = R"([domain]
x_min = 0
x_max = 1
n_cells = 200
[model]
b = 1 + exp(-50*(x-0.25)^2) + 0.8*exp(-50*(x-0.75)^2)
d = 1
u0 = 1
[run]
t_end = 10
dt = 0.1
sample_every = 10
)";

int run_binary(const std::string& args) {
  const std::string cmd = std::string(SELECTION_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("scenario file parsing") {
  const auto f = parse_scenario_file(kSmall);
  CHECK(f.get("model", "b") == "2 - (x-0.3)^2");
  CHECK(f.get("run", "snapshot_times") == "[0, 1]");
  const Scenario s = assemble_scenario(f);
  CHECK(s.grid().n_cells() == 100);
  CHECK(s.c0() == 1.0);
  CHECK(s.settings().scheme == Scheme::exponential);
  CHECK(s.settings().snapshot_times == std::vector<double>{0.0, 1.0});

  CHECK_THROWS_WITH_AS(parse_scenario_file("[model]\nb = 1\nb = 2\n"), doctest::Contains("line 3"),
                       InputError);
  CHECK_THROWS_WITH_AS(parse_scenario_file("[model]\nbogus = 1\n"), doctest::Contains("line 2"),
                       InputError);
  CHECK_THROWS_AS(parse_scenario_file("[nowhere]\n"), InputError);
  CHECK_THROWS_AS(parse_scenario_file("b = 1\n"), InputError);

  std::string no_b = kSmall;
  no_b.erase(no_b.find("b = 2"), no_b.find("d = 1") - no_b.find("b = 2"));
  CHECK_THROWS_WITH_AS(assemble_scenario(parse_scenario_file(no_b)),
                       doctest::Contains("missing key model.b"), InputError);

  std::string bad_scheme = kSmall;
  bad_scheme += "scheme = implicit\n";
  CHECK_THROWS_AS(assemble_scenario(parse_scenario_file(bad_scheme)), InputError);
}

TEST_CASE("predict reports the interior maximum") {
  std::ostringstream out, err;
  REQUIRE(cmd_predict(scenario_path("gaussian_ratio"), {}, out, err) == kSuccess);
  const std::string text = out.str();
  const auto json_line = text.substr(text.rfind('{'));
  const auto j = nlohmann::json::parse(json_line);
  CHECK(j["x_bar"].get<double>() == 0.3);
  CHECK(j["rho_bar"].get<double>() == 1.0);
  CHECK(j["x_bar_on_boundary"].get<bool>() == false);
  CHECK(j["r_m"].get<double>() == doctest::Approx(positive_root(1.51)).epsilon(1e-12));
  CHECK(err.str().empty());

  std::ostringstream out2, err2;
  CHECK(cmd_predict(scenario_path("two_atom"), {}, out2, err2) == kSuccess);
  CHECK(err2.str().find("warning:") != std::string::npos);
}

TEST_CASE("missing key is an input error") {
  TempDir tmp;
  std::string no_b = kSmall;
  no_b.erase(no_b.find("b = 2"), no_b.find("d = 1") - no_b.find("b = 2"));
  write(tmp / "bad.ini", no_b);
  std::ostringstream out, err;
  CHECK(cmd_run(tmp / "bad.ini", {}, out, err) == kInputError);
  CHECK(err.str().find("missing key model.b") != std::string::npos);
  CHECK(cmd_predict(tmp / "missing.ini", {}, out, err) == kInputError);
}

TEST_CASE("run writes trajectory, snapshots and summary") {
  TempDir tmp;
  write(tmp / "s.ini", kSmall);
  Options opts;
  opts.out = tmp / "out";
  std::ostringstream out, err;
  REQUIRE(cmd_run(tmp / "s.ini", opts, out, err) == kSuccess);
  const fs::path dir = tmp.path() / "out";

  const std::string traj = slurp(dir / "trajectory.csv");
  CHECK(traj.substr(0, traj.find('\n')) == kTrajectoryHeader);
  const auto rows = read_csv(dir / "trajectory.csv");
  REQUIRE(rows.size() == 21);
  CHECK(rows[0][0] == 0.0);
  CHECK(rows[0][1] == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(rows.back()[0] == doctest::Approx(2.0));

  const auto snap = read_csv(dir / snapshot_file_name(0.0));
  REQUIRE(snap.size() == 101);
  for (const auto& r : snap) CHECK(r[1] == 1.0);
  CHECK(fs::exists(dir / snapshot_file_name(1.0)));
  CHECK(fs::exists(dir / "plot.gp"));

  const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
  CHECK(summary["scheme"] == "exponential");
  CHECK(summary["breach_count"] == 0);
  CHECK(summary["support_preserved"] == true);
  CHECK(summary["prediction"]["x_bar"].get<double>() == 0.3);

  opts.out = tmp / "direct";
  opts.scheme = "direct";
  REQUIRE(cmd_run(tmp / "s.ini", opts, out, err) == kSuccess);
  CHECK(nlohmann::json::parse(slurp(tmp.path() / "direct" / "summary.json"))["scheme"] == "direct");
}

TEST_CASE("run output is byte-for-byte reproducible") {
  TempDir tmp;
  write(tmp / "s.ini", kSmall);
  std::ostringstream out, err;
  Options a, b;
  a.out = tmp / "a";
  b.out = tmp / "b";
  REQUIRE(cmd_run(tmp / "s.ini", a, out, err) == kSuccess);
  REQUIRE(cmd_run(tmp / "s.ini", b, out, err) == kSuccess);
  for (const char* name : {"trajectory.csv", "summary.json", "plot.gp"})
    CHECK(slurp(tmp.path() / "a" / name) == slurp(tmp.path() / "b" / name));
}

TEST_CASE("output directory falls back to the environment") {
  TempDir tmp;
  write(tmp / "s.ini", kSmall);
  ::setenv(kOutDirEnv, (tmp / "env").c_str(), 1);
  CHECK(output_directory({}) == tmp / "env");
  Options explicit_out;
  explicit_out.out = "elsewhere";
  CHECK(output_directory(explicit_out) == "elsewhere");
  std::ostringstream out, err;
  Options quiet;
  quiet.quiet = true;
  CHECK(cmd_run(tmp / "s.ini", quiet, out, err) == kSuccess);
  CHECK(out.str().empty());
  ::unsetenv(kOutDirEnv);
  CHECK(fs::exists(tmp.path() / "env" / "trajectory.csv"));
  CHECK(output_directory({}) == "out");
}

TEST_CASE("verify flags a step far beyond stability") {
  TempDir tmp;
  write(tmp / "s.ini", kSmall);
  Options opts;
  opts.scheme = "direct";
  opts.dt = 10.0;
  opts.t_end = 100.0;
  opts.sample_every = 1;
  std::ostringstream out, err;
  CHECK(cmd_verify(tmp / "s.ini", opts, out, err) == kInvariantFailure);
  CHECK(out.str().find("FAIL corridor") != std::string::npos);
}

TEST_CASE("verify output lists every invariant") {
  TempDir tmp;
  write(tmp / "s.ini", kSmall);
  std::ostringstream out, err;
  cmd_verify(tmp / "s.ini", {}, out, err);
  for (const char* name : {"corridor", "lyapunov_monotone", "dissipation_nonnegative",
                           "residual_decay", "rho_limit", "support_conserved", "concentration"})
    CHECK(out.str().find(name) != std::string::npos);
}

TEST_CASE("sweep") {
  TempDir tmp;
  write(tmp / "tp.ini", kTwoPeakCoarse);
  std::ostringstream out, err;
  Options opts;
  opts.out = tmp / "sweep";

  CHECK(cmd_sweep(tmp / "tp.ini", "dt", {0.1}, opts, out, err) == kInputError);
  CHECK(cmd_sweep(tmp / "tp.ini", "c0", {1, 2}, opts, out, err) == kInputError);
  CHECK(cmd_sweep(tmp / "tp.ini", "n_cells", {10.5, 20}, opts, out, err) == kInputError);

  out.str("");
  REQUIRE(cmd_sweep(tmp / "tp.ini", "dt", {0.1, 0.05, 0.025}, opts, out, err) == kSuccess);
  const auto rows = read_csv(tmp.path() / "sweep" / "sweep.csv");
  REQUIRE(rows.size() == 3);
  const double order = rows[0][4];
  CHECK(order == doctest::Approx(4.0).epsilon(0.125));
  CHECK(out.str().find("fitted_order") != std::string::npos);

  REQUIRE(cmd_sweep(tmp / "tp.ini", "n_cells", {50, 100, 200}, opts, out, err) == kSuccess);
  const auto grid_rows = read_csv(tmp.path() / "sweep" / "sweep.csv");
  REQUIRE(grid_rows.size() == 3);
  CHECK(std::abs(grid_rows[1][1] - grid_rows[2][1]) < std::abs(grid_rows[0][1] - grid_rows[1][1]));
}

TEST_CASE("fitted_order on synthetic data") {
  std::vector<SweepPoint> pts;
  std::vector<double> hs = {0.4, 0.2, 0.1, 0.05};
  for (double h : hs) pts.push_back({h, 1.0 + 3.0 * std::pow(h, 2), 3.0 * std::pow(h, 2), "ok"});
  CHECK(fitted_order(pts, hs) == doctest::Approx(2.0).epsilon(1e-12));
  pts.resize(2);
  hs.resize(2);
  CHECK(fitted_order(pts, hs) == doctest::Approx(2.0).epsilon(1e-12));
  pts[1].status = "failed";
  CHECK(std::isnan(fitted_order(pts, hs)));
}

TEST_CASE("binary exit codes") {
  TempDir tmp;
  write(tmp / "s.ini", kSmall);
  CHECK(run_binary("predict " + scenario_path("gaussian_ratio")) == 0);
  CHECK(run_binary("run " + (tmp / "s.ini") + " --out " + (tmp / "o")) == 0);
  CHECK(run_binary("predict " + (tmp / "nope.ini")) == 2);
  CHECK(run_binary("frobnicate") == 2);
  CHECK(run_binary("run " + (tmp / "s.ini") + " --scheme implicit") == 2);
  CHECK(run_binary("verify " + (tmp / "s.ini") + " --scheme direct --dt 10 --t-end 100 --sample-every 1") == 1);
  CHECK(run_binary("sweep " + (tmp / "s.ini") + " dt 0.1 --out " + (tmp / "o")) == 2);
}

TEST_CASE("gaussian scenario matches the golden fine-step reference") {
  TempDir tmp;
  Options opts;
  opts.out = tmp / "g";
  opts.t_end = 20.0;
  opts.sample_every = 1000;
  opts.quiet = true;
  std::ostringstream out, err;
  REQUIRE(cmd_run(scenario_path("gaussian_ratio"), opts, out, err) == kSuccess);
  const auto got = read_csv(tmp.path() / "g" / "trajectory.csv");
  const auto ref = read_csv(std::string(SELECTION_GOLDEN_DIR) + "/gaussian_ratio_reference.csv");
  REQUIRE(got.size() == ref.size());
  for (std::size_t k = 0; k < ref.size(); ++k) {
    CHECK(got[k][0] == doctest::Approx(ref[k][0]));
    CHECK(std::abs(got[k][1] - ref[k][1]) < 1e-8);  // rho
    CHECK(std::abs(got[k][2] - ref[k][2]) < 1e-8);  // V
    CHECK(std::abs(got[k][4] - ref[k][4]) < 1e-8);  // W
  }
}

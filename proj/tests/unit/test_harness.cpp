#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "chasm/errors.hpp"
#include "chasm/harness.hpp"

using namespace chasm;
namespace fs = std::filesystem;

namespace {

RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in, "test.cfg");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "chasm_harness_test";
  fs::create_directories(dir);
  return dir / name;
}

const char* kFree = "problem = free_advection\nnx = 41\nnk = 41\ntau = 0.1\nt_final = 1\n";

// harmonic with a time step far beyond the explicit stability limit of the Theta substep
const char* kUnstable = "problem = harmonic\nscheme = os\nnx = 25\nnk = 64\ntau = 0.5\nt_final = 20\n";

int run_cli(const std::string& args) {
  const std::string cmd = std::string(CHASM_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config parsing") {
  const RunConfig c = parse("# comment line\nscheme = lapc2  # trailing\nproblem = harmonic\ndx = 0.2\nworkers = 3\n");
  CHECK(c.problem.kind == ProblemKind::Harmonic2D);
  CHECK(c.scheme == Scheme::LAPC2);
  CHECK(c.workers == 3);
  const PhaseGrid g = build_grid(c);
  CHECK(g.x_axes[0].n_points() == 121);
  CHECK(g.k_axes[0].is_periodic());

  const RunConfig h = parse("problem = hydrogen\n");
  CHECK(build_grid(h).dim() == 3);
}

TEST_CASE("config errors name the problem") {
  try {
    parse("problem = free_advection\ncolour = blue\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("test.cfg") != std::string::npos);
    CHECK(msg.find("colour") != std::string::npos);
  }
  CHECK_THROWS_AS(parse("scheme = rk4\n"), ConfigError);
  CHECK_THROWS_AS(parse("nx = -3\n"), ConfigError);
  CHECK_THROWS_AS(validate(parse("problem = harmonic\ndx = 0.7\n")), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/run.cfg"), ConfigError);

  CHECK_THROWS_AS(validate(parse("closure = serial\npatches = 4\n")), ConfigError);
  CHECK_THROWS_AS(validate(parse("theta = gradient\n")), ConfigError);
  CHECK_THROWS_AS(validate(parse("problem = harmonic\ntau = 0.3\nt_final = 1\n")), ConfigError);
  CHECK_THROWS_AS(validate(parse("closure = pmbc\npatches = 7\n")), ConfigError);
  CHECK_NOTHROW(validate(parse(kFree)));
}

TEST_CASE("free advection run and CSV layout") {
  RunConfig c = parse(kFree);
  c.output_path = scratch("free.csv").string();
  const RunResult r = run_experiment(c);
  CHECK(r.steps == 10);
  CHECK(r.series.size() == 11);
  CHECK(r.series.eps_inf.front() == 0.0);
  CHECK(r.series.eps_inf.back() < 1e-2);
  CHECK(r.theta_evals == 20);

  const std::string csv = slurp(c.output_path);
  CHECK(csv == format_csv(r.series));
  CHECK(csv.rfind("t,eps_inf,eps_2,eps_mass,min_marginal\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 12);
}

TEST_CASE("worker count leaves the CSV byte-identical") {
  RunConfig a = parse(std::string(kFree) + "closure = pmbc\npatches = 4\nnnb = 8\n");
  RunConfig b = a;
  b.workers = 4;
  a.output_path = scratch("w1.csv").string();
  b.output_path = scratch("w4.csv").string();
  run_experiment(a);
  run_experiment(b);
  CHECK(slurp(a.output_path) == slurp(b.output_path));
}

TEST_CASE("instability aborts after writing the rows so far") {
  RunConfig c = parse(kUnstable);
  c.output_path = scratch("unstable.csv").string();
  try {
    run_experiment(c);
    FAIL("expected InstabilityError");
  } catch (const InstabilityError& e) {
    CHECK(e.step() >= 1);
    CHECK(e.step() < 40);
    CHECK(e.time() == doctest::Approx(0.5 * static_cast<double>(e.step())));
  }
  CHECK(slurp(c.output_path).rfind("t,eps_inf", 0) == 0);
}

TEST_CASE("heavy runs need an explicit opt-in") {
  RunConfig c = parse("problem = harmonic\ndx = 0.05\nnk = 512\ntau = 0.00001\nt_final = 20\n");
  CHECK(estimated_cost(c) > 2e10);
  try {
    run_experiment(c);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("allow_heavy") != std::string::npos);
  }
}

TEST_CASE("spline junction runs") {
  RunConfig serial = parse("problem = sine\nclosure = serial\npatches = 1\n");
  CHECK(run_experiment(serial).series.eps_inf.back() == 0.0);
  RunConfig wide = parse("problem = sine\nclosure = pmbc\npatches = 4\nnnb = 26\n");
  const double wide_err = run_experiment(wide).series.eps_inf.back();
  CHECK(wide_err > 0.0);
  CHECK(wide_err < 1e-13);

  std::vector<RunConfig> sweep;
  for (const char* n : {"8", "12", "16"}) {
    RunConfig c = parse("problem = sine\nclosure = pmbc\npatches = 4\n");
    apply_setting(c, "nnb", n);
    sweep.push_back(c);
  }
  const auto rows = convergence_table(sweep, "nnb");
  CHECK(rows.size() == 3);
  CHECK(rows[2].eps_inf < rows[0].eps_inf);
  CHECK_THROWS_AS(convergence_table(sweep, "colour"), ConfigError);
}

TEST_CASE("command-line exit codes") {
  const fs::path good = scratch("good.cfg"), bad = scratch("bad.cfg"), unstable = scratch("unstable.cfg");
  std::ofstream(good) << kFree;
  std::ofstream(bad) << "problem = free_advection\ncolour = blue\n";
  std::ofstream(unstable) << kUnstable;
  CHECK(run_cli("run --config " + good.string()) == 0);
  CHECK(run_cli("run --config " + good.string() + " --scheme lapc3 --out " + scratch("cli.csv").string()) == 0);
  CHECK(fs::exists(scratch("cli.csv")));
  CHECK(run_cli("run --config " + bad.string()) == 1);
  CHECK(run_cli("run --config " + good.string() + " --scheme rk4") == 1);
  CHECK(run_cli("run --config " + unstable.string()) == 2);
  CHECK(run_cli("sweep --config " + good.string() + " --vary nx --values 41,81") == 1);
  CHECK(run_cli("sweep --config " + good.string() + " --vary dx --values 0.6,0.3") == 0);
}

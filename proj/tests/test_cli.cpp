#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <sys/wait.h>

#include "gpe/commands.hpp"
#include "gpe/config.hpp"
#include "gpe/errors.hpp"
#include "gpe/grid_io.hpp"
#include "gpe/init.hpp"

using namespace gpe;
namespace fs = std::filesystem;

namespace {

const char* kCaseOne = R"(# 1D harmonic trap
domain.dim = 1
domain.lower = -16
domain.upper = 16
grid.n = 128
problem.flavor = sp
problem.beta = 400
init.kind = tf
solver.eps0 = 1e-10
)";

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("gpe_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path operator/(const std::string& s) const { return path / s; }
};

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::map<std::string, std::string> keyvals(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    const auto eq = line.find(" = ");
    if (eq != std::string::npos) out[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return out;
}

int count_lines(const std::string& text) {
  return static_cast<int>(std::count(text.begin(), text.end(), '\n'));
}

int run(const std::string& args) {
  const std::string cmd = std::string(GPE_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string config_error(const std::string& text) {
  try {
    RunConfig::parse(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("config parsing") {
  const RunConfig c = RunConfig::parse(kCaseOne);
  CHECK(c.dim == 1);
  CHECK(c.n[0] == 128);
  CHECK(c.beta == 400.0);
  CHECK(c.flavor == Flavor::SP);
  CHECK(c.init == InitKind::ThomasFermi);
  CHECK(c.params.grad.eps0 == 1e-10);
  CHECK(c.boundary() == Boundary::Dirichlet);
  CHECK(c.field_kind() == FieldKind::Real);

  // defaults
  CHECK(c.params.grad.max_iter == 2000);
  CHECK(c.params.delta_stop == 1e-8);
  CHECK(c.params.k_init == 100);
  CHECK(c.params.k_sub == 200);
  CHECK(c.method == Method::Gradient);

  // broadcast and per-axis lists
  const RunConfig d = RunConfig::parse(
      "domain.dim = 2\ndomain.lower = -10\ndomain.upper = 10 12\ngrid.n = 64\n"
      "problem.flavor = fp\nproblem.omega = 0.5\nproblem.beta = 500\n"
      "solver.method = cascadic\nsolver.levels = 3\n");
  CHECK(d.upper[0] == 10.0);
  CHECK(d.upper[1] == 12.0);
  CHECK(d.lower[1] == -10.0);
  CHECK(d.n[1] == 64);
  CHECK(d.boundary() == Boundary::Periodic);
  CHECK(d.field_kind() == FieldKind::Complex);
  CHECK(d.grid(2).intervals(0) == 16);

  // echo round trip
  const RunConfig again = RunConfig::parse(d.echo());
  CHECK(again.echo() == d.echo());
  CHECK(RunConfig::parse(c.echo()).echo() == c.echo());
}

TEST_CASE("config errors name the key") {
  CHECK(config_error("grid.m = 3\n").find("grid.m") != std::string::npos);
  CHECK(config_error("problem.beta = abc\n").find("problem.beta") != std::string::npos);
  CHECK(config_error("problem.beta = 1\nproblem.beta = 2\n").find("problem.beta") != std::string::npos);
  CHECK(config_error("problem.flavor = xx\n").find("problem.flavor") != std::string::npos);
  CHECK(config_error("init.kind = q\n").find("init.kind") != std::string::npos);
  CHECK(config_error("solver.levels = 0\n").find("levels") != std::string::npos);
  CHECK_THROWS_AS(run_solve<double>(RunConfig::parse("solver.levels = 2\n")), ConfigError);
  CHECK(config_error("solver.method = cascadic\nsolver.levels = 3\ngrid.n = 30\n").find("grid.n") !=
        std::string::npos);
  CHECK(config_error("domain.dim = 2\ndomain.lower = 1 2 3\n").find("domain.lower") !=
        std::string::npos);
  CHECK(config_error("problem.beta\n") != "");
  CHECK_NOTHROW(RunConfig::parse("# only a comment\n\n   \n"));
  CHECK_THROWS_AS(RunConfig::load("/nonexistent/run.cfg"), IoError);
}

TEST_CASE("grid data round trip") {
  TempDir tmp;
  const RunConfig cfg = RunConfig::parse(kCaseOne);
  const SolveOutput<double> out = run_solve<double>(cfg);
  const Eigen::VectorXd phi = grid_function(out);
  write_grid_data((tmp / "s.gpe").string(), out.grid, phi);

  const GridData gd = read_grid_data((tmp / "s.gpe").string());
  CHECK(gd.grid() == out.grid);
  CHECK(gd.field == FieldKind::Real);
  CHECK((gd.values.real() - phi).norm() == 0.0);

  const DiscreteProblem p = cfg.problem(out.grid);
  const Eigen::VectorXd x = read_state<double>((tmp / "s.gpe").string(), p);
  CHECK(std::abs(energy(p, x) - out.report.energy) <= 1e-13);
  CHECK((initial_state<double>(InitKind::FromFile, p, (tmp / "s.gpe").string()) - x).norm() == 0.0);

  // header layout: magic, dim, bc, field, N, a, b, then N-1 doubles
  const std::string bytes = slurp(tmp / "s.gpe");
  CHECK(bytes.substr(0, 8) == "GPEGRID1");
  CHECK(bytes.size() == 8 + 3 * 4 + 8 * 3 + 8 * 127);

  // complex round trip
  Eigen::VectorXcd z = phi.cast<std::complex<double>>() * std::polar(1.0, 0.4);
  write_grid_data((tmp / "z.gpe").string(), out.grid, z);
  const GridData gz = read_grid_data((tmp / "z.gpe").string());
  CHECK(gz.field == FieldKind::Complex);
  CHECK((gz.values - z).norm() == 0.0);
  CHECK_THROWS_AS(read_state<double>((tmp / "z.gpe").string(), p), ConfigError);

  // mismatched grid, truncated and foreign files
  RunConfig other = cfg;
  other.n = {64, 64, 64};
  CHECK_THROWS_AS(read_state<double>((tmp / "s.gpe").string(), other.problem(other.grid())),
                  ConfigError);
  write(tmp / "short.gpe", bytes.substr(0, 60));
  CHECK_THROWS_AS(read_grid_data((tmp / "short.gpe").string()), IoError);
  write(tmp / "junk.gpe", "not a grid file at all");
  CHECK_THROWS_AS(read_grid_data((tmp / "junk.gpe").string()), IoError);
  write(tmp / "long.gpe", bytes + "x");
  CHECK_THROWS_AS(read_grid_data((tmp / "long.gpe").string()), IoError);
  CHECK_THROWS_AS(read_grid_data((tmp / "missing.gpe").string()), IoError);
}

TEST_CASE("solve via the command line") {
  TempDir tmp;
  write(tmp / "run.cfg", kCaseOne);
  const std::string cfg = (tmp / "run.cfg").string();

  REQUIRE(run("solve --config " + cfg + " --out " + (tmp / "a").string() + " --trace") == 0);
  const auto rep = keyvals(slurp(tmp / "a" / "report.txt"));
  CHECK(std::abs(std::stod(rep.at("energy")) - 21.3601) < 1e-3);
  CHECK(std::abs(std::stod(rep.at("chemical_potential")) - 35.5775) < 1e-3);
  CHECK(std::abs(std::stod(rep.at("x_rms")) - 3.7751) < 1e-3);
  CHECK(rep.at("converged") == "true");
  CHECK(rep.at("config.problem.beta") == "400");
  CHECK(rep.count("wall_seconds") == 0);
  CHECK(keyvals(slurp(tmp / "a" / "timing.txt")).count("wall_seconds") == 1);

  const std::string trace = slurp(tmp / "a" / "trace.csv");
  CHECK(trace.rfind("level,k,energy,residual,step,accepted\n", 0) == 0);
  CHECK(count_lines(trace) == std::stoi(rep.at("iterations")) + 1);

  // effective.cfg reproduces the run
  REQUIRE(run("solve --config " + (tmp / "a" / "effective.cfg").string() + " --out " +
              (tmp / "b").string()) == 0);
  CHECK(slurp(tmp / "a" / "report.txt") == slurp(tmp / "b" / "report.txt"));
  CHECK(slurp(tmp / "a" / "state.gpe") == slurp(tmp / "b" / "state.gpe"));

  // a different probe seed shows up in the report
  REQUIRE(run("solve --config " + cfg + " --seed 7 --out " + (tmp / "c").string()) == 0);
  CHECK(keyvals(slurp(tmp / "c" / "report.txt")).at("probe.seed") == "7");

  // restart from the written state
  write(tmp / "restart.cfg", std::string(kCaseOne).replace(std::string(kCaseOne).find("init.kind = tf"),
                                                          14, "init.kind = file\ninit.file = " +
                                                                  (tmp / "a" / "state.gpe").string()));
  REQUIRE(run("solve --config " + (tmp / "restart.cfg").string() + " --out " + (tmp / "d").string()) == 0);
  const auto rd = keyvals(slurp(tmp / "d" / "report.txt"));
  CHECK(std::abs(std::stod(rd.at("energy")) - std::stod(rep.at("energy"))) < 1e-10);
  CHECK(std::stoi(rd.at("iterations")) < std::stoi(rep.at("iterations")));
}

TEST_CASE("exit codes") {
  TempDir tmp;
  write(tmp / "bad.cfg", "problem.flavor = qq\n");
  CHECK(run("solve --config " + (tmp / "bad.cfg").string() + " --out " + tmp.path.string()) == 2);
  write(tmp / "sp_rot.cfg", "domain.dim = 2\ngrid.n = 16\nproblem.omega = 0.5\nproblem.beta = 1\n");
  CHECK(run("solve --config " + (tmp / "sp_rot.cfg").string() + " --out " + tmp.path.string()) == 2);
  CHECK(run("solve --out " + tmp.path.string()) == 2);
  CHECK(run("frobnicate --config x") == 2);
  CHECK(run("solve --config " + (tmp / "missing.cfg").string()) == 4);

  write(tmp / "run.cfg", kCaseOne);
  write(tmp / "blocker", "");
  CHECK(run("solve --config " + (tmp / "run.cfg").string() + " --out " + (tmp / "blocker" / "sub").string()) == 4);

  write(tmp / "short.cfg", std::string(kCaseOne) + "solver.max_iter = 3\n");
  CHECK(run("solve --config " + (tmp / "short.cfg").string() + " --out " + (tmp / "s").string()) == 3);
  CHECK(keyvals(slurp(tmp / "s" / "report.txt")).at("converged") == "false");

  write(tmp / "nofile.cfg", std::string(kCaseOne).replace(std::string(kCaseOne).find("init.kind = tf"), 14,
                                                         "init.kind = file\ninit.file = /nonexistent.gpe"));
  CHECK(run("solve --config " + (tmp / "nofile.cfg").string() + " --out " + tmp.path.string()) == 4);
}

TEST_CASE("compare-init") {
  TempDir tmp;
  RunConfig cfg = RunConfig::parse(std::string(kCaseOne) + "compare.kinds = a\n");
  auto rows = compare_init(cfg, 1);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].lowest);
  CHECK(rows[0].kind == InitKind::GaussianA);

  cfg = RunConfig::parse(std::string(kCaseOne) + "compare.kinds = tf a x\n");
  rows = compare_init(cfg, 2);
  REQUIRE(rows.size() == 3);
  CHECK(std::count_if(rows.begin(), rows.end(), [](auto& r) { return r.lowest; }) == 1);
  CHECK_FALSE(rows[2].lowest);  // odd seed converges to the first excited state
  CHECK(rows[2].energy > rows[0].energy + 0.5);
  const auto serial = compare_init(cfg, 1);
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(rows[i].energy == serial[i].energy);

  write(tmp / "cmp.cfg", std::string(kCaseOne) + "compare.kinds = tf a\n");
  REQUIRE(run("compare-init --threads 2 --config " + (tmp / "cmp.cfg").string() + " --out " +
              tmp.path.string()) == 0);
  const std::string csv = slurp(tmp / "compare.csv");
  CHECK(csv.rfind("kind,energy,chemical_potential,iterations,converged,lowest\n", 0) == 0);
  CHECK(count_lines(csv) == 3);
}

TEST_CASE("convergence study") {
  TempDir tmp;
  SUBCASE("identical mesh gives a zero row") {
    RunConfig cfg = RunConfig::parse(std::string(kCaseOne) + "study.n = 32 64\nstudy.reference_n = 64\n");
    const StudyTable t = convergence_study(cfg, 2);
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[1].n == 64);
    CHECK(t.rows[1].max_error < 1e-12);
    CHECK(t.rows[1].energy_error < 1e-12);
    CHECK(t.rows[0].energy_error > t.rows[1].energy_error);
  }
  SUBCASE("fd orders") {
    RunConfig cfg = RunConfig::parse(std::string(kCaseOne) +
                                     "study.n = 32 64 128\nstudy.reference_n = 512\n");
    cfg.flavor = Flavor::FD;
    const StudyTable t = convergence_study(cfg, 1);
    REQUIRE(t.rows.size() == 3);
    for (std::size_t i = 1; i < t.rows.size(); ++i) {
      const double order = observed_order(t.rows[i - 1].energy_error, t.rows[i].energy_error,
                                          t.rows[i - 1].h, t.rows[i].h);
      CHECK(order > 1.5);
      CHECK(order < 2.6);
    }
  }
  SUBCASE("meshes must nest") {
    RunConfig cfg = RunConfig::parse(std::string(kCaseOne) + "study.n = 48\nstudy.reference_n = 128\n");
    CHECK_THROWS_AS(convergence_study(cfg, 1), ConfigError);
    cfg = RunConfig::parse(std::string(kCaseOne) + "study.n = 64 32\nstudy.reference_n = 128\n");
    CHECK_THROWS_AS(convergence_study(cfg, 1), ConfigError);
    cfg = RunConfig::parse(std::string(kCaseOne) + "study.n = 256\nstudy.reference_n = 128\n");
    CHECK_THROWS_AS(convergence_study(cfg, 1), ConfigError);
  }
  SUBCASE("command output") {
    write(tmp / "st.cfg", std::string(kCaseOne) + "study.n = 32 64\nstudy.reference_n = 128\n");
    REQUIRE(run("convergence-study --config " + (tmp / "st.cfg").string() + " --out " +
                tmp.path.string()) == 0);
    const std::string csv = slurp(tmp / "study.csv");
    CHECK(csv.rfind("n,h,max_error,energy_error,mu_error,order_max,order_energy,order_mu,converged\n", 0) == 0);
    CHECK(count_lines(csv) == 3);
    CHECK(keyvals(slurp(tmp / "reference.txt")).count("energy") == 1);
  }
  CHECK(observed_order(4.0, 1.0, 1.0, 0.5) == doctest::Approx(2.0));
  CHECK(std::isnan(observed_order(0.0, 1.0, 1.0, 0.5)));
}

TEST_CASE("refine runs the cascadic ladder") {
  TempDir tmp;
  write(tmp / "r.cfg", std::string(kCaseOne) + "solver.levels = 3\n");
  // levels > 1 needs cascadic in solve ...
  CHECK(run("solve --config " + (tmp / "r.cfg").string() + " --out " + tmp.path.string()) == 2);
  // ... and refine forces it
  REQUIRE(run("refine --config " + (tmp / "r.cfg").string() + " --out " + tmp.path.string()) == 0);
  const auto rep = keyvals(slurp(tmp / "report.txt"));
  CHECK(rep.count("level.2.energy") == 1);
  CHECK(rep.at("level.0.n") == "32");
  CHECK(std::abs(std::stod(rep.at("energy")) - 21.3601) < 1e-3);
}

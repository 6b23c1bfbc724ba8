#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sqg/experiments.hpp"
#include "sqg/quadrature.hpp"

using namespace sqg;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("sqg_exp_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cli(const std::string& args) {
  const std::string cmd = std::string(SQGX_PATH) + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::ConfigError;
}

}  // namespace

TEST_CASE("config parsing") {
  const auto c = Config::parse_string("# comment\nalpha = 0.5\nN_values = [8, 16, 32]\nbase = smooth\n");
  CHECK(c.get_double("alpha", 0) == 0.5);
  CHECK(c.get_ints("N_values", {}) == std::vector<int>{8, 16, 32});
  CHECK(c.get_string("base", "") == "smooth");
  CHECK(c.get_double("missing", 7.0) == 7.0);
  CHECK(kind_of([] { Config::parse_string("alpha = 1\nalpha = 2\n"); }) == ErrorKind::ConfigError);
  CHECK(kind_of([] { Config::parse_string("just words\n"); }) == ErrorKind::ConfigError);
  CHECK(kind_of([] { Config::parse_string("x = abc\n").get_double("x", 0); }) == ErrorKind::ConfigError);
  CHECK(kind_of([] { Config::parse_string("x = [1, 2\n").get_doubles("x", {}); }) == ErrorKind::ConfigError);
  CHECK(kind_of([] { Config::parse_string("x = 1.5\n").get_int("x", 0); }) == ErrorKind::ConfigError);
  CHECK(kind_of([] { Config::parse_file("/nonexistent/sqg.cfg"); }) == ErrorKind::ConfigError);
}

TEST_CASE("overrides and hashing") {
  auto a = Config::parse_string("alpha = 0.5\nbeta = 1.2\n");
  auto b = Config::parse_string("beta = 1.2\nalpha = 0.5\n");
  CHECK(a.hash() == b.hash());
  CHECK(a.hash().size() == 64);
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  b.apply_override("alpha=0.6");
  CHECK(b.get_double("alpha", 0) == 0.6);
  CHECK(a.hash() != b.hash());
  a.set("out", "/somewhere/else");
  CHECK(a.hash() == Config::parse_string("alpha = 0.5\nbeta = 1.2\n").hash());
  CHECK(kind_of([&] { b.apply_override("novalue"); }) == ErrorKind::ConfigError);
  CHECK(format_number(0.1) == "0.1");
  CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("config resolution rejects bad input") {
  auto resolve = [](ExperimentKind k, const std::string& text) { resolve_config(k, Config::parse_string(text)); };
  CHECK(kind_of([&] { resolve(ExperimentKind::constants, "bogus = 1\n"); }) == ErrorKind::ConfigError);
  CHECK(kind_of([&] { resolve(ExperimentKind::constants, "experiment = radial_decay\n"); }) == ErrorKind::ConfigError);
  CHECK(kind_of([&] { resolve(ExperimentKind::constants, "alphas = []\n"); }) == ErrorKind::ConfigError);
  CHECK(kind_of([&] { resolve(ExperimentKind::constants, "alphas = 1.5\n"); }) == ErrorKind::ConfigError);
  CHECK(kind_of([&] { resolve(ExperimentKind::approx_rates, "N_values = 8, 16, 32\n"); }) == ErrorKind::ConfigError);
  CHECK(kind_of([&] { resolve(ExperimentKind::pseudo_error, "beta = 1.8\n"); }) == ErrorKind::ConfigError);
  CHECK(kind_of([&] { resolve(ExperimentKind::pseudo_error, "grid.n = 1023\n"); }) == ErrorKind::ConfigError);
  CHECK(kind_of([&] { resolve(ExperimentKind::pseudo_error, "N_values = 16, 8\n"); }) == ErrorKind::ConfigError);
  CHECK(kind_of([&] { resolve(ExperimentKind::compose_translates, "J = 3\n"); }) == ErrorKind::ConfigError);
  const auto c = resolve_config(ExperimentKind::pseudo_error, Config::parse_string("alpha = 0.5\n"));
  CHECK(c.resolved.get_string("experiment", "") == "pseudo_error");
  CHECK(c.resolved.has("grid.n"));
  CHECK(c.hash == c.resolved.hash());
  const auto d = resolve_config(ExperimentKind::pseudo_error, Config());
  CHECK(c.hash == d.hash);
}

TEST_CASE("report CSV and SVG carry the config hash") {
  const auto dir = scratch("report");
  ExperimentReport r;
  r.experiment = "demo";
  r.config_hash = "abc123";
  r.version = library_version();
  r.metadata = {{"alpha", "0.5"}};
  Table t{"values", {"x", "y", "label"}, {}};
  t.add_row({1.0, 2.5, std::string("a")});
  t.add_row({2.0, 1.0 / 3.0, std::string("b")});
  r.tables.push_back(t);
  r.tables.push_back(Table{"empty", {"x"}, {}});
  r.plots.push_back(Plot{"curve", "values", "x", {"y"}, "", false, false, "demo"});
  r.summary = {{"slope", -1.5}};
  const auto files = emit_report(r, dir.string());
  CHECK(files.size() == 4);
  const auto parsed = read_report_csv((dir / "demo_values.csv").string());
  CHECK(parsed.metadata.at("config_hash") == "abc123");
  CHECK(parsed.metadata.at("param.alpha") == "0.5");
  REQUIRE(parsed.table.rows.size() == 2);
  CHECK(parsed.table.number(1, "y") == 1.0 / 3.0);
  CHECK(parsed.table.rows[0][2] == "a");
  const auto empty = read_report_csv((dir / "demo_empty.csv").string());
  CHECK(empty.table.columns == std::vector<std::string>{"x"});
  CHECK(empty.table.rows.empty());
  CHECK(slurp(dir / "demo_curve.svg").find("config_hash=abc123") != std::string::npos);
  CHECK(r.summary_value("slope") == -1.5);
  fs::remove_all(dir);
}

TEST_CASE("constants experiment reproduces reference values") {
  const auto c = resolve_config(ExperimentKind::constants, Config::parse_string("alphas = 0.25, 0.5\n"));
  const auto r = run_experiment(c);
  const auto& t = r.table("values");
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const double ref = t.number(i, "reference");
    if (std::isfinite(ref)) CHECK(t.number(i, "abs_diff") < 1e-5);
  }
  CHECK(r.summary_value("dirichlet_C0") == doctest::Approx(dirichlet_C0()));
  CHECK(r.summary_value("K_alpha_0.5") == doctest::Approx(K_alpha(0.5)));
}

TEST_CASE("radial decay on a small grid") {
  const auto c = resolve_config(ExperimentKind::radial_decay,
                                Config::parse_string("grid.n = 512\ngrid.L = 32\nalphas = 0.5\ntimes = 0, 0.5\n"));
  const auto r = run_experiment(c);
  const auto& fits = r.table("fits");
  REQUIRE(fits.rows.size() == 1);
  const double slope = fits.number(0, "slope");
  CHECK(slope < fits.number(0, "bound"));
  CHECK(r.summary_value("exponent_alpha0.5") == slope);
}

TEST_CASE("a single summand composes with no defect") {
  const auto c = resolve_config(
      ExperimentKind::compose_translates,
      Config::parse_string("J = 1\nN = 8\ngrid.n = 512\ngrid.L = 1.5\nt_end = 0.02\nseparations = 0.5\nsamples = 3\n"));
  const auto r = run_experiment(c);
  CHECK(r.summary_value("defect_R0.5") < 1e-12);
}

TEST_CASE("resolved config reproduces the run") {
  const auto dir = scratch("rerun");
  const auto c = resolve_config(ExperimentKind::constants, Config::parse_string("alphas = 0.3\n"));
  const auto r1 = run_experiment(c);
  const auto path = write_resolved_config(c, dir.string());
  const auto text = slurp(path);
  CHECK(text.find("# config_hash=" + c.hash) != std::string::npos);
  const auto c2 = resolve_config(ExperimentKind::constants, Config::parse_file(path));
  CHECK(c2.hash == c.hash);
  const auto r2 = run_experiment(c2);
  CHECK(r1.table("values").rows == r2.table("values").rows);
  fs::remove_all(dir);
}

TEST_CASE("command line exit codes") {
  const auto dir = scratch("cli");
  CHECK(cli("constants --quiet --no-svg --out " + (dir / "ok").string()) == 0);
  CHECK(fs::exists(dir / "ok" / "constants_values.csv"));
  CHECK(fs::exists(dir / "ok" / "constants.config"));
  {
    std::ofstream(dir / "bad.cfg") << "alpha = 0.5\nalpha = 0.6\n";
  }
  CHECK(cli("constants --quiet --config " + (dir / "bad.cfg").string()) == 2);
  CHECK(cli("constants --quiet --override alphas=2 --out " + dir.string()) == 2);
  CHECK(cli("constants --quiet --override nonsense=1 --out " + dir.string()) == 2);
  CHECK(cli("nosuchcommand") == 2);
  CHECK(cli("") == 2);
  // N = 64 cannot be resolved on a 64-point grid
  CHECK(cli("pseudo_error --quiet --no-svg --grid-n 64 --override N_values=64 --out " + dir.string()) == 3);
  CHECK(cli("constants --quiet --config " + (dir / "ok" / "constants.config").string() + " --out " +
            (dir / "again").string()) == 0);
  const auto first = read_report_csv((dir / "ok" / "constants_values.csv").string());
  const auto second = read_report_csv((dir / "again" / "constants_values.csv").string());
  CHECK(first.metadata.at("config_hash") == second.metadata.at("config_hash"));
  CHECK(first.table.rows == second.table.rows);
  fs::remove_all(dir);
}

// Configuration parsing and experiment orchestration.

#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bhsim/config.hpp"
#include "bhsim/runner.hpp"

using namespace bhsim::cli;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("bhsim_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// drop the wall-time line, the only legitimately run-dependent output
std::string without_wall_time(const std::string& text) {
  std::istringstream in(text);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line))
    if (line.rfind("wall_time_ms", 0) != 0) out << line << "\n";
  return out.str();
}

const char* walk_config = R"(
experiment = walk   # declared kind, must match the subcommand

[run]
experiment = walk

[lattice]
n = 10
profile = tanh
beta_mhz = 4.39
eta_d = 0.35
j_h = 3

[initial]
kind = bitstring
bitstring = 1000000000

[time]
t_max_ns = 100
n_samples = 11

[output]
dir = unused
)";

}  // namespace

TEST_CASE("config parser: sections, comments, types, lists") {
  const auto cfg = Config::parse("top = 1\n[a]\nx = 2.5 ; trailing\nflag = true\nlist = 1, 2.5 ,3\n[b]\ns = hello\n");
  CHECK(cfg.get_double("", "top") == 1.0);
  CHECK(cfg.get_double("a", "x") == 2.5);
  CHECK(cfg.get_bool_or("a", "flag", false) == true);
  CHECK(cfg.get_string("b", "s") == "hello");
  const auto list = cfg.get_double_list("a", "list");
  REQUIRE(list.size() == 3);
  CHECK(list[1] == 2.5);
  CHECK(cfg.has_section("a"));
  CHECK(!cfg.has_section("c"));
  CHECK(cfg.get_int_or("b", "missing", 7) == 7);
}

TEST_CASE("config parser: line-level diagnostics") {
  try {
    Config::parse("[a]\nx = 1\nbroken line\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.line_number == 3);
  }
  try {
    Config::parse("[a]\nx = 1\nx = 2\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.line_number == 3);
  }
  try {
    Config::parse("[a]\nx = abc\n").get_double("a", "x");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.line_number == 2);
  }
  CHECK_THROWS_AS(Config::parse("[unterminated\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse("[]\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse("x\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse("").get_string("a", "b"), ConfigError);
}

TEST_CASE("experiment names round-trip") {
  for (const char* name : {"walk", "radiation", "entangle", "continuum", "device", "sweep"})
    CHECK(experiment_name(experiment_from_name(name)) == std::string(name));
  CHECK_THROWS_AS(experiment_from_name("warp"), ConfigError);
}

TEST_CASE("walk run: deterministic outputs, config echo, collision handling") {
  const auto cfg = Config::parse(walk_config);
  RunOptions opts;
  opts.out_dir = fresh_dir("walk_a").string();

  const auto res = run(Experiment::walk, cfg, opts);
  CHECK(fs::exists(res.out_dir / "walk_trajectory.tsv"));
  CHECK(fs::exists(res.out_dir / "summary.txt"));

  // second run into the same directory collides unless --overwrite
  CHECK_THROWS_AS(run(Experiment::walk, cfg, opts), ConfigError);
  opts.overwrite = true;
  CHECK_NOTHROW(run(Experiment::walk, cfg, opts));

  // identical config in a fresh directory: byte-identical data, summary
  // identical up to wall time
  RunOptions opts_b;
  opts_b.out_dir = fresh_dir("walk_b").string();
  const auto res_b = run(Experiment::walk, cfg, opts_b);
  CHECK(slurp(res.out_dir / "walk_trajectory.tsv") == slurp(res_b.out_dir / "walk_trajectory.tsv"));
  CHECK(without_wall_time(slurp(res.out_dir / "summary.txt")) ==
        without_wall_time(slurp(res_b.out_dir / "summary.txt")));

  // the config echo embedded in the summary re-parses to an equal Config
  const std::string summary = slurp(res.out_dir / "summary.txt");
  const auto begin = summary.find("--- begin config ---\n");
  const auto end = summary.find("--- end config ---");
  REQUIRE(begin != std::string::npos);
  REQUIRE(end != std::string::npos);
  const std::string echoed = summary.substr(begin + 21, end - begin - 21);
  CHECK(Config::parse(echoed) == cfg);

  // declared experiment must match the requested one
  CHECK_THROWS_AS(run(Experiment::radiation, cfg, opts_b), ConfigError);
}

TEST_CASE("walk run: trajectory starts on the initial site and conserves weight") {
  const auto cfg = Config::parse(walk_config);
  RunOptions opts;
  opts.out_dir = fresh_dir("walk_c").string();
  run(Experiment::walk, cfg, opts);

  std::ifstream in(fs::path(opts.out_dir) / "walk_trajectory.tsv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "t_ns\tsite\tp");
  double t, site, p, sum0 = 0.0, first = -1.0;
  int rows = 0;
  while (in >> t >> site >> p) {
    ++rows;
    if (t == 0.0) {
      sum0 += p;
      if (site == 1) first = p;
    }
  }
  CHECK(rows == 11 * 10);
  CHECK(first == 1.0);
  CHECK(sum0 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("entangle run emits curved and flat trajectories") {
  const auto cfg = Config::parse(R"(
[lattice]
n = 10
beta_mhz = 4.39
eta_d = 0.35
j_h = 3
kappa_mhz = 2.94

[initial]
kind = bell

[time]
t_max_ns = 50
n_samples = 6
)");
  RunOptions opts;
  opts.out_dir = fresh_dir("entangle").string();
  const auto res = run(Experiment::entangle, cfg, opts);
  REQUIRE(fs::exists(res.out_dir / "entangle_curved.tsv"));
  REQUIRE(fs::exists(res.out_dir / "entangle_flat.tsv"));

  std::ifstream in(res.out_dir / "entangle_curved.tsv");
  std::string header;
  std::getline(in, header);
  double t, s, c;
  in >> t >> s >> c;
  CHECK(t == 0.0);
  CHECK(s < 1e-10);
  CHECK(c > 0.999);
}

TEST_CASE("radiation run recovers a temperature near the design value") {
  const auto cfg = Config::parse(R"(
[lattice]
n = 10
profile = tanh
beta_mhz = 4.39
eta_d = 0.35
j_h = 3

[time]
t_max_ns = 1000
n_samples = 2
)");
  RunOptions opts;
  opts.out_dir = fresh_dir("radiation").string();
  const auto res = run(Experiment::radiation, cfg, opts);

  const std::string fit = slurp(res.out_dir / "radiation_fit.txt");
  CHECK(fit.find("status = ok") != std::string::npos);
  const auto pos = fit.find("t_h_mhz = ");
  REQUIRE(pos != std::string::npos);
  const double t_h = std::stod(fit.substr(pos + 10));
  CHECK(std::abs(t_h - 0.35) / 0.35 < 0.25);
}

TEST_CASE("zero-width disorder sweep reproduces the clean curve exactly") {
  const auto cfg = Config::parse(R"(
[lattice]
n = 10
profile = tanh
beta_mhz = 4.39
eta_d = 0.35
j_h = 3

[time]
t_max_ns = 1000
n_samples = 2

[disorder]
w_nnn_mhz = 0
w_mu_mhz = 0
realizations = 3
seed = 11

[sweep]
kind = disorder
)");
  RunOptions opts;
  opts.out_dir = fresh_dir("sweep0").string();
  const auto res = run(Experiment::sweep, cfg, opts);

  std::ifstream in(res.out_dir / "sweep_wnnn0_wmu0.tsv");
  std::string header;
  std::getline(in, header);
  double e, mean, sd, clean;
  int rows = 0;
  while (in >> e >> mean >> sd >> clean) {
    ++rows;
    CHECK(mean == clean);  // bit-identical, not approximately equal
    CHECK(sd < 1e-12);     // only mean-accumulation rounding
  }
  CHECK(rows == 5);

  // threads must not change any output byte
  RunOptions opts2;
  opts2.out_dir = fresh_dir("sweep0_threads").string();
  opts2.threads = 2;
  const auto res2 = run(Experiment::sweep, cfg, opts2);
  CHECK(slurp(res.out_dir / "sweep_wnnn0_wmu0.tsv") == slurp(res2.out_dir / "sweep_wnnn0_wmu0.tsv"));
  CHECK(slurp(res.out_dir / "realizations/wnnn0_wmu0_r002.tsv") ==
        slurp(res2.out_dir / "realizations/wnnn0_wmu0_r002.tsv"));
}

TEST_CASE("size sweep writes P_out trajectories for each horizon") {
  const auto cfg = Config::parse(R"(
[lattice]
n = 10
profile = tanh
beta_mhz = 4.39
eta_d = 0.35
j_h = 3

[time]
t_max_ns = 500
n_samples = 26

[sweep]
kind = size
sizes = 60
horizons = 20, 30
initial_site = 10
)");
  RunOptions opts;
  opts.out_dir = fresh_dir("sweep_size").string();
  const auto res = run(Experiment::sweep, cfg, opts);
  CHECK(fs::exists(res.out_dir / "pout_n60_jh20.tsv"));
  CHECK(fs::exists(res.out_dir / "pout_n60_jh30.tsv"));
}

TEST_CASE("device run emits parameter, curve and swap files") {
  const auto cfg = Config::parse(R"(
[device]
e_jj_ghz = 32.0
e_c_ghz = 0.2
asymmetry = 0.02
zpa_slope = 0.85
flux_offset = 0.12
g_qc_mhz = 98.07
g_q2c_mhz = 85.72
g_qq_mhz = 10.41
omega_q_ghz = 5.1
omega_q2_ghz = 5.1
run_fit = false
)");
  RunOptions opts;
  opts.out_dir = fresh_dir("device").string();
  const auto res = run(Experiment::device, cfg, opts);
  for (const char* f : {"device_params.txt", "coupling_curve.tsv", "anticrossing.tsv", "swap.tsv", "swap_extraction.txt"})
    CHECK(fs::exists(res.out_dir / f));

  const std::string extraction = slurp(res.out_dir / "swap_extraction.txt");
  const auto pos = extraction.find("g_extracted_mhz = ");
  REQUIRE(pos != std::string::npos);
  CHECK(std::stod(extraction.substr(pos + 18)) == doctest::Approx(2.94).epsilon(1e-3));
}

TEST_CASE("config errors surface as ConfigError, not crashes") {
  const auto cfg = Config::parse("[lattice]\nn = 10\nprofile = spiral\n");
  RunOptions opts;
  opts.out_dir = fresh_dir("bad").string();
  CHECK_THROWS_AS(run(Experiment::walk, cfg, opts), ConfigError);

  const auto cfg2 = Config::parse(walk_config);
  RunOptions bad_threads;
  bad_threads.out_dir = fresh_dir("bad2").string();
  bad_threads.threads = 0;
  CHECK_THROWS_AS(run(Experiment::walk, cfg2, bad_threads), ConfigError);
}

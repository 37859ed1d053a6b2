#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "qmep/cli/commands.hpp"
#include "qmep/cli/config.hpp"
#include "qmep/cli/run_config.hpp"
#include "qmep/constants.hpp"
#include "qmep/errors.hpp"

using namespace qmep;
using namespace qmep::cli;

namespace {

const std::string fixtures = QMEP_FIXTURE_DIR;

RunConfig fixture(const std::string& name) { return load_run_config(fixtures + "/" + name); }

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t col(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    FAIL("missing column " << name);
    return 0;
  }
  double num(std::size_t row, const std::string& name) const { return std::stod(rows[row][col(name)]); }
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

Table read_csv(const std::string& text) {
  Table t;
  std::stringstream ss(text);
  std::string line;
  REQUIRE(std::getline(ss, line));
  CHECK(line == "# schema=1");
  REQUIRE(std::getline(ss, line));
  t.header = split(line);
  while (std::getline(ss, line)) t.rows.push_back(split(line));
  return t;
}

int run_tool(const std::string& args) {
  const std::string cmd = std::string(QMEP_TOOL_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

}  // namespace

TEST_CASE("config parser reads tables, arrays and scalars") {
  const auto doc = parse_config(
      "hbar_scale = 0.5  # trailing comment\n"
      "output = \"out.csv\"\n"
      "[material]\n"
      "preset = \"graphene\"\n"
      "[[channel]]\n"
      "kind = \"graphene_acoustic\"\n"
      "[[channel]]\n"
      "kind = \"graphene_k\"\n"
      "[relax]\n"
      "adaptive = false\n"
      "dt = 1.5e-3\n");
  CHECK(doc.root.number("hbar_scale") == 0.5);
  CHECK(doc.root.string("output") == "out.csv");
  CHECK(doc.table("material")->string("preset") == "graphene");
  REQUIRE(doc.arrays.at("channel").size() == 2);
  CHECK(doc.arrays.at("channel")[1].string("kind") == "graphene_k");
  CHECK_FALSE(doc.table("relax")->boolean_or("adaptive", true));
  CHECK(doc.table("relax")->number("dt") == 1.5e-3);
  CHECK(doc.table("sweep") == nullptr);
}

TEST_CASE("config errors name the line") {
  const auto message = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("[material]\npreset = \n").find("line 2") != std::string::npos);
  CHECK(message("a = 1\na = 2\n").find("line 2") != std::string::npos);
  CHECK(message("a = \"open\n").find("line 1") != std::string::npos);
  CHECK(message("[[channel]\n").find("line 1") != std::string::npos);
  CHECK(message("x = 1 2\n") != "");
  CHECK_THROWS_AS(load_config(fixtures + "/does_not_exist.toml"), ConfigError);
  CHECK_THROWS_AS(fixture("malformed.toml"), ConfigError);
}

TEST_CASE("run configurations reject unknown keys and bad values") {
  CHECK_THROWS_AS(run_config_from(parse_config("[material]\npreset = \"silicon-kane\"\nfoo = 1\n")), ConfigError);
  CHECK_THROWS_AS(run_config_from(parse_config("[material]\npreset = \"tin\"\n")), ConfigError);
  CHECK_THROWS_AS(run_config_from(parse_config("[material]\nband = \"kane\"\n[oops]\n")), ConfigError);
  CHECK_THROWS_AS(run_config_from(parse_config("[state]\neta0 = 1\n")), ConfigError);
  CHECK_THROWS_AS(run_config_from(parse_config("[material]\npreset = \"silicon-kane\"\n[sweep]\n"
                                               "parameter = \"eta0\"\nmin = 0\nmax = 1\ncount = 0\n")),
                  ConfigError);
  CHECK_THROWS_AS(run_config_from(parse_config("hbar_scale = -1\n[material]\npreset = \"silicon-kane\"\n")),
                  ConfigError);
  RunConfig rc = fixture("coupling.toml");
  rc.hbar_scale = -1.0;
  CHECK_THROWS_AS(rc.validate(), ConfigError);
  rc.hbar_scale = 0.0;
  rc.sweep->parameter = "J_x";
  CHECK_THROWS_AS(run_mobility_sweep(rc), ConfigError);
}

TEST_CASE("presets expand to full parameter sets") {
  for (const std::string name : {"silicon-kane", "silicon-parabolic", "graphene", "graphene-gapped"}) {
    const MaterialConfig m = material_preset(name);
    CHECK(m.preset == name);
    CHECK(m.T_L == 300.0);
    CHECK_FALSE(preset_channels(name, m.T_L).empty());
    CHECK_NOTHROW(m.build());
  }
  CHECK(material_preset("silicon-parabolic").kind == BandKind::Parabolic);
  CHECK(material_preset("silicon-kane").alpha == 0.5);
  CHECK(material_preset("graphene-gapped").half_gap > 0.0);
  const auto rc = fixture("all_converge.toml");
  CHECK(rc.channels.size() == preset_channels("silicon-kane", 300.0).size());
  const auto explicit_channel = run_config_from(
      parse_config("[material]\npreset = \"silicon-kane\"\n[[channel]]\nkind = \"silicon_elastic\"\ncoupling = 1e-27\n"));
  CHECK(explicit_channel.channels.size() == 1);
}

TEST_CASE("sweep axes") {
  SweepAxis lin{"eta0", -1.0, 1.0, 5, false};
  const auto v = lin.values();
  REQUIRE(v.size() == 5);
  CHECK(v.front() == -1.0);
  CHECK(v.back() == 1.0);
  CHECK(v[2] == doctest::Approx(0.0));
  SweepAxis lg{"n", 1e18, 1e21, 4, true};
  const auto w = lg.values();
  CHECK(w[1] == doctest::Approx(1e19).epsilon(1e-12));
  CHECK(SweepAxis{"eta0", 2.0, 5.0, 1, false}.values() == std::vector<double>{2.0});
}

TEST_CASE("invert: non-degenerate sweep converges") {
  const auto res = run_invert(fixture("all_converge.toml"));
  CHECK(res.exit_code == exit_ok);
  const Table t = read_csv(res.csv);
  REQUIRE(t.rows.size() == 4);
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    CHECK(t.rows[i][t.col("status")] == "ok");
    CHECK(t.num(i, "residual") < 1e-8);
    CHECK(t.num(i, "eta0") > 5.0);
  }
}

TEST_CASE("invert: single degenerate point gives one row") {
  RunConfig rc = fixture("partial.toml");
  rc.sweep.reset();
  rc.state.energy_per_carrier = 0.07;
  const auto res = run_invert(rc);
  CHECK(res.exit_code == exit_ok);
  const Table t = read_csv(res.csv);
  REQUIRE(t.rows.size() == 1);
  CHECK(t.header[1] == "n");
  CHECK(t.num(0, "eta0") < 0.0);
  CHECK(t.num(0, "residual") < 1e-8);
}

TEST_CASE("invert: unrealizable energy is flagged with exit 1") {
  const auto res = run_invert(fixture("partial.toml"));
  CHECK(res.exit_code == exit_partial);
  const Table t = read_csv(res.csv);
  REQUIRE(t.rows.size() == 8);
  CHECK(t.rows[0][t.col("status")] == "failed");
  CHECK(t.rows[0][t.col("message")].find("unrealizable") != std::string::npos);
  CHECK(t.rows[7][t.col("status")] == "ok");
  CHECK_FALSE(res.messages.empty());
}

TEST_CASE("mobility: hbar_scale 0 gives a zero second-order column") {
  RunConfig rc = fixture("mobility.toml");
  REQUIRE(rc.hbar_scale == 0.0);
  const Table t0 = read_csv(run_mobility_sweep(rc).csv);
  for (std::size_t i = 0; i < t0.rows.size(); ++i) {
    CHECK(t0.rows[i][t0.col("mu2")] == "0.00000000000e+00");
    CHECK(t0.rows[i][t0.col("mu_total")] == t0.rows[i][t0.col("mu0")]);
  }
  rc.hbar_scale = 1.0;
  const Table t1 = read_csv(run_mobility_sweep(rc).csv);
  for (std::size_t i = 0; i < t1.rows.size(); ++i) {
    CHECK(t1.num(i, "mu2") != 0.0);
    CHECK(t1.num(i, "mu0") == t0.num(i, "mu0"));
  }
}

TEST_CASE("mobility: doubling the couplings halves tau and mu0") {
  const Table t = read_csv(run_mobility_sweep(fixture("coupling.toml")).csv);
  REQUIRE(t.rows.size() == 2);
  CHECK(t.num(1, "tau") / t.num(0, "tau") == doctest::Approx(0.5).epsilon(1e-11));
  CHECK(t.num(1, "mu0") / t.num(0, "mu0") == doctest::Approx(0.5).epsilon(1e-11));
}

TEST_CASE("mobility: parabolic density sweep at fixed energy per carrier") {
  const RunConfig rc = fixture("parabolic_density.toml");
  const Table t = read_csv(run_mobility_sweep(rc).csv);
  REQUIRE(t.rows.size() == 4);
  const double m = rc.material.m_star * constants::m_e;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    // mu0 = -tau q / m* exactly, so mu0 follows tau
    CHECK(t.num(i, "mu0") / t.num(i, "tau") ==
          doctest::Approx(-constants::q_e / m).epsilon(1e-10));
    // tau itself only moves through Pauli factors, which are tiny here
    CHECK(t.num(i, "mu0") / t.num(0, "mu0") == doctest::Approx(1.0).epsilon(1e-5));
  }
}

TEST_CASE("production: equilibrium table satisfies detailed balance") {
  const Table t = read_csv(run_production_table(fixture("production_eq.toml")).csv);
  REQUIRE(t.rows.size() == 15);
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    CHECK(std::abs(t.num(i, "C_W_detailed_balance")) <= 1e-10);
    CHECK(std::abs(t.num(i, "C_W_reduced")) <= 1e-10);
  }
}

TEST_CASE("relax: hot start gives a monotone energy column") {
  const auto res = run_relax(fixture("relax_hot.toml"));
  CHECK(res.exit_code == exit_ok);
  const Table t = read_csv(res.csv);
  REQUIRE(t.rows.size() > 10);
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    CHECK(t.num(i, "W") <= t.num(i - 1, "W"));
    CHECK(t.num(i, "n") == t.num(0, "n"));
  }
  CHECK(t.num(t.rows.size() - 1, "eta1") == doctest::Approx(1.0).epsilon(1e-6));
  RunConfig bad = fixture("relax_hot.toml");
  bad.relax.dt = 1.0;
  CHECK_THROWS_AS(run_relax(bad), ConfigError);
}

TEST_CASE("identical configs give identical CSV") {
  for (const std::string f : {"all_converge.toml", "mobility.toml", "production_eq.toml"}) {
    RunConfig rc = fixture(f);
    rc.hbar_scale = 1.0;
    const auto a = f == "all_converge.toml" ? run_invert(rc) : f == "mobility.toml" ? run_mobility_sweep(rc)
                                                                                      : run_production_table(rc);
    const auto b = f == "all_converge.toml" ? run_invert(rc) : f == "mobility.toml" ? run_mobility_sweep(rc)
                                                                                      : run_production_table(rc);
    CHECK(a.csv == b.csv);
  }
}

TEST_CASE("tool exit codes and output files") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "qmep_test_cli";
  fs::create_directories(dir);
  const std::string ok = fixtures + "/all_converge.toml";
  CHECK(run_tool("invert --config " + ok + " --output " + (dir / "a.csv").string()) == 0);
  CHECK(run_tool("invert --config " + ok + " --threads 1 --output " + (dir / "b.csv").string()) == 0);
  CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
  CHECK_FALSE(slurp(dir / "a.csv").empty());
  CHECK(run_tool("invert --config " + fixtures + "/partial.toml") == 1);
  CHECK(run_tool("invert --config " + fixtures + "/malformed.toml") == 2);
  CHECK(run_tool("invert --config " + fixtures + "/does_not_exist.toml") == 2);
  CHECK(run_tool("invert") == 2);
  CHECK(run_tool("frobnicate --config " + ok) == 2);
  CHECK(run_tool("mobility --config " + fixtures + "/mobility.toml --hbar-scale -1") == 2);
  CHECK(run_tool("relax --config " + fixtures + "/relax_hot.toml --output " + (dir / "r.csv").string()) == 0);
  fs::remove_all(dir);
}

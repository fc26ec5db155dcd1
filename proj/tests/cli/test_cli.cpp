#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "swarmhydro/csv.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

fs::path tmp(const std::string& name) {
  const fs::path p = fs::path(SWARMHYDRO_TEST_TMP) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

CliResult cli(const std::string& args, const std::string& env = "env -u SWARMHYDRO_OUT") {
  static int counter = 0;
  const fs::path base = fs::path(SWARMHYDRO_TEST_TMP) / "io";
  fs::create_directories(base);
  const fs::path o = base / ("out" + std::to_string(counter) + ".txt");
  const fs::path e = base / ("err" + std::to_string(counter++) + ".txt");
  const std::string cmd =
      env + " '" SWARMHYDRO_CLI "' " + args + " > '" + o.string() + "' 2> '" + e.string() + "'";
  const int status = std::system(cmd.c_str());
  CliResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = swarmhydro::read_file(o);
  r.err = swarmhydro::read_file(e);
  return r;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

}  // namespace

TEST_CASE("hydro run that reaches the end exits 0") {
  const fs::path d = tmp("ea_sub");
  const CliResult r = cli("hydro run --preset fig-3.2-c0.2 --t-end 2 --out " + q(d));
  REQUIRE(r.code == 0);
  const json s = json::parse(swarmhydro::read_file(d / "summary.json"));
  CHECK(s["termination"] == "ReachedEnd");
  CHECK(s["blow_up_interval"].is_null());
  CHECK(s["t_final"].get<double>() == doctest::Approx(2.0));
  CHECK(!s.contains("wall_time"));
  CHECK(json::parse(r.out) == s);
  const swarmhydro::CsvTable t = swarmhydro::read_csv(d / "timeseries.csv");
  CHECK(t.header == std::vector<std::string>{"t", "min_jacobian", "max_density", "sup_speed", "support_left",
                                             "support_right", "rv_support", "momentum", "mass"});
  CHECK(fs::exists(d / "final.csv"));
  CHECK(fs::exists(d / "snapshot_0.csv"));
}

TEST_CASE("hydro run that blows up exits 2 with the interval") {
  const fs::path d = tmp("ep_plus");
  const CliResult r = cli("hydro run --preset fig-3.5-k0.5-c0.4 --out " + q(d));
  REQUIRE(r.code == 2);
  const json s = json::parse(swarmhydro::read_file(d / "summary.json"));
  CHECK(s["termination"] == "BlowUpDetected");
  const double lo = s["blow_up_interval"][0].get<double>();
  const double hi = s["blow_up_interval"][1].get<double>();
  CHECK(hi - lo <= 1e-6 * 1.01);
  CHECK(s["blow_up_midpoint"].get<double>() == doctest::Approx(1.08).epsilon(0.15));
}

TEST_CASE("unknown preset is an error with a JSON message") {
  const CliResult r = cli("hydro run --preset does-not-exist --out " + q(tmp("bad")));
  CHECK(r.code == 1);
  const json e = json::parse(r.err);
  CHECK(e["error"]["code"] == "ValidationError");
  CHECK(e["error"]["message"].get<std::string>().find("does-not-exist") != std::string::npos);
}

TEST_CASE("bad config file and conflicting sources are errors") {
  const fs::path d = tmp("badcfg");
  swarmhydro::write_atomic(d / "dup.json", R"({"kind": "hydro", "c": 1, "c": 2})");
  CliResult r = cli("hydro run --config " + q(d / "dup.json") + " --out " + q(d / "o"));
  CHECK(r.code == 1);
  CHECK(json::parse(r.err)["error"]["code"] == "ParseError");
  r = cli("hydro run --config " + q(d / "dup.json") + " --preset fig-3.2-c0.2");
  CHECK(r.code == 1);
  r = cli("particle run --preset fig-3.2-c0.2 --out " + q(d / "o"));
  CHECK(r.code == 1);
  CHECK(json::parse(r.err)["error"]["code"] == "ValidationError");
}

TEST_CASE("preset list prints every preset") {
  const CliResult r = cli("preset list");
  CHECK(r.code == 0);
  for (const char* name : {"fig-2.1-beta0.8", "fig-3.3-c0.5", "fig-3.14-pressure-cs"}) {
    CHECK(r.out.find(name) != std::string::npos);
  }
}

TEST_CASE("threshold classify and bound") {
  const fs::path d = tmp("thr");
  CliResult r = cli("threshold classify --preset fig-3.8-k-0.5-c1.08 --out " + q(d / "c"));
  REQUIRE(r.code == 0);
  json v = json::parse(swarmhydro::read_file(d / "c" / "verdict.json"));
  CHECK(v["region"] == "Gap");
  for (const char* key : {"region", "witness_x", "margin", "params", "classifier"}) CHECK(v.contains(key));

  r = cli("threshold classify --preset fig-3.3-c0.5 --out " + q(d / "s"));
  REQUIRE(r.code == 0);
  v = json::parse(swarmhydro::read_file(d / "s" / "verdict.json"));
  CHECK(v["region"] == "Supercritical");

  r = cli("threshold bound --preset fig-3.13-log-c1 --out " + q(d / "b"));
  REQUIRE(r.code == 0);
  const json b = json::parse(swarmhydro::read_file(d / "b" / "bound.json"));
  CHECK(b["finite"] == true);
  CHECK(b["bound_kind"] == "log");
  for (const char* key : {"bound", "witness_set_size", "params"}) CHECK(b.contains(key));
}

TEST_CASE("steady compare writes the metrics") {
  const fs::path d = tmp("steady");
  const CliResult r = cli("steady compare --preset fig-3.10-m0.2-c0.9 --t-end 5 --out " + q(d));
  REQUIRE(r.code == 0);
  const json s = json::parse(swarmhydro::read_file(d / "steady.json"));
  for (const char* key : {"profile", "l1", "linf", "residual", "t_final"}) CHECK(s.contains(key));
  CHECK(s["profile"] == "indicator");
}

TEST_CASE("particle run writes trajectory and diagnostics") {
  const fs::path d = tmp("particle");
  const CliResult r = cli("particle run --preset fig-2.1-beta0.8 --n 6 --t-end 2 --seed 3 --out " + q(d));
  REQUIRE(r.code == 0);
  const swarmhydro::CsvTable traj = swarmhydro::read_csv(d / "trajectory.csv");
  CHECK(traj.header.size() == 1 + 6 * 2 * 2);
  CHECK(traj.header[1] == "x0_0");
  const swarmhydro::CsvTable diag = swarmhydro::read_csv(d / "diagnostics.csv");
  CHECK(diag.header == std::vector<std::string>{"t", "Rx", "Rv", "mean_v_0", "mean_v_1"});
}

TEST_CASE("output directory comes from the flag before the environment") {
  const fs::path env_dir = tmp("env_dir");
  const fs::path flag_dir = tmp("flag_dir");
  const std::string env = "SWARMHYDRO_OUT=" + q(env_dir);
  CliResult r = cli("hydro run --preset fig-3.2-c0.2 --n 40 --t-end 0.5", env);
  REQUIRE(r.code == 0);
  CHECK(fs::exists(env_dir / "summary.json"));
  r = cli("hydro run --preset fig-3.2-c0.2 --n 40 --t-end 0.5 --out " + q(flag_dir), env);
  REQUIRE(r.code == 0);
  CHECK(fs::exists(flag_dir / "summary.json"));
}

TEST_CASE("reruns are byte-identical") {
  const fs::path a = tmp("rerun_a");
  const fs::path b = tmp("rerun_b");
  REQUIRE(cli("particle run --preset fig-2.3-two-group-cs --t-end 2 --out " + q(a)).code == 0);
  REQUIRE(cli("particle run --preset fig-2.3-two-group-cs --t-end 2 --out " + q(b)).code == 0);
  for (const char* f : {"trajectory.csv", "diagnostics.csv", "summary.json"}) {
    CHECK(swarmhydro::read_file(a / f) == swarmhydro::read_file(b / f));
  }
}

TEST_CASE("sweep runs presets in parallel") {
  const fs::path d = tmp("sweep");
  const CliResult r = cli("sweep --preset fig-3.2-c0.2 --preset fig-3.3-c0.5 -j 2 --n 60 --out " + q(d));
  CHECK(r.code == 0);
  CHECK(r.out.find("fig-3.2-c0.2 exit=0") != std::string::npos);
  CHECK(r.out.find("fig-3.3-c0.5 exit=2") != std::string::npos);
  CHECK(fs::exists(d / "fig-3.2-c0.2" / "summary.json"));
  CHECK(fs::exists(d / "fig-3.3-c0.5" / "summary.json"));
}

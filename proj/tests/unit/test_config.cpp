#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "support.hpp"
#include "swarmhydro/config.hpp"
#include "swarmhydro/csv.hpp"
#include "swarmhydro/presets.hpp"
#include "swarmhydro/run.hpp"

using namespace swarmhydro;
using testing::thrown_code;
namespace fs = std::filesystem;

namespace {

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::path(SWARMHYDRO_TEST_TMP) / name;
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("minimal hydro config gets defaults") {
  const ExperimentConfig c = parse_config(R"({"kind": "hydro", "c": 0.3})");
  CHECK(c.kind == ExperimentKind::Hydro);
  CHECK(c.c == 0.3);
  CHECK(c.grid.n == 200);
  CHECK(c.grid.xl == -0.75);
  CHECK(c.grid.xr == 0.75);
  CHECK(c.integrator.rtol == 1e-8);
  CHECK(c.beta == 0.5);
}

TEST_CASE("sections override nested fields") {
  const ExperimentConfig c =
      parse_config(R"({"kind": "particle", "particles": {"n": 7, "dim": 1, "position_lo": [0], "position_hi": [1],
        "velocity_lo": [-1], "velocity_hi": [1], "target_mean": null}, "integrator": {"method": "rk4", "dt": 0.01}})");
  CHECK(c.particles.n == 7);
  CHECK(c.particles.dim == 1);
  CHECK(!c.particles.target_mean);
  CHECK(c.integrator.method == "rk4");
  const IntegratorConfig ic = make_integrator(c);
  CHECK(std::get<Rk4Fixed>(ic.method).dt == 0.01);
}

TEST_CASE("malformed input and duplicate keys are parse errors") {
  CHECK(thrown_code([] { parse_config(R"({"kind": "hydro", "c": 0.3, "c": 0.4})"); }) == ErrorCode::ParseError);
  CHECK(thrown_code([] { parse_config(R"({"grid": {"n": 10, "n": 20}})"); }) == ErrorCode::ParseError);
  CHECK(thrown_code([] { parse_config(R"({"kind": "hydro",)"); }) == ErrorCode::ParseError);
  CHECK(message_of([] { parse_config(R"({"c": 1, "c": 2})"); }).find("'c'") != std::string::npos);
}

TEST_CASE("unknown keys and bad values name the key") {
  CHECK(thrown_code([] { parse_config(R"({"kind": "hydro", "speed": 1})"); }) == ErrorCode::ValidationError);
  CHECK(message_of([] { parse_config(R"({"kind": "hydro", "speed": 1})"); }).find("speed") != std::string::npos);
  CHECK(message_of([] { parse_config(R"({"grid": {"m": 1}})"); }).find("grid.m") != std::string::npos);
  CHECK(message_of([] { parse_config(R"({"c": "fast"})"); }).find("'c'") != std::string::npos);
  CHECK(message_of([] { parse_config(R"({"alignment": "xy"})"); }).find("alignment") != std::string::npos);
  CHECK(message_of([] { parse_config(R"({"grid": {"n": 3}})"); }).find("grid.n") != std::string::npos);
  CHECK(thrown_code([] { parse_config(R"({"kind": "fluid"})"); }) == ErrorCode::ValidationError);
  CHECK(thrown_code([] { parse_config(R"({"t_end": -1})"); }) == ErrorCode::ValidationError);
}

TEST_CASE("preset key expands to the preset and allows overrides") {
  const ExperimentConfig c = parse_config(R"({"preset": "fig-3.3-c0.5"})");
  CHECK(c == preset("fig-3.3-c0.5"));
  CHECK(c.kind == ExperimentKind::Hydro);
  CHECK(c.c == 0.5);
  CHECK(c.alignment == "cs");
  CHECK(c.potential == "none");
  CHECK(c.velocity == "sine");
  const ExperimentConfig o = parse_config(R"({"preset": "fig-3.3-c0.5", "c": 0.45, "grid": {"n": 400}})");
  CHECK(o.c == 0.45);
  CHECK(o.grid.n == 400);
  CHECK(thrown_code([] { parse_config(R"({"preset": "nope"})"); }) == ErrorCode::ValidationError);
}

TEST_CASE("every preset round-trips through serialize and parse") {
  CHECK(preset_catalog().size() >= 20);
  for (const PresetInfo& p : preset_catalog()) {
    const ExperimentConfig c = preset(p.name);
    CHECK(c.name == p.name);
    CHECK(parse_config(serialize(c)) == c);
    CHECK(!thrown_code([&] { validate(c); }));
  }
}

TEST_CASE("preset catalog covers the experiment families") {
  for (const char* name : {"fig-2.1-beta0.8", "fig-2.2a-beta1.05", "fig-2.2b-beta1.2", "fig-2.3-two-group-cs",
                           "fig-2.3-two-group-mt", "fig-2.5-newtonian", "fig-3.2-c0.2", "fig-3.2-c0.4", "fig-3.3-c0.5",
                           "fig-3.4-cs", "fig-3.4-mt", "fig-3.5-k0.5-c0.4", "fig-3.7-k-0.5-c0.95",
                           "fig-3.8-k-0.5-c1.08", "fig-3.9-k-0.5-c1.2", "fig-3.10-m0.2-c0.9", "fig-3.10-m0.2-c1.1",
                           "fig-3.12-cs-m1-c0.2", "fig-3.12-cs-m1-c0.5", "fig-3.13-log-c0.3", "fig-3.13-log-c1",
                           "fig-3.14-pressure-damped", "fig-3.14-pressure-cs"}) {
    CHECK_MESSAGE(!thrown_code([&] { preset(name); }), name);
  }
  const ExperimentConfig p = preset("fig-3.14-pressure-cs");
  CHECK(p.pressure_eps == std::pow(10.0, -4.1));
  CHECK(p.floor == 0.05);
  CHECK(p.velocity_offset == 0.1);
}

TEST_CASE("converters build the matching model") {
  const ExperimentConfig c = preset("fig-3.10-m0.2-c1.1");
  const HydroModel m = make_hydro_model(c);
  CHECK(m.alignment == HydroAlignment::LinearDamping);
  REQUIRE(m.potential);
  CHECK(std::get<NewtonianConfined1D>(*m.potential) == NewtonianConfined1D{-0.5, 1.0});
  const InitProfile p = make_profile(c);
  CHECK(std::get<CosineBump>(p.shape).scale == 1.7);
  CHECK(std::get<LinearC>(p.velocity).c == 1.1);
  CHECK(p.mass == 0.2);

  const ExperimentConfig q = preset("fig-2.3-two-group-mt");
  const ParticleState s = make_particle_ic(q);
  CHECK(s.count() == 55);
  CHECK(make_particle_model(q).alignment == ParticleAlignment::MT);
}

TEST_CASE("format_double round-trips") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0, std::nextafter(1.0, 2.0)}) {
    const std::string s = format_double(v);
    CHECK(std::stod(s) == v);
    CHECK(s.find(',') == std::string::npos);
  }
  CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("CSV write and read") {
  const fs::path dir = scratch("csv");
  CsvWriter w({"t", "value"});
  const double r1[] = {0.0, 1.0 / 3.0};
  const double r2[] = {0.1, -7.25};
  w.row(r1);
  w.row(r2);
  write_atomic(dir / "a.csv", w.str());
  CHECK(!fs::exists(dir / "a.csv.tmp"));
  const CsvTable t = read_csv(dir / "a.csv");
  CHECK(t.header == std::vector<std::string>{"t", "value"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0][1] == 1.0 / 3.0);
  CHECK(t.column("value") == 1);
  CHECK(message_of([&] { t.column("missing"); }).find("missing") != std::string::npos);
  const double bad[] = {1.0};
  CHECK(thrown_code([&] { w.row(bad); }) == ErrorCode::ValidationError);
}

TEST_CASE("run writes byte-identical artifacts for identical configs") {
  ExperimentConfig c = preset("fig-3.3-c0.5");
  c.grid.n = 60;
  c.t_end = 1.0;
  RunOptions oa, ob;
  oa.out_dir = scratch("run_a");
  ob.out_dir = scratch("run_b");
  const RunOutcome a = run(c, oa);
  const RunOutcome b = run(c, ob);
  CHECK(a.exit_code == b.exit_code);
  CHECK(a.json == b.json);
  for (const char* f : {"timeseries.csv", "summary.json", "final.csv", "snapshot_0.csv"}) {
    CHECK(read_file(oa.out_dir / f) == read_file(ob.out_dir / f));
  }
  CHECK(a.json.find("wall_time") == std::string::npos);
}

TEST_CASE("output directory precedence") {
  ::unsetenv("SWARMHYDRO_OUT");
  ExperimentConfig c;
  CHECK(resolve_out_dir(std::nullopt, c) == fs::path("out"));
  c.out = "from_config";
  CHECK(resolve_out_dir(std::nullopt, c) == fs::path("from_config"));
  CHECK(resolve_out_dir(std::string("flag"), c) == fs::path("flag"));
}

#include "swarmhydro/config.hpp"

#include <algorithm>
#include <set>
#include <vector>

#include "json.hpp"

#include "swarmhydro/error.hpp"
#include "swarmhydro/presets.hpp"

namespace swarmhydro {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

const std::vector<std::string> kKinds = {"particle", "hydro", "threshold", "steady"};

ExperimentKind kind_from(const std::string& s) {
  if (s == "particle") return ExperimentKind::Particle;
  if (s == "hydro") return ExperimentKind::Hydro;
  if (s == "threshold") return ExperimentKind::Threshold;
  if (s == "steady") return ExperimentKind::Steady;
  fail(ErrorCode::ValidationError, "key 'kind': unknown value '" + s + "'");
}

// Reads typed values out of one JSON object and rejects keys nobody asked for.
class Reader {
 public:
  Reader(const json& obj, std::string prefix) : obj_(obj), prefix_(std::move(prefix)) {
    if (!obj_.is_object()) fail(ErrorCode::ValidationError, "key '" + prefix_ + "': expected an object");
  }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  void get(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) bad(key, "expected a number");
      out = v->get<double>();
    }
  }
  void get(const std::string& key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) bad(key, "expected true or false");
      out = v->get<bool>();
    }
  }
  void get(const std::string& key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) bad(key, "expected a string");
      out = v->get<std::string>();
    }
  }
  void get(const std::string& key, std::size_t& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer() || v->get<long long>() < 0) bad(key, "expected a nonnegative integer");
      out = v->get<std::size_t>();
    }
  }
  void get(const std::string& key, std::uint64_t& out, int) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer() || (v->is_number_integer() && !v->is_number_unsigned() && v->get<long long>() < 0)) {
        bad(key, "expected a nonnegative integer");
      }
      out = v->get<std::uint64_t>();
    }
  }
  void get(const std::string& key, std::optional<double>& out) {
    if (const json* v = find(key)) {
      if (v->is_null()) {
        out.reset();
      } else if (v->is_number()) {
        out = v->get<double>();
      } else {
        bad(key, "expected a number or null");
      }
    }
  }
  void get(const std::string& key, std::vector<double>& out) {
    if (const json* v = find(key)) out = numbers(key, *v);
  }
  void get(const std::string& key, std::optional<std::vector<double>>& out) {
    if (const json* v = find(key)) {
      if (v->is_null()) {
        out.reset();
      } else {
        out = numbers(key, *v);
      }
    }
  }

  const json* section(const std::string& key) {
    const json* v = find(key);
    if (v && !v->is_object()) bad(key, "expected an object");
    return v;
  }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key())) {
        fail(ErrorCode::ValidationError, "unknown key '" + qualified(it.key()) + "'");
      }
    }
  }

 private:
  std::string qualified(const std::string& key) const {
    return prefix_.empty() ? key : prefix_ + "." + key;
  }
  [[noreturn]] void bad(const std::string& key, const std::string& what) const {
    fail(ErrorCode::ValidationError, "key '" + qualified(key) + "': " + what);
  }
  std::vector<double> numbers(const std::string& key, const json& v) const {
    if (!v.is_array()) bad(key, "expected an array of numbers");
    std::vector<double> out;
    for (const json& e : v) {
      if (!e.is_number()) bad(key, "expected an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  const json& obj_;
  std::string prefix_;
  std::set<std::string> seen_;
};

json parse_strict(const std::string& text) {
  std::vector<std::set<std::string>> keys;
  json::parser_callback_t cb = [&](int, json::parse_event_t event, json& parsed) {
    switch (event) {
      case json::parse_event_t::object_start: keys.emplace_back(); break;
      case json::parse_event_t::object_end: keys.pop_back(); break;
      case json::parse_event_t::key: {
        const std::string k = parsed.get<std::string>();
        if (!keys.back().insert(k).second) fail(ErrorCode::ParseError, "duplicate key '" + k + "'");
        break;
      }
      default: break;
    }
    return true;
  };
  try {
    return json::parse(text, cb);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::ParseError, e.what());
  }
}

void check_choice(const std::string& key, const std::string& value,
                  std::initializer_list<const char*> allowed) {
  for (const char* a : allowed) {
    if (value == a) return;
  }
  fail(ErrorCode::ValidationError, "key '" + key + "': unknown value '" + value + "'");
}

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) fail(ErrorCode::ValidationError, "key '" + key + "': " + what);
}

}  // namespace

const char* to_string(ExperimentKind kind) noexcept {
  switch (kind) {
    case ExperimentKind::Particle: return "particle";
    case ExperimentKind::Hydro: return "hydro";
    case ExperimentKind::Threshold: return "threshold";
    case ExperimentKind::Steady: return "steady";
  }
  return "unknown";
}

ExperimentConfig parse_config(const std::string& text) {
  const json root = parse_strict(text);
  Reader r(root, "");
  ExperimentConfig cfg;
  if (const json* p = r.find("preset")) {
    if (!p->is_string()) fail(ErrorCode::ValidationError, "key 'preset': expected a string");
    cfg = preset(p->get<std::string>());
  }
  if (const json* k = r.find("kind")) {
    if (!k->is_string()) fail(ErrorCode::ValidationError, "key 'kind': expected a string");
    cfg.kind = kind_from(k->get<std::string>());
  }
  r.get("name", cfg.name);
  r.get("alignment", cfg.alignment);
  r.get("beta", cfg.beta);
  r.get("constant_psi", cfg.constant_psi);
  r.get("potential", cfg.potential);
  r.get("k", cfg.k);
  r.get("alpha", cfg.alpha);
  r.get("a", cfg.a);
  r.get("b", cfg.b);
  r.get("eps", cfg.eps);
  r.get("pressure_eps", cfg.pressure_eps);
  r.get("mass", cfg.mass);
  r.get("density", cfg.density);
  r.get("density_scale", cfg.density_scale);
  r.get("mass_ratio", cfg.mass_ratio);
  r.get("velocity", cfg.velocity);
  r.get("c", cfg.c);
  r.get("velocity_scale", cfg.velocity_scale);
  r.get("velocity_offset", cfg.velocity_offset);
  r.get("floor", cfg.floor);
  r.get("classifier", cfg.classifier);
  r.get("bound", cfg.bound);
  r.get("psi_M", cfg.psi_M);
  r.get("profile", cfg.profile);
  r.get("seed", cfg.seed, 0);
  r.get("t_end", cfg.t_end);
  r.get("out", cfg.out);

  if (const json* s = r.section("grid")) {
    Reader g(*s, "grid");
    g.get("n", cfg.grid.n);
    g.get("xl", cfg.grid.xl);
    g.get("xr", cfg.grid.xr);
    g.finish();
  }
  if (const json* s = r.section("integrator")) {
    Reader g(*s, "integrator");
    g.get("method", cfg.integrator.method);
    g.get("rtol", cfg.integrator.rtol);
    g.get("atol", cfg.integrator.atol);
    g.get("dt_init", cfg.integrator.dt_init);
    g.get("dt_min", cfg.integrator.dt_min);
    g.get("dt_max", cfg.integrator.dt_max);
    g.get("dt", cfg.integrator.dt);
    g.get("stride", cfg.integrator.stride);
    g.get("event_tol", cfg.integrator.event_tol);
    g.finish();
  }
  if (const json* s = r.section("monitor")) {
    Reader g(*s, "monitor");
    g.get("jacobian_floor", cfg.monitor.jacobian_floor);
    g.get("density_cap_factor", cfg.monitor.density_cap_factor);
    g.finish();
  }
  if (const json* s = r.section("particles")) {
    Reader g(*s, "particles");
    g.get("n", cfg.particles.n);
    g.get("dim", cfg.particles.dim);
    g.get("first_order", cfg.particles.first_order);
    g.get("position_lo", cfg.particles.position_lo);
    g.get("position_hi", cfg.particles.position_hi);
    g.get("velocity_lo", cfg.particles.velocity_lo);
    g.get("velocity_hi", cfg.particles.velocity_hi);
    g.get("target_mean", cfg.particles.target_mean);
    g.get("group2_n", cfg.particles.group2_n);
    g.get("group2_lo", cfg.particles.group2_lo);
    g.get("group2_hi", cfg.particles.group2_hi);
    g.finish();
  }
  if (const json* s = r.section("output")) {
    Reader g(*s, "output");
    g.get("snapshots", cfg.output.snapshots);
    g.finish();
  }
  r.finish();
  validate(cfg);
  return cfg;
}

std::string serialize(const ExperimentConfig& cfg) {
  ordered_json j;
  j["kind"] = to_string(cfg.kind);
  j["name"] = cfg.name;
  j["alignment"] = cfg.alignment;
  j["beta"] = cfg.beta;
  j["constant_psi"] = cfg.constant_psi;
  j["potential"] = cfg.potential;
  j["k"] = cfg.k;
  j["alpha"] = cfg.alpha;
  j["a"] = cfg.a;
  j["b"] = cfg.b;
  j["eps"] = cfg.eps;
  j["pressure_eps"] = cfg.pressure_eps ? ordered_json(*cfg.pressure_eps) : ordered_json(nullptr);
  j["mass"] = cfg.mass;
  j["density"] = cfg.density;
  j["density_scale"] = cfg.density_scale;
  j["mass_ratio"] = cfg.mass_ratio;
  j["velocity"] = cfg.velocity;
  j["c"] = cfg.c;
  j["velocity_scale"] = cfg.velocity_scale;
  j["velocity_offset"] = cfg.velocity_offset;
  j["floor"] = cfg.floor;
  j["classifier"] = cfg.classifier;
  j["bound"] = cfg.bound;
  j["psi_M"] = cfg.psi_M;
  j["profile"] = cfg.profile;
  j["seed"] = cfg.seed;
  j["t_end"] = cfg.t_end;
  j["out"] = cfg.out;
  j["grid"] = {{"n", cfg.grid.n}, {"xl", cfg.grid.xl}, {"xr", cfg.grid.xr}};
  j["integrator"] = {{"method", cfg.integrator.method}, {"rtol", cfg.integrator.rtol},
                     {"atol", cfg.integrator.atol},     {"dt_init", cfg.integrator.dt_init},
                     {"dt_min", cfg.integrator.dt_min}, {"dt_max", cfg.integrator.dt_max},
                     {"dt", cfg.integrator.dt},         {"stride", cfg.integrator.stride},
                     {"event_tol", cfg.integrator.event_tol}};
  j["monitor"] = {{"jacobian_floor", cfg.monitor.jacobian_floor},
                  {"density_cap_factor", cfg.monitor.density_cap_factor}};
  const ParticleSection& p = cfg.particles;
  ordered_json ps;
  ps["n"] = p.n;
  ps["dim"] = p.dim;
  ps["first_order"] = p.first_order;
  ps["position_lo"] = p.position_lo;
  ps["position_hi"] = p.position_hi;
  ps["velocity_lo"] = p.velocity_lo;
  ps["velocity_hi"] = p.velocity_hi;
  ps["target_mean"] = p.target_mean ? ordered_json(*p.target_mean) : ordered_json(nullptr);
  ps["group2_n"] = p.group2_n;
  ps["group2_lo"] = p.group2_lo;
  ps["group2_hi"] = p.group2_hi;
  j["particles"] = ps;
  j["output"] = {{"snapshots", cfg.output.snapshots}};
  return j.dump(2) + "\n";
}

void validate(const ExperimentConfig& cfg) {
  check_choice("alignment", cfg.alignment, {"cs", "mt", "damping", "none"});
  check_choice("potential", cfg.potential, {"none", "quadratic", "newtonian", "power", "log", "mollified"});
  check_choice("density", cfg.density, {"cosine", "two_group"});
  check_choice("velocity", cfg.velocity, {"sine", "linear", "two_group", "zero"});
  check_choice("classifier", cfg.classifier,
               {"auto", "euler_alignment", "euler_poisson", "constant_psi", "damped_newtonian"});
  check_choice("bound", cfg.bound, {"auto", "newtonian", "log"});
  check_choice("profile", cfg.profile, {"indicator", "parabola", "semicircle"});
  check_choice("integrator.method", cfg.integrator.method, {"rk45", "rk4"});
  require(cfg.beta >= 0.0, "beta", "must be >= 0");
  require(cfg.eps > 0.0, "eps", "must be > 0");
  require(!cfg.pressure_eps || *cfg.pressure_eps > 0.0, "pressure_eps", "must be > 0");
  require(cfg.mass > 0.0, "mass", "must be > 0");
  require(cfg.density_scale > 0.0, "density_scale", "must be > 0");
  require(cfg.mass_ratio > 0.0, "mass_ratio", "must be > 0");
  require(cfg.velocity_scale > 0.0, "velocity_scale", "must be > 0");
  require(cfg.floor >= 0.0, "floor", "must be >= 0");
  require(cfg.psi_M > 0.0, "psi_M", "must be > 0");
  require(cfg.t_end > 0.0, "t_end", "must be > 0");
  require(cfg.grid.n >= 7, "grid.n", "must be >= 7");
  require(cfg.grid.xl < cfg.grid.xr, "grid.xl", "must be below grid.xr");
  const IntegratorSection& in = cfg.integrator;
  require(in.rtol > 0.0, "integrator.rtol", "must be > 0");
  require(in.atol > 0.0, "integrator.atol", "must be > 0");
  require(in.dt_init > 0.0, "integrator.dt_init", "must be > 0");
  require(in.dt_min > 0.0, "integrator.dt_min", "must be > 0");
  require(in.dt_min <= in.dt_max, "integrator.dt_max", "must be >= dt_min");
  require(in.dt > 0.0, "integrator.dt", "must be > 0");
  require(in.stride > 0.0, "integrator.stride", "must be > 0");
  require(in.event_tol >= 0.0, "integrator.event_tol", "must be >= 0");
  require(cfg.monitor.jacobian_floor > 0.0, "monitor.jacobian_floor", "must be > 0");
  require(cfg.monitor.density_cap_factor > 1.0, "monitor.density_cap_factor", "must be > 1");
  const ParticleSection& p = cfg.particles;
  require(p.dim == 1 || p.dim == 2, "particles.dim", "must be 1 or 2");
  require(p.n >= 1, "particles.n", "must be >= 1");
  auto box = [&](const std::string& name, const std::vector<double>& lo, const std::vector<double>& hi) {
    require(lo.size() == p.dim, "particles." + name + "_lo", "needs one entry per dimension");
    require(hi.size() == p.dim, "particles." + name + "_hi", "needs one entry per dimension");
    for (std::size_t k = 0; k < p.dim; ++k) {
      require(lo[k] < hi[k], "particles." + name + "_lo", "must be below the matching _hi entry");
    }
  };
  box("position", p.position_lo, p.position_hi);
  box("velocity", p.velocity_lo, p.velocity_hi);
  if (p.group2_n > 0) box("group2", p.group2_lo, p.group2_hi);
  require(!p.target_mean || p.target_mean->size() == p.dim, "particles.target_mean",
          "needs one entry per dimension");
  for (double t : cfg.output.snapshots) require(t >= 0.0, "output.snapshots", "times must be >= 0");
}

CommunicationKernel make_kernel(const ExperimentConfig& cfg) {
  return CommunicationKernel{cfg.beta, cfg.constant_psi};
}

std::optional<PotentialSpec> make_potential(const ExperimentConfig& cfg) {
  if (cfg.potential == "quadratic") return Quadratic{cfg.alpha};
  if (cfg.potential == "newtonian") return NewtonianConfined1D{cfg.k, cfg.alpha};
  if (cfg.potential == "power") return PowerLaw{cfg.a, cfg.b};
  if (cfg.potential == "log") return LogQuadratic{};
  if (cfg.potential == "mollified") return MollifiedGaussQuadratic{cfg.eps};
  return std::nullopt;
}

HydroModel make_hydro_model(const ExperimentConfig& cfg) {
  HydroModel m;
  if (cfg.alignment == "cs") m.alignment = HydroAlignment::CS;
  else if (cfg.alignment == "mt") m.alignment = HydroAlignment::MT;
  else if (cfg.alignment == "damping") m.alignment = HydroAlignment::LinearDamping;
  else m.alignment = HydroAlignment::None;
  m.kernel = make_kernel(cfg);
  m.potential = make_potential(cfg);
  m.pressure_eps = cfg.pressure_eps;
  return m;
}

InitProfile make_profile(const ExperimentConfig& cfg) {
  InitProfile p;
  if (cfg.density == "two_group") {
    p.shape = PiecewiseTwoGroup{cfg.mass_ratio};
  } else {
    p.shape = CosineBump{cfg.density_scale};
  }
  p.mass = cfg.mass;
  if (cfg.velocity == "sine") p.velocity = SineC{cfg.c, cfg.velocity_scale};
  else if (cfg.velocity == "linear") p.velocity = LinearC{cfg.c};
  else if (cfg.velocity == "two_group") p.velocity = TwoGroupC{cfg.c};
  else p.velocity = LinearC{0.0};
  p.velocity_offset = cfg.velocity_offset;
  p.floor = cfg.floor;
  return p;
}

Grid make_grid(const ExperimentConfig& cfg) { return build_grid(cfg.grid.n, cfg.grid.xl, cfg.grid.xr); }

IntegratorConfig make_integrator(const ExperimentConfig& cfg) {
  IntegratorConfig ic;
  const IntegratorSection& s = cfg.integrator;
  if (s.method == "rk4") {
    ic.method = Rk4Fixed{s.dt};
  } else {
    ic.method = Rk45Adaptive{s.rtol, s.atol, s.dt_init, s.dt_min, s.dt_max};
  }
  ic.output_stride = s.stride;
  ic.event_tol = s.event_tol;
  return ic;
}

MonitorThresholds make_thresholds(const ExperimentConfig& cfg) {
  MonitorThresholds t;
  t.jacobian_floor = cfg.monitor.jacobian_floor;
  t.density_cap_factor = cfg.monitor.density_cap_factor;
  return t;
}

ParticleModel make_particle_model(const ExperimentConfig& cfg) {
  ParticleModel m;
  if (cfg.alignment == "cs") m.alignment = ParticleAlignment::CS;
  else if (cfg.alignment == "mt") m.alignment = ParticleAlignment::MT;
  else if (cfg.alignment == "none") m.alignment = ParticleAlignment::None;
  else fail(ErrorCode::ValidationError, "key 'alignment': particle runs accept cs, mt or none");
  m.kernel = make_kernel(cfg);
  m.potential = make_potential(cfg);
  m.first_order = cfg.particles.first_order;
  return m;
}

ParticleState make_particle_ic(const ExperimentConfig& cfg) {
  const ParticleSection& p = cfg.particles;
  std::vector<ParticleGroup> groups = {{p.n, Box{p.position_lo, p.position_hi}}};
  if (p.group2_n > 0) groups.push_back({p.group2_n, Box{p.group2_lo, p.group2_hi}});
  ParticleState s = generate_grouped_ic(groups, Box{p.velocity_lo, p.velocity_hi}, p.target_mean, cfg.seed);
  if (p.first_order) s.v.clear();
  return s;
}

}  // namespace swarmhydro

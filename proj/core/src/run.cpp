#include "swarmhydro/run.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <variant>

#include "json.hpp"
#include "swarmhydro/csv.hpp"
#include "swarmhydro/error.hpp"
#include "swarmhydro/steady.hpp"
#include "swarmhydro/thresholds.hpp"

namespace swarmhydro {
namespace {

using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

ordered_json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

ordered_json params_of(const ExperimentConfig& cfg) { return ordered_json::parse(serialize(cfg)); }

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

ordered_json model_of(const ExperimentConfig& cfg) {
  ordered_json m;
  m["kind"] = to_string(cfg.kind);
  m["alignment"] = cfg.alignment;
  m["psi"] = cfg.constant_psi ? "constant" : "(1+x^2)^(-beta/2)";
  m["beta"] = cfg.beta;
  const auto pot = make_potential(cfg);
  m["potential"] = pot ? describe(*pot) : "none";
  m["pressure_eps"] = cfg.pressure_eps ? ordered_json(*cfg.pressure_eps) : ordered_json(nullptr);
  return m;
}

struct HydroSetup {
  Grid grid;
  InitialData data;
  LagrangianState state;
  HydroModel model;
};

HydroSetup hydro_setup(const ExperimentConfig& cfg) {
  HydroSetup s;
  s.grid = make_grid(cfg);
  s.data = init_profiles(make_profile(cfg), s.grid);
  s.state = make_state(s.grid, s.data);
  s.model = make_hydro_model(cfg);
  return s;
}

void write_series(const fs::path& path, const std::vector<HydroDiagnostics>& series) {
  CsvWriter w({"t", "min_jacobian", "max_density", "sup_speed", "support_left", "support_right", "rv_support",
               "momentum", "mass"});
  for (const HydroDiagnostics& d : series) {
    const double row[] = {d.t,           d.min_jacobian,  d.max_density, d.sup_speed, d.support_left,
                          d.support_right, d.rv_support, d.momentum,    d.mass};
    w.row(row);
  }
  write_atomic(path, w.str());
}

void write_snapshot(const fs::path& path, const LagrangianState& s) {
  CsvWriter w({"node_index", "eta", "v", "h"});
  for (std::size_t i = 0; i < s.eta.size(); ++i) {
    const double h = i < s.h.size() ? s.h[i] : 0.0;
    const double row[] = {static_cast<double>(i), s.eta[i], s.v[i], h};
    w.row(row);
  }
  write_atomic(path, w.str());
}

ordered_json interval_json(const HydroRun& r) {
  if (!r.blew_up) return nullptr;
  return ordered_json::array({r.blow_up_lo, r.blow_up_hi});
}

ordered_json hydro_summary(const ExperimentConfig& cfg, const HydroRun& r) {
  ordered_json j;
  j["model"] = model_of(cfg);
  j["params"] = params_of(cfg);
  j["termination"] = r.blew_up ? "BlowUpDetected" : "ReachedEnd";
  j["blow_up_interval"] = interval_json(r);
  if (r.blew_up) {
    j["blow_up_midpoint"] = r.blow_up_mid();
    j["cause"] = to_string(r.cause);
    j["witness_node"] = r.witness_node;
    j["witness_eta"] = num(r.final_state.eta[r.witness_node]);
  }
  j["t_final"] = r.final_state.t;
  j["accepted_steps"] = r.accepted_steps;
  if (!r.series.empty()) {
    const HydroDiagnostics& d = r.series.back();
    j["final"] = {{"min_jacobian", num(d.min_jacobian)}, {"max_density", num(d.max_density)},
                  {"sup_speed", num(d.sup_speed)},       {"rv_support", num(d.rv_support)},
                  {"momentum", num(d.momentum)},         {"mass", num(d.mass)}};
  }
  return j;
}

RunOutcome run_hydro(const ExperimentConfig& cfg, const RunOptions& opt, ordered_json& summary) {
  HydroSetup s = hydro_setup(cfg);
  const HydroRun r =
      simulate_hydro(s.model, s.state, cfg.t_end, make_integrator(cfg), make_thresholds(cfg), cfg.output.snapshots);
  write_series(opt.out_dir / "timeseries.csv", r.series);
  for (std::size_t k = 0; k < r.snapshots.size(); ++k) {
    write_snapshot(opt.out_dir / ("snapshot_" + std::to_string(k) + ".csv"), r.snapshots[k]);
  }
  write_snapshot(opt.out_dir / "final.csv", r.final_state);
  summary = hydro_summary(cfg, r);
  summary["snapshots"] = ordered_json::array();
  for (std::size_t k = 0; k < r.snapshots.size(); ++k) {
    summary["snapshots"].push_back(
        {{"file", "snapshot_" + std::to_string(k) + ".csv"}, {"t", r.snapshots[k].t}});
  }
  return {r.blew_up ? 2 : 0, {}, opt.out_dir / "summary.json"};
}

RunOutcome run_particle(const ExperimentConfig& cfg, const RunOptions& opt, ordered_json& summary) {
  const ParticleModel model = make_particle_model(cfg);
  const ParticleState ic = make_particle_ic(cfg);
  const ParticleRun r = simulate_particles(model, ic, cfg.t_end, make_integrator(cfg));
  const std::size_t n = ic.count();
  const std::size_t d = ic.dim;

  std::vector<std::string> header = {"t"};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < d; ++k) header.push_back("x" + std::to_string(i) + "_" + std::to_string(k));
  if (!model.first_order) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < d; ++k) header.push_back("v" + std::to_string(i) + "_" + std::to_string(k));
  }
  CsvWriter traj(header);
  std::vector<double> row;
  for (const ParticleState& s : r.samples) {
    row.assign(1, s.t);
    row.insert(row.end(), s.x.begin(), s.x.end());
    row.insert(row.end(), s.v.begin(), s.v.end());
    traj.row(row);
  }
  write_atomic(opt.out_dir / "trajectory.csv", traj.str());

  std::vector<std::string> dh = {"t", "Rx", "Rv"};
  for (std::size_t k = 0; k < d; ++k) dh.push_back("mean_v_" + std::to_string(k));
  CsvWriter diag(dh);
  for (const FlockDiagnostics& f : r.diagnostics) {
    row = {f.t, f.Rx, f.Rv};
    for (std::size_t k = 0; k < d; ++k) row.push_back(k < f.mean_velocity.size() ? f.mean_velocity[k] : 0.0);
    diag.row(row);
  }
  write_atomic(opt.out_dir / "diagnostics.csv", diag.str());

  summary["model"] = model_of(cfg);
  summary["params"] = params_of(cfg);
  summary["termination"] = to_string(r.termination);
  summary["blow_up_interval"] = nullptr;
  summary["accepted_steps"] = r.accepted_steps;
  if (!r.diagnostics.empty()) {
    const FlockDiagnostics& a = r.diagnostics.front();
    const FlockDiagnostics& b = r.diagnostics.back();
    summary["initial"] = {{"Rx", a.Rx}, {"Rv", a.Rv}};
    summary["final"] = {{"t", b.t}, {"Rx", b.Rx}, {"Rv", b.Rv}};
  }
  if (model.alignment == ParticleAlignment::CS && !model.potential && !model.first_order) {
    try {
      const EnvelopeReport env = flocking_envelope_check(r.diagnostics, model.kernel);
      summary["envelope"] = {{"R_tilde", env.R_tilde},
                             {"decay_rate", env.decay_rate},
                             {"upper_margin", env.upper_margin},
                             {"lower_margin", env.lower_margin},
                             {"holds", env.holds()}};
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NotApplicable) throw;
      summary["envelope"] = nullptr;
    }
  }
  return {0, {}, opt.out_dir / "summary.json"};
}

bool is_newtonian(const ExperimentConfig& cfg) { return cfg.potential == "newtonian"; }

ordered_json verdict_json(const ExperimentConfig& cfg, const std::string& classifier, const ThresholdVerdict& v) {
  ordered_json j;
  j["region"] = to_string(v.region);
  j["witness_x"] = v.witness_x ? ordered_json(*v.witness_x) : ordered_json(nullptr);
  j["margin"] = num(v.margin);
  j["params"] = params_of(cfg);
  j["classifier"] = classifier;
  j["witness"] = v.witness ? ordered_json(*v.witness) : ordered_json(nullptr);
  return j;
}

std::string pick_classifier(const ExperimentConfig& cfg) {
  if (cfg.classifier != "auto") return cfg.classifier;
  if (cfg.pressure_eps) fail(ErrorCode::NotApplicable, "no critical threshold for the pressure model");
  if (cfg.alignment == "damping") {
    if (is_newtonian(cfg) && cfg.k == -0.5 && cfg.alpha == 1.0) return "damped_newtonian";
    fail(ErrorCode::NotApplicable, "no critical threshold for this damped model");
  }
  if (cfg.alignment != "cs") fail(ErrorCode::NotApplicable, "thresholds need CS alignment or linear damping");
  if (cfg.potential == "none") return "euler_alignment";
  if (is_newtonian(cfg) && cfg.alpha == 0.0) return cfg.constant_psi ? "constant_psi" : "euler_poisson";
  fail(ErrorCode::NotApplicable, "no critical threshold for potential '" + cfg.potential + "'");
}

RunOutcome run_classify(const ExperimentConfig& cfg, const RunOptions& opt) {
  const HydroSetup s = hydro_setup(cfg);
  const std::vector<double> du0 = velocity_gradient(s.data.v0, s.grid);
  const std::string which = pick_classifier(cfg);
  ThresholdVerdict v;
  if (which == "euler_alignment") {
    v = classify_euler_alignment(s.data.rho0, du0, s.model.kernel, s.grid);
  } else if (which == "euler_poisson") {
    v = classify_euler_poisson(s.data.rho0, du0, s.model.kernel, s.grid, cfg.k, cfg.psi_M);
  } else if (which == "constant_psi") {
    v = classify_constant_psi(s.data.rho0, du0, s.grid, cfg.k);
  } else {
    v = classify_damped_newtonian(s.data.rho0, du0, s.grid, s.data.mass);
  }
  const ordered_json j = verdict_json(cfg, which, v);
  const fs::path path = opt.out_dir / "verdict.json";
  write_atomic(path, dump(j));
  return {0, dump(j), path};
}

RunOutcome run_bound(const ExperimentConfig& cfg, const RunOptions& opt) {
  const HydroSetup s = hydro_setup(cfg);
  const std::vector<double> du0 = velocity_gradient(s.data.v0, s.grid);
  std::string which = cfg.bound;
  if (which == "auto") {
    if (cfg.potential == "log") which = "log";
    else if (is_newtonian(cfg)) which = "newtonian";
    else fail(ErrorCode::NotApplicable, "no blow-up bound for potential '" + cfg.potential + "'");
  }
  const BlowUpBound b = which == "log" ? blowup_time_bound_log(s.data.rho0, du0, s.grid, s.data.mass)
                                       : blowup_time_bound_newtonian(s.data.rho0, du0, s.grid);
  ordered_json j;
  j["finite"] = b.finite;
  j["bound"] = b.finite ? num(b.bound) : ordered_json(nullptr);
  j["witness_set_size"] = b.witness_set_size;
  j["bound_kind"] = which;
  j["witness"] = b.witness ? ordered_json(*b.witness) : ordered_json(nullptr);
  if (b.proof_bound) j["proof_bound"] = num(*b.proof_bound);
  j["params"] = params_of(cfg);
  const fs::path path = opt.out_dir / "bound.json";
  write_atomic(path, dump(j));
  return {0, dump(j), path};
}

double center_of_mass(const InitialData& d, const Grid& g) {
  double m = 0.0;
  double mx = 0.0;
  for (std::size_t i = 0; i < g.x.size(); ++i) {
    m += d.rho0[i];
    mx += d.rho0[i] * g.x[i];
  }
  return m > 0.0 ? mx / m : 0.0;
}

double momentum_of(const InitialData& d, const Grid& g) {
  double p = 0.0;
  for (std::size_t i = 0; i < g.x.size(); ++i) p += d.rho0[i] * d.v0[i];
  return p * g.dx;
}

RunOutcome run_steady(const ExperimentConfig& cfg, const RunOptions& opt) {
  const HydroSetup s = hydro_setup(cfg);
  SteadyProfile profile;
  if (cfg.profile == "indicator") {
    profile = indicator_steady(s.data.mass, center_of_mass(s.data, s.grid), momentum_of(s.data, s.grid));
  } else if (cfg.profile == "parabola") {
    profile = parabola_steady(s.data.mass);
  } else {
    profile = semicircle_steady(s.data.mass);
  }
  const HydroRun r = simulate_hydro(s.model, s.state, cfg.t_end, make_integrator(cfg), make_thresholds(cfg), {});
  write_series(opt.out_dir / "timeseries.csv", r.series);
  write_snapshot(opt.out_dir / "final.csv", r.final_state);

  ordered_json j;
  j["profile"] = to_string(profile.kind);
  j["profile_support"] = {profile.left, profile.right};
  j["termination"] = r.blew_up ? "BlowUpDetected" : "ReachedEnd";
  j["t_final"] = r.final_state.t;
  if (r.blew_up) {
    j["l1"] = nullptr;
    j["linf"] = nullptr;
    j["residual"] = nullptr;
  } else {
    const LagrangianState& f = r.final_state;
    const std::vector<double> h = density_reconstruct(f, cfg.monitor.jacobian_floor);
    j["l1"] = num(l1_distance(h, f.eta, profile));
    j["linf"] = num(linf_velocity(f.v));
    const HydroDerivative der = hydro_rhs(f, s.model);
    double res = 0.0;
    for (std::size_t i = 0; i < f.rho0.size(); ++i) {
      if (f.rho0[i] > 0.0) res = std::max(res, std::abs(der.dv[i]));
    }
    j["residual"] = num(res);
  }
  j["mass"] = s.data.mass;
  j["params"] = params_of(cfg);
  const fs::path path = opt.out_dir / "steady.json";
  write_atomic(path, dump(j));
  return {r.blew_up ? 2 : 0, dump(j), path};
}

}  // namespace

fs::path resolve_out_dir(const std::optional<std::string>& flag, const ExperimentConfig& config) {
  if (flag && !flag->empty()) return *flag;
  if (const char* env = std::getenv("SWARMHYDRO_OUT"); env && *env) return env;
  if (!config.out.empty()) return config.out;
  return "out";
}

RunOutcome run(const ExperimentConfig& cfg, const RunOptions& opt) {
  validate(cfg);
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };

  switch (cfg.kind) {
    case ExperimentKind::Threshold:
      return opt.threshold_action == ThresholdAction::Bound ? run_bound(cfg, opt) : run_classify(cfg, opt);
    case ExperimentKind::Steady:
      return run_steady(cfg, opt);
    case ExperimentKind::Particle:
    case ExperimentKind::Hydro: {
      ordered_json summary;
      RunOutcome out = cfg.kind == ExperimentKind::Hydro ? run_hydro(cfg, opt, summary)
                                                         : run_particle(cfg, opt, summary);
      if (opt.timing) summary["wall_time"] = elapsed();
      out.json = dump(summary);
      write_atomic(out.artifact, out.json);
      return out;
    }
  }
  fail(ErrorCode::ValidationError, "unknown experiment kind");
}

std::string error_json(const std::exception& error) {
  ordered_json j;
  const auto* e = dynamic_cast<const Error*>(&error);
  j["error"] = {{"code", e ? std::string(to_string(e->code())) : std::string("InternalError")},
                {"message", error.what()}};
  return j.dump() + "\n";
}

}  // namespace swarmhydro

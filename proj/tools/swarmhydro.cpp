#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <sys/wait.h>

#include "CLI11.hpp"
#include "swarmhydro/config.hpp"
#include "swarmhydro/csv.hpp"
#include "swarmhydro/error.hpp"
#include "swarmhydro/presets.hpp"
#include "swarmhydro/run.hpp"

namespace sh = swarmhydro;

namespace {

struct CommonArgs {
  std::string config_path;
  std::string preset_name;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n;
  std::optional<double> t_end;
  bool timing = false;
};

void add_common(CLI::App* app, CommonArgs& a) {
  app->add_option("--config", a.config_path, "JSON config file");
  app->add_option("--preset", a.preset_name, "Named experiment preset");
  app->add_option("--out", a.out, "Output directory");
  app->add_option("--seed", a.seed, "Random seed for particle initial data");
  app->add_option("--n", a.n, "Grid nodes (hydro) or particle count");
  app->add_option("--t-end", a.t_end, "Final time");
  app->add_flag("--timing", a.timing, "Record wall-clock time in the summary");
}

sh::ExperimentConfig load(const CommonArgs& a) {
  if (!a.config_path.empty() && !a.preset_name.empty()) {
    sh::fail(sh::ErrorCode::ValidationError, "use either --config or --preset, or a \"preset\" key in the config");
  }
  sh::ExperimentConfig cfg;
  if (!a.config_path.empty()) {
    cfg = sh::parse_config(sh::read_file(a.config_path));
  } else if (!a.preset_name.empty()) {
    cfg = sh::preset(a.preset_name);
  } else {
    sh::fail(sh::ErrorCode::ValidationError, "one of --config or --preset is required");
  }
  if (a.seed) cfg.seed = *a.seed;
  if (a.t_end) cfg.t_end = *a.t_end;
  if (a.n) {
    if (cfg.kind == sh::ExperimentKind::Particle) cfg.particles.n = *a.n;
    else cfg.grid.n = *a.n;
  }
  return cfg;
}

int execute(const CommonArgs& a, std::optional<sh::ExperimentKind> want, sh::ThresholdAction action) {
  sh::ExperimentConfig cfg = load(a);
  if (want) {
    const bool particle_cfg = cfg.kind == sh::ExperimentKind::Particle;
    const bool particle_cmd = *want == sh::ExperimentKind::Particle;
    if (particle_cfg != particle_cmd) {
      sh::fail(sh::ErrorCode::ValidationError, std::string("config kind '") + sh::to_string(cfg.kind) +
                                                   "' does not match this command");
    }
    cfg.kind = *want;
  }
  sh::RunOptions opt;
  opt.out_dir = sh::resolve_out_dir(a.out.empty() ? std::nullopt : std::optional<std::string>(a.out), cfg);
  opt.timing = a.timing;
  opt.threshold_action = action;
  const sh::RunOutcome r = sh::run(cfg, opt);
  std::cout << r.json;
  return r.exit_code;
}

std::string quote(const std::string& s) {
  std::string q = "'";
  for (char ch : s) {
    if (ch == '\'') q += "'\\''";
    else q += ch;
  }
  return q + "'";
}

std::string command_for(const sh::ExperimentConfig& cfg) {
  switch (cfg.kind) {
    case sh::ExperimentKind::Particle: return "particle run";
    case sh::ExperimentKind::Hydro: return "hydro run";
    case sh::ExperimentKind::Threshold: return "threshold classify";
    case sh::ExperimentKind::Steady: return "steady compare";
  }
  return "hydro run";
}

int sweep(const std::string& self, std::vector<std::string> names, std::string out, unsigned jobs,
          const std::string& extra) {
  if (names.empty()) {
    for (const sh::PresetInfo& p : sh::preset_catalog()) names.push_back(p.name);
  }
  if (out.empty()) {
    const sh::ExperimentConfig none;
    out = sh::resolve_out_dir(std::nullopt, none).string();
  }
  std::vector<std::string> commands;
  for (const std::string& name : names) {
    const sh::ExperimentConfig cfg = sh::preset(name);
    const std::string dir = (std::filesystem::path(out) / name).string();
    commands.push_back(quote(self) + " " + command_for(cfg) + " --preset " + quote(name) + " --out " +
                       quote(dir) + extra + " > /dev/null");
  }
  std::vector<int> codes(commands.size(), 0);
  std::atomic<std::size_t> next{0};
  std::mutex io;
  auto worker = [&] {
    for (std::size_t i = next++; i < commands.size(); i = next++) {
      const int status = std::system(commands[i].c_str());
      codes[i] = status == -1 ? 1 : WEXITSTATUS(status);
      std::lock_guard<std::mutex> lock(io);
      std::cout << names[i] << " exit=" << codes[i] << "\n";
    }
  };
  std::vector<std::thread> pool;
  for (unsigned k = 0; k < std::max(1u, jobs); ++k) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  for (int c : codes) {
    if (c == 1 || c > 2) return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Flocking particle and hydrodynamic simulations"};
  app.require_subcommand(1);

  CommonArgs particle_args, hydro_args, classify_args, bound_args, steady_args;

  CLI::App* particle = app.add_subcommand("particle", "Particle models");
  particle->require_subcommand(1);
  CLI::App* particle_run = particle->add_subcommand("run", "Simulate a particle system");
  add_common(particle_run, particle_args);

  CLI::App* hydro = app.add_subcommand("hydro", "Lagrangian hydrodynamics");
  hydro->require_subcommand(1);
  CLI::App* hydro_run = hydro->add_subcommand("run", "Simulate until t_end or blow-up");
  add_common(hydro_run, hydro_args);

  CLI::App* threshold = app.add_subcommand("threshold", "Critical thresholds and blow-up bounds");
  threshold->require_subcommand(1);
  CLI::App* classify = threshold->add_subcommand("classify", "Classify the initial data");
  add_common(classify, classify_args);
  CLI::App* bound = threshold->add_subcommand("bound", "Upper bound on the blow-up time");
  add_common(bound, bound_args);

  CLI::App* steady = app.add_subcommand("steady", "Steady states");
  steady->require_subcommand(1);
  CLI::App* compare = steady->add_subcommand("compare", "Run and compare with the steady profile");
  add_common(compare, steady_args);

  CLI::App* presets = app.add_subcommand("preset", "Preset catalog");
  presets->require_subcommand(1);
  CLI::App* list = presets->add_subcommand("list", "List presets");

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Run presets in parallel processes");
  std::vector<std::string> sweep_names;
  std::string sweep_out;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  std::optional<std::size_t> sweep_n;
  std::optional<double> sweep_t_end;
  sweep_cmd->add_option("--preset", sweep_names, "Preset names (default: all)");
  sweep_cmd->add_option("--out", sweep_out, "Base output directory");
  sweep_cmd->add_option("--jobs,-j", jobs, "Parallel processes");
  sweep_cmd->add_option("--n", sweep_n, "Override grid nodes or particle count");
  sweep_cmd->add_option("--t-end", sweep_t_end, "Override final time");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*particle_run) return execute(particle_args, sh::ExperimentKind::Particle, sh::ThresholdAction::Classify);
    if (*hydro_run) return execute(hydro_args, sh::ExperimentKind::Hydro, sh::ThresholdAction::Classify);
    if (*classify) return execute(classify_args, sh::ExperimentKind::Threshold, sh::ThresholdAction::Classify);
    if (*bound) return execute(bound_args, sh::ExperimentKind::Threshold, sh::ThresholdAction::Bound);
    if (*compare) return execute(steady_args, sh::ExperimentKind::Steady, sh::ThresholdAction::Classify);
    if (*list) {
      for (const sh::PresetInfo& p : sh::preset_catalog()) std::cout << p.name << "\t" << p.description << "\n";
      return 0;
    }
    if (*sweep_cmd) {
      std::string extra;
      if (sweep_n) extra += " --n " + std::to_string(*sweep_n);
      if (sweep_t_end) extra += " --t-end " + sh::format_double(*sweep_t_end);
      return sweep(argv[0], sweep_names, sweep_out, jobs, extra);
    }
  } catch (const std::exception& e) {
    std::cerr << sh::error_json(e);
    return 1;
  }
  return 1;
}

// anholonome: simulate, reduce and verify the built-in constrained systems.

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "anholonome/config.hpp"
#include "anholonome/csv.hpp"
#include "anholonome/errors.hpp"
#include "anholonome/verify.hpp"
#include "anholonome/version.hpp"
#include "anholonome/zoo.hpp"

namespace {

using namespace anholonome;

enum ExitCode : int { kOk = 0, kVerifyFailed = 1, kBadInput = 2, kDynamicsFailure = 3, kCrosscheckFailed = 4 };

constexpr double kDefaultCrosscheckTol = 1e-6;

struct RunArgs {
  std::string system;
  std::string config;
  std::vector<std::string> params;
  double h = 1e-3;
  double t_final = 5.0;
  std::string method = "rk4";
  std::string out;
  std::map<std::string, double> coords;
  std::map<std::string, double> velocities;
  std::map<std::string, CLI::Option*> coord_opts;
  std::map<std::string, CLI::Option*> velocity_opts;
  CLI::Option* system_opt = nullptr;
  CLI::Option* h_opt = nullptr;
  CLI::Option* t_opt = nullptr;
  CLI::Option* method_opt = nullptr;
  CLI::Option* out_opt = nullptr;
  // reduce only
  bool routh = false;
  std::vector<double> mu;
  bool crosscheck = false;
  double tol = kDefaultCrosscheckTol;
  CLI::Option* routh_opt = nullptr;
  CLI::Option* mu_opt = nullptr;
  CLI::Option* crosscheck_opt = nullptr;
};

/// Union over the zoo so every system's state can be set from the command line.
void collect_labels(std::set<std::string>& coords, std::set<std::string>& velocities) {
  for (const auto& spec : zoo()) {
    const BuiltSystem b = build_system(spec);
    for (const auto& c : b.system.coord_labels()) coords.insert(c);
    for (const auto& v : velocity_labels(b.system)) velocities.insert(v);
  }
}

ParameterMap parse_params(const std::vector<std::string>& items) {
  ParameterMap out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--param expects name=value, got '" + item + "'");
    const std::string value = item.substr(eq + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != value.size()) throw ConfigError("--param value '" + value + "' is not a number");
    out[item.substr(0, eq)] = v;
  }
  return out;
}

void add_run_options(CLI::App* app, RunArgs& a, const std::set<std::string>& coords,
                     const std::set<std::string>& velocities) {
  a.system_opt = app->add_option("--system", a.system, "system name (see list-systems)");
  app->add_option("--config", a.config, "JSON scenario file; flags override its values");
  app->add_option("--param", a.params, "system parameter as name=value (repeatable)");
  a.h_opt = app->add_option("--h", a.h, "step size");
  a.t_opt = app->add_option("--T", a.t_final, "final time");
  a.method_opt = app->add_option("--method", a.method, "rk4 or euler");
  a.out_opt = app->add_option("--out", a.out, "CSV output path (default: standard output)");
  for (const auto& c : coords) {
    a.coord_opts[c] = app->add_option("--" + c + "0", a.coords[c], "initial coordinate " + c);
  }
  for (const auto& v : velocities) {
    a.velocity_opts[v] = app->add_option("--v" + v + "0", a.velocities[v], "initial quasi-velocity v_" + v);
  }
}

RunConfig make_config(const RunArgs& a) {
  RunConfig cfg;
  if (!a.config.empty()) cfg = load_run_config(a.config);
  if (a.system_opt->count()) cfg.system = a.system;
  if (!a.params.empty()) {
    for (const auto& [k, v] : parse_params(a.params)) cfg.parameters[k] = v;
  }
  if (a.h_opt->count()) cfg.h = a.h;
  if (a.t_opt->count()) cfg.t_final = a.t_final;
  if (a.method_opt->count()) {
    try {
      cfg.method = parse_method(a.method);
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
  }
  if (a.out_opt->count()) cfg.out = a.out;
  for (const auto& [label, opt] : a.coord_opts)
    if (opt->count()) cfg.coords[label] = a.coords.at(label);
  for (const auto& [label, opt] : a.velocity_opts)
    if (opt->count()) cfg.velocities[label] = a.velocities.at(label);
  if (a.routh_opt != nullptr && a.routh_opt->count()) cfg.routh = true;
  if (a.crosscheck_opt != nullptr && a.crosscheck_opt->count()) cfg.crosscheck = true;
  if (a.mu_opt != nullptr && a.mu_opt->count()) cfg.mu = a.mu;
  validate(cfg);
  return cfg;
}

const SystemSpec& require_system(const std::string& name) {
  const SystemSpec* spec = find_system(name);
  if (spec == nullptr) throw ConfigError("unknown system '" + name + "'; available: " + system_names());
  return *spec;
}

/// CSV goes to the file or standard output; the summary then goes to the
/// other stream so piping stays clean.
struct Sinks {
  std::ofstream file;
  std::ostream* csv = &std::cout;
  std::ostream* summary = &std::cerr;

  explicit Sinks(const std::string& path) {
    if (path.empty()) return;
    file.open(path);
    if (!file) throw ConfigError("cannot write '" + path + "'");
    csv = &file;
    summary = &std::cout;
  }
};

void write_metadata(CsvWriter& csv, const RunConfig& cfg, const ParameterMap& params, bool reduced) {
  csv.comment("system", cfg.system);
  csv.comment("version", kVersion);
  for (const auto& [k, v] : params) csv.comment("param." + k, format_double(v));
  csv.comment("h", format_double(cfg.h));
  csv.comment("T", format_double(cfg.t_final));
  csv.comment("method", method_name(cfg.method));
  csv.comment("reduced", reduced ? "true" : "false");
}

std::string join(const Eigen::VectorXd& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_double(v[i]);
  return out;
}

int run_simulate(const RunArgs& args) {
  const RunConfig cfg = make_config(args);
  const SystemSpec& spec = require_system(cfg.system);
  const ParameterMap params = resolve_parameters(spec, cfg.parameters);
  const BuiltSystem built = build_system(spec, cfg.parameters);
  const CState s0 = initial_state(built, cfg);
  const Trajectory traj = integrate(built.system, s0, cfg.h, cfg.t_final, cfg.method);

  Sinks sinks(cfg.out);
  CsvWriter csv(*sinks.csv);
  write_metadata(csv, cfg, params, false);
  std::vector<std::string> header{"t"};
  for (const auto& c : built.system.coord_labels()) header.push_back(c);
  for (const auto& v : velocity_labels(built.system)) header.push_back("v_" + v);
  header.push_back("E");
  for (const auto& p : traj.momentum_labels) header.push_back(p);
  header.push_back("res_constraint");
  csv.header(header);

  double energy_drift = 0.0, momentum_drift = 0.0;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const CState& s = traj.states[i];
    std::vector<double> row{traj.times[i]};
    row.insert(row.end(), s.x.coords.data(), s.x.coords.data() + s.x.coords.size());
    row.insert(row.end(), s.v.data(), s.v.data() + s.v.size());
    row.push_back(traj.energy[i]);
    const Eigen::VectorXd& p = traj.momenta[i];
    row.insert(row.end(), p.data(), p.data() + p.size());
    row.push_back(traj.constraint_residual[i]);
    csv.row(row);
    energy_drift = std::max(energy_drift, std::abs(traj.energy[i] - traj.energy.front()));
    if (p.size() > 0) momentum_drift = std::max(momentum_drift, (p - traj.momenta.front()).cwiseAbs().maxCoeff());
  }

  const CState& last = traj.states.back();
  *sinks.summary << "final t=" << format_double(traj.times.back()) << " x=[" << join(last.x.coords) << "] v=["
                 << join(last.v) << "]\n"
                 << "max energy drift " << format_double(energy_drift) << "\n"
                 << "max momentum drift " << format_double(momentum_drift) << "\n";
  return kOk;
}

int run_reduce(const RunArgs& args) {
  const RunConfig cfg = make_config(args);
  const SystemSpec& spec = require_system(cfg.system);
  const ParameterMap params = resolve_parameters(spec, cfg.parameters);
  const BuiltSystem built = build_system(spec, cfg.parameters);
  if (!built.split) throw ConfigError("system '" + cfg.system + "' declares no symmetry split");
  const InvariantFrameSplit& split = *built.split;
  const ConstrainedSystem& sys = built.system;
  const CState s0 = initial_state(built, cfg);

  Sinks sinks(cfg.out);
  CsvWriter csv(*sinks.csv);
  write_metadata(csv, cfg, params, true);
  std::optional<double> gap;

  if (cfg.routh) {
    if (!built.horizontal) throw ConfigError("system '" + cfg.system + "' declares no horizontal symmetries");
    const HorizontalSymmetryModel& model = *built.horizontal;
    MomentumLevel mu{level_momenta(model, s0)};
    if (cfg.mu) {
      if (static_cast<int>(cfg.mu->size()) != model.h_dim()) {
        throw ConfigError("--mu expects " + std::to_string(model.h_dim()) + " value(s)");
      }
      mu.mu = Eigen::Map<const Eigen::VectorXd>(cfg.mu->data(), model.h_dim());
    }
    const RouthState r0 = project_to_level(model, s0);
    const RouthTrajectory traj = integrate_routh(model, mu, r0, cfg.h, cfg.t_final, cfg.method);

    csv.comment("routh", "true");
    csv.comment("mu", join(mu.mu));
    std::vector<std::string> header{"t"};
    for (const auto& c : sys.coord_labels()) header.push_back(c);
    for (int i : split.blocks().kappa) header.push_back("v_" + sys.frame().field(i).label());
    header.push_back("R");
    csv.header(header);
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
      const RouthState& s = traj.states[i];
      std::vector<double> row{traj.times[i]};
      row.insert(row.end(), s.x.coords.data(), s.x.coords.data() + s.x.coords.size());
      row.insert(row.end(), s.v_kappa.data(), s.v_kappa.data() + s.v_kappa.size());
      row.push_back(traj.routhian[i]);
      csv.row(row);
    }
    if (cfg.crosscheck) {
      const Trajectory full = integrate(sys, lift_to_constraint(model, mu, r0), cfg.h, cfg.t_final, cfg.method);
      gap = routh_projection_gap(model, full, traj);
    }
  } else {
    const ReducedState r0 = project_state(split, s0);
    const ReducedTrajectory traj = integrate_reduced(split, r0, cfg.h, cfg.t_final, cfg.method);
    std::vector<std::string> header{"t"};
    for (int c : split.trivialization().base_coords) header.push_back(sys.coord_labels()[c]);
    for (int i : split.blocks().rho) header.push_back("v_" + sys.frame().field(i).label());
    for (int i : split.blocks().kappa) header.push_back("v_" + sys.frame().field(i).label());
    header.push_back("E");
    for (int i : split.blocks().rho) header.push_back("P_" + sys.frame().field(i).label());
    csv.header(header);
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
      const ReducedState& s = traj.states[i];
      std::vector<double> row{traj.times[i]};
      row.insert(row.end(), s.base.data(), s.base.data() + s.base.size());
      row.insert(row.end(), s.v_rho.data(), s.v_rho.data() + s.v_rho.size());
      row.insert(row.end(), s.v_kappa.data(), s.v_kappa.data() + s.v_kappa.size());
      row.push_back(traj.energy[i]);
      row.insert(row.end(), traj.momenta[i].data(), traj.momenta[i].data() + traj.momenta[i].size());
      csv.row(row);
    }
    if (cfg.crosscheck) {
      const Trajectory full = integrate(sys, s0, cfg.h, cfg.t_final, cfg.method);
      gap = projection_gap(split, full, traj);
    }
  }

  if (gap) {
    const bool ok = *gap <= args.tol;
    *sinks.summary << "crosscheck gap " << format_double(*gap) << " (tol " << format_double(args.tol) << ") "
                   << (ok ? "ok" : "FAILED") << "\n";
    if (!ok) return kCrosscheckFailed;
  }
  return kOk;
}

int run_verify(const std::string& system, bool all, std::uint64_t seed, std::optional<double> tol,
               const std::vector<std::string>& params, const std::string& out_path) {
  if (all == !system.empty()) throw ConfigError("verify needs exactly one of --system or --all");
  VerifyOptions options{seed, tol};
  std::vector<SystemReport> reports;
  if (all) {
    if (!params.empty()) throw ConfigError("--param applies to a single --system");
    std::vector<const SystemSpec*> specs;
    for (const auto& s : zoo()) specs.push_back(&s);
    reports = verify_systems(specs, options, true);
  } else {
    reports.push_back(verify_system(require_system(system), options, parse_params(params)));
  }
  Sinks sinks(out_path);
  write_report(*sinks.csv, reports, options);
  for (const auto& r : reports)
    if (!r.pass()) return kVerifyFailed;
  return kOk;
}

int run_list() {
  for (const auto& spec : zoo()) {
    const BuiltSystem b = build_system(spec);
    std::cout << spec.name << "\n  " << spec.description << "\n  coordinates:";
    for (const auto& c : b.system.coord_labels()) std::cout << ' ' << c;
    std::cout << "\n  velocities:";
    for (const auto& v : velocity_labels(b.system)) std::cout << " v_" << v;
    std::cout << "\n  symmetry split: " << (b.split ? "yes" : "no")
              << ", horizontal symmetries: " << (b.horizontal ? "yes" : "no") << "\n";
    for (const auto& p : spec.parameters) {
      std::cout << "  --param " << p.name << "=" << format_double(p.default_value) << " [" << p.unit << "] "
                << p.description << "\n";
    }
  }
  return kOk;
}

int run(int argc, char** argv) {
  CLI::App app{"Constrained Lagrangian dynamics in anholonomic frames, with symmetry and Routh reduction"};
  app.set_help_flag("--help", "print help and exit");
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::set<std::string> coords, velocities;
  collect_labels(coords, velocities);

  RunArgs sim_args, red_args;
  CLI::App* sim = app.add_subcommand("simulate", "integrate the constrained dynamics and write a trajectory CSV");
  add_run_options(sim, sim_args, coords, velocities);

  CLI::App* red = app.add_subcommand("reduce", "integrate the reduced or Routh equations");
  add_run_options(red, red_args, coords, velocities);
  red_args.routh_opt = red->add_flag("--routh", red_args.routh, "Routh equations on a momentum level set");
  red_args.mu_opt = red->add_option("--mu", red_args.mu, "momentum level (comma separated)")->delimiter(',');
  red_args.crosscheck_opt = red->add_flag("--crosscheck", red_args.crosscheck, "compare with a projected full run");
  red->add_option("--tol", red_args.tol, "crosscheck tolerance");

  std::string verify_system_name, verify_out;
  bool verify_all = false;
  std::uint64_t seed = default_seed();
  std::optional<double> verify_tol;
  std::vector<std::string> verify_params;
  CLI::App* ver = app.add_subcommand("verify", "run the invariant suites and print a pass/fail table");
  ver->add_option("--system", verify_system_name, "system name");
  ver->add_flag("--all", verify_all, "verify every built-in system");
  ver->add_option("--seed", seed, "PRNG seed (default: ANHOLONOME_SEED or 7)");
  ver->add_option("--tol", verify_tol, "override every check's tolerance");
  ver->add_option("--param", verify_params, "system parameter as name=value (repeatable)");
  ver->add_option("--out", verify_out, "report path (default: standard output)");

  CLI::App* list = app.add_subcommand("list-systems", "describe the built-in systems");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kBadInput;
  }

  if (sim->parsed()) return run_simulate(sim_args);
  if (red->parsed()) return run_reduce(red_args);
  if (ver->parsed()) return run_verify(verify_system_name, verify_all, seed, verify_tol, verify_params, verify_out);
  if (list->parsed()) return run_list();
  std::cerr << app.help();
  return kBadInput;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const DynamicsError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDynamicsFailure;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadInput;
  } catch (const InvalidModelError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadInput;
  } catch (const anholonome::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDynamicsFailure;
  }
}

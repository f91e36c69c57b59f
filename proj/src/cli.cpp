#include "msdiff/cli.hpp"

#include "msdiff/config.hpp"
#include "msdiff/mskernel.hpp"
#include "msdiff/property_suite.hpp"
#include "msdiff/thermo.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>

namespace msdiff::cli {

namespace {

using nlohmann::json;

json to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

const ProbePoint& require_probe(const RunConfig& cfg, bool need_gradients) {
  if (!cfg.probe) throw Error(ErrorCode::ConfigError, "/probe: missing required key");
  if (need_gradients && !cfg.probe->gradients) throw Error(ErrorCode::ConfigError, "/probe/gradients: missing required key");
  return *cfg.probe;
}

int cmd_spectrum(const RunConfig& cfg, std::uint64_t seed, std::ostream& out) {
  const auto& probe = require_probe(cfg, false);
  const auto report = spectrum(probe.composition, cfg.mixture.dmat);
  json record{{"command", "spectrum"},
              {"seed", seed},
              {"composition", to_json(probe.composition)},
              {"eigenvalues", to_json(report.eigenvalues)},
              {"delta", report.delta},
              {"gap_ok", report.gap_ok}};
  out << record.dump() << '\n';
  return report.gap_ok ? 0 : static_cast<int>(ExitCode::Failure);
}

int cmd_fluxes(const RunConfig& cfg, std::uint64_t seed, std::ostream& out) {
  const auto& probe = require_probe(cfg, true);
  const Composition comp{probe.composition, probe.c_tot};
  const auto force = driving_force(cfg.mixture.thermo, floor_composition(comp.x), *probe.gradients);
  const auto invariant = solve_fluxes_invariant(comp, cfg.mixture.dmat, force).J;
  const auto reduced = solve_fluxes_reduced(comp, cfg.mixture.dmat, force).J;
  const double scale = std::max(invariant.norm(), reduced.norm());
  const double agreement = scale == 0.0 ? 0.0 : (invariant - reduced).norm() / scale;
  json record{{"command", "fluxes"},
              {"seed", seed},
              {"composition", to_json(comp.x)},
              {"c_tot", comp.c_tot},
              {"gradients", to_json(*probe.gradients)},
              {"driving_force", to_json(force.d)},
              {"J_invariant", to_json(invariant)},
              {"J_reduced", to_json(reduced)},
              {"relative_difference", agreement},
              {"agree", agreement <= 1e-10}};
  out << record.dump() << '\n';
  return agreement <= 1e-10 ? 0 : static_cast<int>(ExitCode::Failure);
}

std::vector<LedgerRow> raw_rows(const Trajectory& traj) {
  std::vector<LedgerRow> rows;
  for (const auto& cp : traj.checkpoints) {
    const auto& s = traj.samples[cp.sample];
    rows.push_back({s.time, s.V, s.W, std::numeric_limits<double>::quiet_NaN(), s.min_concentration, s.masses});
  }
  return rows;
}

int cmd_simulate(const RunConfig& cfg, std::uint64_t seed, const std::filesystem::path& out_dir, std::ostream& out) {
  const Field initial = initial_field(cfg);
  const Trajectory traj = simulate(initial, cfg.mixture, cfg.reactions, cfg.sim);

  std::filesystem::create_directories(out_dir);
  const auto traj_path = out_dir / cfg.trajectory_file;
  const auto ledger_path = out_dir / cfg.ledger_file;

  std::string ledger_status;
  std::vector<LedgerRow> rows;
  try {
    const auto ledger = entropy_ledger(traj, cfg.mixture.thermo);
    rows = ledger.rows;
    ledger_status = ledger.ok() ? "ok" : "violation at t = " + std::to_string(ledger.violation->time) + ": " +
                                             ledger.violation->what;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateComposition) throw;
    rows = raw_rows(traj);
    ledger_status = std::string("unavailable: ") + e.what();
  }

  {
    std::ofstream file(traj_path);
    if (!file) throw Error(ErrorCode::ConfigError, "cannot write " + traj_path.string());
    write_trajectory_csv(file, traj, seed);
  }
  {
    std::ofstream file(ledger_path);
    if (!file) throw Error(ErrorCode::ConfigError, "cannot write " + ledger_path.string());
    write_ledger_csv(file, rows, traj.names, seed);
  }

  json summary{{"command", "simulate"},
               {"seed", seed},
               {"steps", traj.steps},
               {"t_end", traj.samples.back().time},
               {"checkpoints", traj.checkpoints.size()},
               {"min_concentration", traj.samples.back().min_concentration},
               {"ledger", ledger_status},
               {"trajectory_csv", traj_path.string()},
               {"ledger_csv", ledger_path.string()}};
  out << summary.dump() << '\n';
  return 0;
}

int cmd_verify(const RunConfig& cfg, std::uint64_t seed, std::ostream& out) {
  const auto rows = run_property_suite(cfg.mixture, seed, cfg.verify_samples);
  out << "# msdiff verify seed=" << seed << " samples=" << cfg.verify_samples << '\n';
  bool failed = false;
  bool nonconvex = false;
  for (const auto& row : rows) {
    out << std::left << std::setw(6) << to_string(row.status) << std::setw(26) << row.name << row.detail << '\n';
    failed = failed || row.status == SuiteStatus::Fail;
    nonconvex = nonconvex || row.status == SuiteStatus::ExpectedFailure;
  }
  if (failed) return static_cast<int>(ExitCode::Failure);
  if (nonconvex) return static_cast<int>(ExitCode::ConvexityFailure);
  return 0;
}

}  // namespace

ExitCode exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigError:
    case ErrorCode::BadDimension:
    case ErrorCode::AsymmetricD:
    case ErrorCode::NonPositiveD:
    case ErrorCode::InvalidReaction:
    case ErrorCode::NegativeConcentration:
    case ErrorCode::NonPositiveTotal: return ExitCode::ConfigError;
    case ErrorCode::PositivityViolation: return ExitCode::PositivityViolation;
    case ErrorCode::NotConvex: return ExitCode::ConvexityFailure;
    case ErrorCode::MaxStepsExceeded: return ExitCode::StepLimit;
    default: return ExitCode::Failure;
  }
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory, std::uint64_t seed) {
  out << "# msdiff trajectory seed=" << seed << '\n';
  out << "time,cell_index,cell_center,species_name,concentration\n";
  out << std::setprecision(17);
  for (const auto& cp : trajectory.checkpoints) {
    const auto& f = cp.field;
    for (Index i = 0; i < f.cells(); ++i) {
      for (Index k = 0; k < f.species(); ++k) {
        const std::string name =
            k < static_cast<Index>(trajectory.names.size()) ? trajectory.names[static_cast<std::size_t>(k)]
                                                             : "s" + std::to_string(k);
        out << f.time << ',' << i << ',' << f.grid.center(i) << ',' << name << ',' << f.c(i, k) << '\n';
      }
    }
  }
}

void write_ledger_csv(std::ostream& out, const std::vector<LedgerRow>& rows, const std::vector<std::string>& names,
                      std::uint64_t seed) {
  out << "# msdiff ledger seed=" << seed << '\n';
  out << "time,V,W,cumulative_W,min_concentration";
  for (const auto& name : names) out << ",mass_" << name;
  out << '\n' << std::setprecision(17);
  for (const auto& r : rows) {
    out << r.time << ',' << r.V << ',' << r.W << ',' << r.cumulative_W << ',' << r.min_concentration;
    for (Index k = 0; k < r.masses.size(); ++k) out << ',' << r.masses[k];
    out << '\n';
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Maxwell-Stefan multicomponent diffusion toolkit", "msdiff"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Run configuration (JSON)")->required();
    sub->add_option("--seed", seed, "Override the configured random seed");
  };
  auto* spectrum_cmd = app.add_subcommand("spectrum", "Eigenvalues of A(x) and the spectral-gap check at /probe");
  auto* fluxes_cmd = app.add_subcommand("fluxes", "Fluxes at /probe by the invariant and reduced routes");
  auto* simulate_cmd = app.add_subcommand("simulate", "Run the 1-D simulation and write CSV output");
  auto* verify_cmd = app.add_subcommand("verify", "Run the property suite for the configured mixture");
  for (auto* sub : {spectrum_cmd, fluxes_cmd, simulate_cmd, verify_cmd}) add_common(sub);
  simulate_cmd->add_option("--out", out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::ConfigError);
  }

  try {
    const RunConfig cfg = load_config(config_path);
    const std::uint64_t used_seed = seed.value_or(cfg.seed);
    if (*spectrum_cmd) return cmd_spectrum(cfg, used_seed, out);
    if (*fluxes_cmd) return cmd_fluxes(cfg, used_seed, out);
    if (*simulate_cmd) return cmd_simulate(cfg, used_seed, out_dir, out);
    return cmd_verify(cfg, used_seed, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(exit_code_for(e.code()));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::Failure);
  }
}

}  // namespace msdiff::cli

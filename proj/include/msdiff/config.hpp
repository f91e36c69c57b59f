#pragma once

// Run configuration: a JSON document with a closed set of keys.

#include "msdiff/mixture.hpp"
#include "msdiff/solver.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace msdiff {

struct InitialProfile {
  enum class Kind { Uniform, Step, Cosine, Cells };

  Kind kind{Kind::Uniform};
  double c_tot{1.0};
  Eigen::VectorXd x;          ///< uniform: x; step: left state; cosine: mean
  Eigen::VectorXd other;      ///< step: right state; cosine: amplitude (zero sum)
  double split{0.5};          ///< step: interface position as a fraction of L
  int mode{1};                ///< cosine: number of half-waves
  Eigen::MatrixXd cells;      ///< cells: per-cell mole fractions
};

struct ProbePoint {
  Eigen::VectorXd composition;
  double c_tot{1.0};
  std::optional<Eigen::VectorXd> gradients;
};

struct RunConfig {
  MixtureSpec mixture;
  Grid1D grid{100, 1.0};
  InitialProfile initial;
  ReactionNetwork reactions;
  SimConfig sim;
  std::optional<ProbePoint> probe;
  std::uint64_t seed{20240611};
  std::size_t verify_samples{200};
  std::string trajectory_file{"trajectory.csv"};
  std::string ledger_file{"ledger.csv"};
};

/// Parses a configuration document. Throws Error(ConfigError) naming the line
/// for syntax errors and the JSON path for schema errors.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Mole fractions per cell times c_tot.
Field initial_field(const RunConfig& config);

}  // namespace msdiff

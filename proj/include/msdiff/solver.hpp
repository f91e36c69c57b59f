#pragma once

// 1-D finite-volume solver for d_t c + d_y J = r with zero-flux boundaries,
// Maxwell-Stefan fluxes and mass-action reactions, explicit Euler in time.

#include "msdiff/mixture.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace msdiff {

struct Grid1D {
  Index ncells{0};
  double length{1.0};

  double h() const { return length / static_cast<double>(ncells); }
  double center(Index cell) const { return (static_cast<double>(cell) + 0.5) * h(); }
};

/// Cell concentrations, one row per cell and one column per species.
struct Field {
  Eigen::MatrixXd c;
  Grid1D grid;
  double time{0.0};

  Index cells() const { return c.rows(); }
  Index species() const { return c.cols(); }
  Eigen::VectorXd cell(Index i) const { return c.row(i).transpose(); }
};

/// Builds a field and checks the grid shape, nonnegativity and constant
/// per-cell total (1e-8 relative).
Field make_field(const Grid1D& grid, Eigen::MatrixXd concentrations, double time = 0.0);

struct StoichTerm {
  Index species{0};
  int coefficient{1};
};

/// Irreversible mass-action reaction: rate = k * prod_j c_j^{nu_j} over reactants.
struct Reaction {
  std::vector<StoichTerm> reactants;
  std::vector<StoichTerm> products;
  double rate_constant{0.0};
};

/// Mole-conserving mass-action network. Quasi-positive by construction: a
/// species can only be consumed by reactions in which it is a reactant.
class ReactionNetwork {
 public:
  ReactionNetwork() = default;
  ReactionNetwork(std::vector<Reaction> reactions, Index species);

  /// Adds k_f for reactants -> products and, when k_b > 0, the reverse reaction.
  static ReactionNetwork reversible(const std::vector<StoichTerm>& reactants, const std::vector<StoichTerm>& products,
                                    double k_forward, double k_backward, Index species);

  bool empty() const { return reactions_.empty(); }
  const std::vector<Reaction>& reactions() const { return reactions_; }

  /// Net production rate r_i(c) for one cell.
  Eigen::VectorXd rates(const Eigen::VectorXd& c) const;

 private:
  std::vector<Reaction> reactions_;
};

struct SimConfig {
  double t_end{1.0};
  double cfl_safety{0.4};
  double checkpoint_interval{0.0};  ///< 0: checkpoints only at start and end
  std::size_t max_steps{10'000'000};
  double floor{kCompositionFloor};
};

/// Per-step scalar diagnostics.
struct Sample {
  double time{0.0};
  double V{0.0};  ///< sum over cells of G(c) h
  double W{0.0};  ///< diffusive plus reactive dissipation
  double min_concentration{0.0};
  Eigen::VectorXd masses;  ///< per species sum over cells of c_i h
};

struct Checkpoint {
  Field field;
  std::size_t sample{0};  ///< index into Trajectory::samples
};

struct Trajectory {
  std::vector<std::string> names;
  std::vector<Sample> samples;
  std::vector<Checkpoint> checkpoints;
  std::size_t steps{0};
  double c_tot0{0.0};
};

/// Fluxes on all ncells+1 faces (rows); boundary rows are zero.
Eigen::MatrixXd face_fluxes(const Field& field, const MixtureSpec& spec);

/// Largest stable explicit step: cfl * h^2 / (2 lambda_max) over interior
/// faces, capped so reactions move no concentration by more than 10 %.
double stable_dt(const Field& field, const MixtureSpec& spec, const ReactionNetwork& reactions,
                 double cfl_safety = 0.4);

/// One explicit Euler step.
Field step(const Field& field, const MixtureSpec& spec, const ReactionNetwork& reactions, double dt);

/// Same update with precomputed face fluxes.
Field advance(const Field& field, const Eigen::MatrixXd& fluxes, const ReactionNetwork& reactions, double dt);

Trajectory simulate(const Field& initial, const MixtureSpec& spec, const ReactionNetwork& reactions,
                    const SimConfig& config);

/// sum over cells of G(c) h, with 0 ln 0 := 0.
double gibbs_functional(const Field& field, const ThermoModel& model);

/// W = -sum_faces sum_i J_i (mu_i,R - mu_i,L) - h sum_cells sum_i mu_i r_i.
/// NaN when some concentration is exactly zero.
double dissipation(const Field& field, const Eigen::MatrixXd& fluxes, const MixtureSpec& spec,
                   const ReactionNetwork& reactions);

Eigen::VectorXd species_masses(const Field& field);

}  // namespace msdiff

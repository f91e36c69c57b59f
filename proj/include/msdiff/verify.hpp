#pragma once

// Independent oracles and global diagnostics over solver output.

#include "msdiff/mixture.hpp"
#include "msdiff/solver.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace msdiff {

struct LedgerRow {
  double time{0.0};
  double V{0.0};
  double W{0.0};
  double cumulative_W{0.0};
  double min_concentration{0.0};
  Eigen::VectorXd masses;
};

struct LedgerViolation {
  std::size_t sample{0};
  double time{0.0};
  std::string what;
};

/// Lyapunov bookkeeping of a trajectory. Rows are emitted at checkpoints; the
/// dissipation integral runs over every recorded step (trapezoid rule).
struct EntropyLedger {
  std::vector<LedgerRow> rows;
  double V0{0.0};
  double lyapunov_tolerance{0.0};     ///< 1e-6 |V(0)|
  double max_lyapunov_excess{0.0};    ///< max_t V(t) + int W - V(0)
  double max_balance_defect{0.0};     ///< max_t |V(t) + int W - V(0)|
  double min_W{0.0};
  std::optional<LedgerViolation> violation;

  bool ok() const { return !violation.has_value(); }
};

inline constexpr double kLyapunovRelativeTolerance = 1e-6;
inline constexpr double kDissipationRelativeTolerance = 1e-10;

/// Builds the ledger and reports the first violated invariant. Throws
/// DegenerateComposition if a recorded state had an exactly zero concentration.
EntropyLedger entropy_ledger(const Trajectory& trajectory, const ThermoModel& model);

/// Binary thermodynamics for the scalar reduction: gamma_1 = exp(A x_2^2).
struct BinaryFiltrationModel {
  double d12{1.0};
  double margules{0.0};
  double c_tot{1.0};

  /// phi'(c) = D12 (1 - 2 A x_1 x_2), x_1 = c / c_tot
  double phi_prime(double c) const;
  /// phi(c) with phi(0) = 0
  double phi(double c) const;
};

/// Solves d_t c = d_yy phi(c) with zero-flux ends on `grid` by a scalar
/// finite-volume scheme with Heun time stepping. Throws NonMonotoneFlux if
/// phi' <= 0 anywhere on [min c0, max c0].
Eigen::VectorXd filtration_oracle(const Eigen::VectorXd& initial, const BinaryFiltrationModel& model,
                                  const Grid1D& grid, double t_end, double cfl_safety = 0.2);

enum class CrossEffect { Uphill, Osmotic };

struct CrossEffectEvent {
  double time{0.0};
  Index face{0};  ///< interior face between cells face-1 and face
  Index species{0};
  CrossEffect kind{CrossEffect::Uphill};
  double flux{0.0};
  double gradient{0.0};
};

struct UphillReport {
  std::vector<CrossEffectEvent> events;

  bool empty() const { return events.empty(); }
  std::size_t count(CrossEffect kind) const;
};

/// Flags faces where J_i grad c_i > 0 (reverse diffusion) or J_i != 0 while
/// grad c_i = 0 (osmotic diffusion).
UphillReport detect_uphill(const Field& field, const MixtureSpec& spec);
UphillReport detect_uphill(const Trajectory& trajectory, const MixtureSpec& spec);

struct TernaryForms {
  double det_b{0.0};            ///< closed form
  double tr_b{0.0};             ///< closed form
  double det_b_assembled{0.0};
  double tr_b_assembled{0.0};
  double det_lower_bound{0.0};
  double tr_lower_bound{0.0};
  bool closed_forms_match{false};  ///< 1e-12 relative
  bool sector_ok{false};           ///< (tr B)^2 >= 3 det B and B^{-1} spectrum within pi/6
};

TernaryForms ternary_closed_forms(const Eigen::VectorXd& x, const Eigen::MatrixXd& dmat);

}  // namespace msdiff

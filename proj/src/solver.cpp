#include "msdiff/solver.hpp"

#include "msdiff/mskernel.hpp"
#include "msdiff/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace msdiff {

namespace {

constexpr double kTotalTolerance = 1e-8;
constexpr double kReactionCap = 0.1;

int stoich_sum(const std::vector<StoichTerm>& terms) {
  int total = 0;
  for (const auto& t : terms) total += t.coefficient;
  return total;
}

void check_terms(const std::vector<StoichTerm>& terms, Index species) {
  for (const auto& t : terms) {
    if (t.species < 0 || t.species >= species) throw Error(ErrorCode::InvalidReaction, "species index out of range");
    if (t.coefficient <= 0) throw Error(ErrorCode::InvalidReaction, "stoichiometric coefficients must be positive");
  }
}

Eigen::VectorXd face_composition(const Field& field, Index left) {
  const Eigen::VectorXd xl = field.cell(left) / field.c.row(left).sum();
  const Eigen::VectorXd xr = field.cell(left + 1) / field.c.row(left + 1).sum();
  const Eigen::VectorXd mean = 0.5 * (xl + xr);
  return mean / mean.sum();
}

}  // namespace

Field make_field(const Grid1D& grid, Eigen::MatrixXd concentrations, double time) {
  if (grid.ncells < 2 || concentrations.rows() != grid.ncells) {
    throw Error(ErrorCode::BadDimension, "field needs ncells >= 2 rows matching the grid");
  }
  if (!(grid.length > 0.0)) throw Error(ErrorCode::BadDimension, "grid length must be positive");
  if (concentrations.cols() < 2) throw Error(ErrorCode::BadDimension, "field needs at least two species");
  if (concentrations.minCoeff() < 0.0) {
    throw Error(ErrorCode::NegativeConcentration, "initial concentrations must be nonnegative");
  }
  const Eigen::VectorXd totals = concentrations.rowwise().sum();
  const double reference = totals[0];
  if (!(reference > 0.0)) throw Error(ErrorCode::NonPositiveTotal, "cell total must be positive");
  if ((totals.array() - reference).abs().maxCoeff() > kTotalTolerance * reference) {
    throw Error(ErrorCode::BadDimension, "per-cell total concentration must be constant");
  }
  return Field{std::move(concentrations), grid, time};
}

ReactionNetwork::ReactionNetwork(std::vector<Reaction> reactions, Index species)
    : reactions_(std::move(reactions)) {
  for (const auto& r : reactions_) {
    check_terms(r.reactants, species);
    check_terms(r.products, species);
    if (r.reactants.empty()) throw Error(ErrorCode::InvalidReaction, "reaction without reactants");
    if (!(r.rate_constant >= 0.0)) throw Error(ErrorCode::InvalidReaction, "rate constant must be nonnegative");
    if (stoich_sum(r.reactants) != stoich_sum(r.products)) {
      throw Error(ErrorCode::InvalidReaction, "reaction does not conserve moles");
    }
  }
}

ReactionNetwork ReactionNetwork::reversible(const std::vector<StoichTerm>& reactants,
                                            const std::vector<StoichTerm>& products, double k_forward,
                                            double k_backward, Index species) {
  std::vector<Reaction> list{{reactants, products, k_forward}};
  if (k_backward > 0.0) list.push_back({products, reactants, k_backward});
  return ReactionNetwork(std::move(list), species);
}

Eigen::VectorXd ReactionNetwork::rates(const Eigen::VectorXd& c) const {
  Eigen::VectorXd r = Eigen::VectorXd::Zero(c.size());
  for (const auto& reaction : reactions_) {
    double rate = reaction.rate_constant;
    for (const auto& t : reaction.reactants) rate *= std::pow(std::max(c[t.species], 0.0), t.coefficient);
    for (const auto& t : reaction.reactants) r[t.species] -= t.coefficient * rate;
    for (const auto& t : reaction.products) r[t.species] += t.coefficient * rate;
  }
  return r;
}

Eigen::MatrixXd face_fluxes(const Field& field, const MixtureSpec& spec) {
  const Index cells = field.cells();
  const Index n = field.species();
  const double h = field.grid.h();
  Eigen::MatrixXd fluxes = Eigen::MatrixXd::Zero(cells + 1, n);
  for (Index f = 1; f < cells; ++f) {
    const Index left = f - 1;
    const Eigen::VectorXd x_face = face_composition(field, left);
    const Eigen::VectorXd xl = field.cell(left) / field.c.row(left).sum();
    const Eigen::VectorXd xr = field.cell(left + 1) / field.c.row(left + 1).sum();
    const Eigen::VectorXd grad_x = (xr - xl) / h;
    if (grad_x.cwiseAbs().maxCoeff() == 0.0) continue;
    const double c_tot = 0.5 * (field.c.row(left).sum() + field.c.row(left + 1).sum());
    const auto force = driving_force(spec.thermo, floor_composition(x_face), grad_x);
    const InvariantFluxSolver solver(x_face, spec.dmat);
    fluxes.row(f) = solver.solve(force.d, c_tot).transpose();
  }
  return fluxes;
}

double stable_dt(const Field& field, const MixtureSpec& spec, const ReactionNetwork& reactions, double cfl_safety) {
  const double h = field.grid.h();
  double lambda_max = 0.0;
  for (Index f = 1; f < field.cells(); ++f) {
    const auto values = diffusion_operator_spectrum(face_composition(field, f - 1), spec.dmat, spec.thermo);
    lambda_max = std::max(lambda_max, values[0].real());
  }
  double dt = std::numeric_limits<double>::infinity();
  if (lambda_max > 0.0) dt = cfl_safety * h * h / (2.0 * lambda_max);

  if (!reactions.empty()) {
    for (Index i = 0; i < field.cells(); ++i) {
      const Eigen::VectorXd c = field.cell(i);
      const double total = c.sum();
      const Eigen::VectorXd r = reactions.rates(c);
      for (Index k = 0; k < r.size(); ++k) {
        // Consumption is bounded relative to the species itself, production
        // relative to the cell total.
        if (r[k] < 0.0) dt = std::min(dt, kReactionCap * c[k] / -r[k]);
        if (r[k] > 0.0) dt = std::min(dt, kReactionCap * total / r[k]);
      }
    }
  }
  return dt;
}

Field advance(const Field& field, const Eigen::MatrixXd& fluxes, const ReactionNetwork& reactions, double dt) {
  const double h = field.grid.h();
  Field next = field;
  next.time = field.time + dt;
  for (Index i = 0; i < field.cells(); ++i) {
    Eigen::VectorXd update = (fluxes.row(i) - fluxes.row(i + 1)).transpose() / h;
    if (!reactions.empty()) update += reactions.rates(field.cell(i));
    next.c.row(i) += dt * update.transpose();
    const double total = field.c.row(i).sum();
    for (Index k = 0; k < field.species(); ++k) {
      double& value = next.c(i, k);
      if (value >= 0.0) continue;
      if (value < -kNegativeClampTolerance * total) {
        std::ostringstream os;
        os << "c[" << i << "][" << k << "] = " << value << " at t = " << next.time;
        throw Error(ErrorCode::PositivityViolation, os.str());
      }
      value = 0.0;
    }
  }
  return next;
}

Field step(const Field& field, const MixtureSpec& spec, const ReactionNetwork& reactions, double dt) {
  return advance(field, face_fluxes(field, spec), reactions, dt);
}

double gibbs_functional(const Field& field, const ThermoModel& model) {
  double total = 0.0;
  for (Index i = 0; i < field.cells(); ++i) total += gibbs_density_extended(model, field.cell(i));
  return total * field.grid.h();
}

double dissipation(const Field& field, const Eigen::MatrixXd& fluxes, const MixtureSpec& spec,
                   const ReactionNetwork& reactions) {
  if (field.c.minCoeff() <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  const Index cells = field.cells();
  Eigen::MatrixXd mu(cells, field.species());
  for (Index i = 0; i < cells; ++i) {
    const Eigen::VectorXd c = field.cell(i);
    mu.row(i) = chemical_potentials(spec.thermo, Eigen::VectorXd(c / c.sum())).transpose();
  }
  double w = 0.0;
  for (Index f = 1; f < cells; ++f) w -= fluxes.row(f).dot(mu.row(f) - mu.row(f - 1));
  if (!reactions.empty()) {
    double reactive = 0.0;
    for (Index i = 0; i < cells; ++i) reactive -= mu.row(i).dot(reactions.rates(field.cell(i)));
    w += reactive * field.grid.h();
  }
  return w;
}

Eigen::VectorXd species_masses(const Field& field) {
  return field.c.colwise().sum().transpose() * field.grid.h();
}

Trajectory simulate(const Field& initial, const MixtureSpec& spec, const ReactionNetwork& reactions,
                    const SimConfig& config) {
  require_valid(spec);
  if (!(config.t_end > 0.0)) throw Error(ErrorCode::BadDimension, "t_end must be positive");
  if (!(config.cfl_safety > 0.0 && config.cfl_safety <= 1.0)) {
    throw Error(ErrorCode::BadDimension, "cfl_safety must lie in (0, 1]");
  }
  Field field = make_field(initial.grid, initial.c, initial.time);
  if (field.species() != spec.n()) throw Error(ErrorCode::BadDimension, "field and mixture species differ");

  Trajectory traj;
  traj.names = spec.names;
  traj.c_tot0 = field.c.row(0).sum();

  const double t0 = field.time;
  const double t_end = t0 + config.t_end;
  const double interval = config.checkpoint_interval > 0.0 ? config.checkpoint_interval : config.t_end;
  const double snap = 1e-12 * config.t_end;
  std::size_t next_index = 1;
  auto checkpoint_time = [&](std::size_t k) { return std::min(t0 + static_cast<double>(k) * interval, t_end); };

  auto record = [&](const Eigen::MatrixXd& fluxes) {
    Sample s;
    s.time = field.time;
    s.V = gibbs_functional(field, spec.thermo);
    s.W = dissipation(field, fluxes, spec, reactions);
    s.min_concentration = field.c.minCoeff();
    s.masses = species_masses(field);
    traj.samples.push_back(std::move(s));
  };

  Eigen::MatrixXd fluxes = face_fluxes(field, spec);
  record(fluxes);
  traj.checkpoints.push_back({field, 0});

  while (field.time < t_end - snap) {
    if (traj.steps >= config.max_steps) {
      std::ostringstream os;
      os << "reached " << config.max_steps << " steps at t = " << field.time;
      throw Error(ErrorCode::MaxStepsExceeded, os.str());
    }
    const double target = checkpoint_time(next_index);
    double dt = stable_dt(field, spec, reactions, config.cfl_safety);
    bool hits_checkpoint = false;
    if (field.time + dt >= target - snap) {
      dt = target - field.time;
      hits_checkpoint = true;
    }
    field = advance(field, fluxes, reactions, dt);
    ++traj.steps;
    if (hits_checkpoint) field.time = target;

    fluxes = face_fluxes(field, spec);
    record(fluxes);
    if (hits_checkpoint) {
      traj.checkpoints.push_back({field, traj.samples.size() - 1});
      ++next_index;
    }
  }
  return traj;
}

}  // namespace msdiff

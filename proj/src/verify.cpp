#include "msdiff/verify.hpp"

#include "msdiff/mskernel.hpp"
#include "msdiff/thermo.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace msdiff {

EntropyLedger entropy_ledger(const Trajectory& trajectory, const ThermoModel& model) {
  const auto& samples = trajectory.samples;
  if (samples.empty()) throw Error(ErrorCode::BadDimension, "trajectory has no samples");
  for (const auto& s : samples) {
    if (!std::isfinite(s.W) || !std::isfinite(s.V)) {
      std::ostringstream os;
      os << "dissipation undefined at t = " << s.time << " (zero concentration)";
      throw Error(ErrorCode::DegenerateComposition, os.str());
    }
  }

  EntropyLedger ledger;
  ledger.V0 = samples.front().V;
  ledger.lyapunov_tolerance = kLyapunovRelativeTolerance * std::abs(ledger.V0);
  const double w_floor = -kDissipationRelativeTolerance * std::abs(ledger.V0);

  auto flag = [&](std::size_t k, const std::string& what) {
    if (!ledger.violation) ledger.violation = LedgerViolation{k, samples[k].time, what};
  };

  std::vector<double> cumulative(samples.size(), 0.0);
  ledger.min_W = samples.front().W;
  ledger.max_lyapunov_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < samples.size(); ++k) {
    if (k > 0) {
      const double dt = samples[k].time - samples[k - 1].time;
      cumulative[k] = cumulative[k - 1] + 0.5 * dt * (samples[k].W + samples[k - 1].W);
    }
    ledger.min_W = std::min(ledger.min_W, samples[k].W);
    if (samples[k].W < w_floor) flag(k, "negative dissipation W");
    const double excess = samples[k].V + cumulative[k] - ledger.V0;
    ledger.max_lyapunov_excess = std::max(ledger.max_lyapunov_excess, excess);
    ledger.max_balance_defect = std::max(ledger.max_balance_defect, std::abs(excess));
    if (excess > ledger.lyapunov_tolerance) flag(k, "V(t) + int W exceeds V(0)");
  }

  for (const auto& cp : trajectory.checkpoints) {
    const std::size_t k = cp.sample;
    if (k >= samples.size()) throw Error(ErrorCode::BadDimension, "checkpoint refers to a missing sample");
    const auto& s = samples[k];
    double v = 0.0;
    for (Index i = 0; i < cp.field.cells(); ++i) v += gibbs_density_extended(model, cp.field.cell(i));
    v *= cp.field.grid.h();
    if (std::abs(v - s.V) > 1e-9 * std::max(1.0, std::abs(s.V))) flag(k, "recorded V disagrees with checkpoint field");
    ledger.rows.push_back({s.time, s.V, s.W, cumulative[k], s.min_concentration, s.masses});
  }
  return ledger;
}

double BinaryFiltrationModel::phi_prime(double c) const {
  const double x1 = c / c_tot;
  return d12 * (1.0 - 2.0 * margules * x1 * (1.0 - x1));
}

double BinaryFiltrationModel::phi(double c) const {
  const double s = c / c_tot;
  return d12 * c_tot * (s - margules * s * s + 2.0 * margules * s * s * s / 3.0);
}

Eigen::VectorXd filtration_oracle(const Eigen::VectorXd& initial, const BinaryFiltrationModel& model,
                                  const Grid1D& grid, double t_end, double cfl_safety) {
  if (initial.size() != grid.ncells) throw Error(ErrorCode::BadDimension, "profile does not match grid");
  const double lo = initial.minCoeff();
  const double hi = initial.maxCoeff();
  // phi' is a quadratic in c with its extremum at x_1 = 1/2.
  std::vector<double> probes{lo, hi};
  const double mid = 0.5 * model.c_tot;
  if (lo < mid && mid < hi) probes.push_back(mid);
  double slope_min = std::numeric_limits<double>::infinity();
  double slope_max = 0.0;
  for (double c : probes) {
    slope_min = std::min(slope_min, model.phi_prime(c));
    slope_max = std::max(slope_max, model.phi_prime(c));
  }
  if (!(slope_min > 0.0)) {
    std::ostringstream os;
    os << "phi' = " << slope_min << " <= 0 on the traversed range";
    throw Error(ErrorCode::NonMonotoneFlux, os.str());
  }

  const double h = grid.h();
  const Index cells = grid.ncells;
  auto rhs = [&](const Eigen::VectorXd& c) {
    Eigen::VectorXd phi(cells);
    for (Index i = 0; i < cells; ++i) phi[i] = model.phi(c[i]);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(cells);
    for (Index f = 1; f < cells; ++f) {
      const double flux = -(phi[f] - phi[f - 1]) / h;
      out[f - 1] -= flux / h;
      out[f] += flux / h;
    }
    return out;
  };

  const double dt_max = cfl_safety * h * h / (2.0 * slope_max);
  const auto steps = static_cast<long>(std::ceil(t_end / dt_max));
  const double dt = t_end / static_cast<double>(steps);
  Eigen::VectorXd c = initial;
  for (long k = 0; k < steps; ++k) {
    const Eigen::VectorXd k1 = rhs(c);
    const Eigen::VectorXd predictor = c + dt * k1;
    c += 0.5 * dt * (k1 + rhs(predictor));
  }
  return c;
}

std::size_t UphillReport::count(CrossEffect kind) const {
  return static_cast<std::size_t>(
      std::count_if(events.begin(), events.end(), [kind](const auto& e) { return e.kind == kind; }));
}

UphillReport detect_uphill(const Field& field, const MixtureSpec& spec) {
  const Eigen::MatrixXd fluxes = face_fluxes(field, spec);
  const double h = field.grid.h();
  const Index cells = field.cells();
  Eigen::MatrixXd grads = Eigen::MatrixXd::Zero(cells + 1, field.species());
  for (Index f = 1; f < cells; ++f) grads.row(f) = (field.c.row(f) - field.c.row(f - 1)) / h;

  UphillReport report;
  const double flux_scale = fluxes.cwiseAbs().maxCoeff();
  const double grad_scale = grads.cwiseAbs().maxCoeff();
  if (flux_scale == 0.0) return report;
  for (Index f = 1; f < cells; ++f) {
    for (Index i = 0; i < field.species(); ++i) {
      const double j = fluxes(f, i);
      const double g = grads(f, i);
      if (std::abs(g) <= 1e-12 * grad_scale) {
        if (std::abs(j) > 1e-8 * flux_scale) report.events.push_back({field.time, f, i, CrossEffect::Osmotic, j, g});
      } else if (j * g > 1e-10 * flux_scale * grad_scale) {
        report.events.push_back({field.time, f, i, CrossEffect::Uphill, j, g});
      }
    }
  }
  return report;
}

UphillReport detect_uphill(const Trajectory& trajectory, const MixtureSpec& spec) {
  UphillReport all;
  for (const auto& cp : trajectory.checkpoints) {
    auto part = detect_uphill(cp.field, spec);
    all.events.insert(all.events.end(), part.events.begin(), part.events.end());
  }
  return all;
}

TernaryForms ternary_closed_forms(const Eigen::VectorXd& x, const Eigen::MatrixXd& dmat) {
  if (x.size() != 3 || dmat.rows() != 3) throw Error(ErrorCode::BadDimension, "ternary closed forms need n = 3");
  const double d12 = dmat(0, 1);
  const double d13 = dmat(0, 2);
  const double d23 = dmat(1, 2);

  TernaryForms out;
  out.det_b = x[0] / (d12 * d13) + x[1] / (d12 * d23) + x[2] / (d13 * d23);
  out.tr_b = (x[0] + x[1]) / d12 + (x[0] + x[2]) / d13 + (x[1] + x[2]) / d23;
  out.det_lower_bound = std::min({1.0 / (d12 * d13), 1.0 / (d12 * d23), 1.0 / (d13 * d23)});
  out.tr_lower_bound = 2.0 * std::min({1.0 / d12, 1.0 / d13, 1.0 / d23});

  const Eigen::MatrixXd b = assemble_B(x, dmat).b;
  out.det_b_assembled = b.determinant();
  out.tr_b_assembled = b.trace();
  out.closed_forms_match = std::abs(out.det_b - out.det_b_assembled) <= 1e-12 * std::abs(out.det_b) &&
                           std::abs(out.tr_b - out.tr_b_assembled) <= 1e-12 * std::abs(out.tr_b);

  Eigen::EigenSolver<Eigen::MatrixXd> eig(b.inverse(), false);
  bool in_sector = eig.info() == Eigen::Success;
  for (Index k = 0; in_sector && k < eig.eigenvalues().size(); ++k) {
    const auto lambda = eig.eigenvalues()[k];
    in_sector = lambda.real() > 0.0 && std::abs(std::arg(lambda)) <= std::numbers::pi / 6.0 + 1e-12;
  }
  out.sector_ok = out.tr_b * out.tr_b >= 3.0 * out.det_b && in_sector;
  return out;
}

}  // namespace msdiff

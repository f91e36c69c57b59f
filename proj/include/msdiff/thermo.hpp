#pragma once

// Activity models, the thermodynamic factor Gamma and the Gibbs energy density.
// Potentials are in units of RT with mu_i^0 = 0.

#include "msdiff/mixture.hpp"
#include "msdiff/subspace.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>
#include <variant>

namespace msdiff {

template <typename Scalar>
struct BasicGammaMatrix {
  MatrixX<Scalar> g;
};

using GammaMatrix = BasicGammaMatrix<double>;

namespace detail {

template <typename Scalar>
const MatrixX<Scalar>* interaction_of(const BasicThermoModel<Scalar>& model) {
  if (const auto* m = std::get_if<Margules<Scalar>>(&model)) return &m->interaction;
  return nullptr;
}

template <typename Scalar>
void require_floor(const VectorX<Scalar>& x, Scalar floor) {
  for (Index i = 0; i < x.size(); ++i) {
    // floor_composition renormalizes after flooring, so allow a relative hair below.
    if (!(x[i] >= floor * Scalar(1 - 1e-6))) {
      std::ostringstream os;
      os << "x[" << i << "] = " << x[i] << " below floor " << floor;
      throw Error(ErrorCode::DegenerateComposition, os.str());
    }
  }
}

}  // namespace detail

/// ln(gamma_i). Margules: ln gamma_i = (A x)_i - g_ex, g_ex = x^T A x / 2.
template <typename Scalar>
VectorX<Scalar> ln_activity_coeffs(const BasicThermoModel<Scalar>& model, const VectorX<Scalar>& x) {
  const auto* a = detail::interaction_of(model);
  if (a == nullptr) return VectorX<Scalar>::Zero(x.size());
  const VectorX<Scalar> ax = (*a) * x;
  const Scalar g_ex = Scalar(0.5) * x.dot(ax);
  return ax.array() - g_ex;
}

/// Partial derivatives d ln(gamma_i) / d x_j with x_1..x_n treated as independent.
template <typename Scalar>
MatrixX<Scalar> ln_activity_jacobian(const BasicThermoModel<Scalar>& model, const VectorX<Scalar>& x) {
  const Index n = x.size();
  const auto* a = detail::interaction_of(model);
  if (a == nullptr) return MatrixX<Scalar>::Zero(n, n);
  const VectorX<Scalar> ax = (*a) * x;
  // d/dx_j [(A x)_i - x^T A x / 2] = A_ij - (A x)_j
  return a->rowwise() - ax.transpose();
}

/// Gamma_ij = delta_ij + x_i d ln(gamma_i)/d x_j. Columns sum to one on the simplex.
template <typename Scalar>
BasicGammaMatrix<Scalar> gamma_matrix(const BasicThermoModel<Scalar>& model, const VectorX<Scalar>& x,
                                      Scalar floor = Scalar(kCompositionFloor)) {
  detail::require_floor(x, floor);
  const Index n = x.size();
  if (std::holds_alternative<Ideal>(model)) return {MatrixX<Scalar>::Identity(n, n)};
  MatrixX<Scalar> g = x.asDiagonal() * ln_activity_jacobian(model, x);
  g.diagonal().array() += Scalar(1);
  return {std::move(g)};
}

/// d = Gamma * grad_x.
template <typename Scalar>
BasicDrivingForce<Scalar> driving_force(const BasicThermoModel<Scalar>& model, const VectorX<Scalar>& x,
                                        const VectorX<Scalar>& grad_x) {
  if (std::holds_alternative<Ideal>(model)) return {grad_x};
  return {gamma_matrix(model, x).g * grad_x};
}

/// mu_i / RT = ln(gamma_i x_i). Requires x_i > 0.
template <typename Scalar>
VectorX<Scalar> chemical_potentials(const BasicThermoModel<Scalar>& model, const VectorX<Scalar>& x) {
  return x.array().log() + ln_activity_coeffs(model, x).array();
}

/// Gibbs energy density G/RT = sum_i c_i ln(gamma_i x_i). Requires every c_i > 0.
template <typename Scalar>
Scalar gibbs_density(const BasicThermoModel<Scalar>& model, const VectorX<Scalar>& c) {
  for (Index i = 0; i < c.size(); ++i) {
    if (!(c[i] > Scalar(0))) {
      throw Error(ErrorCode::DegenerateComposition, "gibbs_density needs strictly positive concentrations");
    }
  }
  const VectorX<Scalar> x = c / c.sum();
  return c.dot(chemical_potentials(model, x));
}

/// Same as gibbs_density but with the 0 ln 0 := 0 convention at the simplex boundary.
template <typename Scalar>
Scalar gibbs_density_extended(const BasicThermoModel<Scalar>& model, const VectorX<Scalar>& c) {
  using std::log;
  const Scalar total = c.sum();
  const VectorX<Scalar> x = c / total;
  const VectorX<Scalar> ln_gamma = ln_activity_coeffs(model, x);
  Scalar g(0);
  for (Index i = 0; i < c.size(); ++i) {
    if (c[i] > Scalar(0)) g += c[i] * (log(x[i]) + ln_gamma[i]);
  }
  return g;
}

/// Smallest eigenvalue of the symmetric part of X^{-1} Gamma restricted to the
/// zero-sum subspace. A positive value certifies strong convexity of G at x.
template <typename Scalar>
Scalar convexity_check(const BasicThermoModel<Scalar>& model, const VectorX<Scalar>& x) {
  const Index n = x.size();
  const MatrixX<Scalar> basis = zero_sum_basis<Scalar>(n);
  const MatrixX<Scalar> weighted = x.cwiseInverse().asDiagonal() * gamma_matrix(model, x, Scalar(0)).g;
  const MatrixX<Scalar> sym = Scalar(0.5) * (weighted + weighted.transpose());
  const MatrixX<Scalar> restricted = basis.transpose() * sym * basis;
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> eig(restricted, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

}  // namespace msdiff

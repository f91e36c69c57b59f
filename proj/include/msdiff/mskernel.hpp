#pragma once

// Maxwell-Stefan flux-force matrices, the singular flux solve on the zero-sum
// subspace (three routes) and the spectral certificates.

#include "msdiff/mixture.hpp"
#include "msdiff/subspace.hpp"
#include "msdiff/thermo.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <vector>

namespace msdiff {

/// A(x): diagonal -s_i = -sum_{k != i} x_k / D_ik, off-diagonal x_i / D_ij.
template <typename Scalar>
struct BasicMsMatrixA {
  MatrixX<Scalar> a;
};

/// Reduced (n-1) x (n-1) matrix B(x) obtained by eliminating J_n.
template <typename Scalar>
struct BasicReducedMatrixB {
  MatrixX<Scalar> b;
};

template <typename Scalar>
struct BasicSpectrumReport {
  VectorX<Scalar> eigenvalues;  ///< sorted descending
  Scalar delta{0};              ///< min_{i != j} 1 / D_ij
  bool gap_ok{false};
};

using MsMatrixA = BasicMsMatrixA<double>;
using ReducedMatrixB = BasicReducedMatrixB<double>;
using SpectrumReport = BasicSpectrumReport<double>;

/// Raises entries below `floor` to `floor` and renormalizes onto the simplex.
template <typename Scalar>
VectorX<Scalar> floor_composition(const VectorX<Scalar>& x, Scalar floor = Scalar(kCompositionFloor)) {
  VectorX<Scalar> y = x.cwiseMax(floor);
  return y / y.sum();
}

/// delta = min_{i != j} 1 / D_ij.
template <typename Scalar>
Scalar spectral_gap_delta(const MatrixX<Scalar>& dmat) {
  Scalar delta = std::numeric_limits<Scalar>::infinity();
  for (Index i = 0; i < dmat.rows(); ++i) {
    for (Index j = 0; j < dmat.cols(); ++j) {
      if (i != j) delta = std::min(delta, Scalar(1) / dmat(i, j));
    }
  }
  return delta;
}

template <typename Scalar>
BasicMsMatrixA<Scalar> assemble_A(const VectorX<Scalar>& x_raw, const MatrixX<Scalar>& dmat) {
  const VectorX<Scalar> x = floor_composition(x_raw);
  const Index n = x.size();
  MatrixX<Scalar> a(n, n);
  for (Index i = 0; i < n; ++i) {
    Scalar s(0);
    for (Index j = 0; j < n; ++j) {
      if (j == i) continue;
      a(i, j) = x[i] / dmat(i, j);
      s += x[j] / dmat(i, j);
    }
    a(i, i) = -s;
  }
  return {std::move(a)};
}

/// A_S = X^{-1/2} A X^{1/2}: off-diagonal sqrt(x_i x_j) / D_ij, diagonal -s_i.
template <typename Scalar>
MatrixX<Scalar> assemble_A_sym(const VectorX<Scalar>& x_raw, const MatrixX<Scalar>& dmat) {
  using std::sqrt;
  const VectorX<Scalar> x = floor_composition(x_raw);
  const Index n = x.size();
  MatrixX<Scalar> a(n, n);
  for (Index i = 0; i < n; ++i) {
    Scalar s(0);
    for (Index j = 0; j < n; ++j) {
      if (j == i) continue;
      a(i, j) = sqrt(x[i] * x[j]) / dmat(i, j);
      s += x[j] / dmat(i, j);
    }
    a(i, i) = -s;
  }
  return a;
}

/// B_ij = x_i (1/D_in - 1/D_ij) for i != j, B_ii = x_i/D_in + sum_{k != i} x_k/D_ik,
/// with species n (index n-1) eliminated.
template <typename Scalar>
BasicReducedMatrixB<Scalar> assemble_B(const VectorX<Scalar>& x, const MatrixX<Scalar>& dmat) {
  const Index n = x.size();
  const Index last = n - 1;
  MatrixX<Scalar> b(last, last);
  for (Index i = 0; i < last; ++i) {
    Scalar diag = x[i] / dmat(i, last);
    for (Index k = 0; k < n; ++k) {
      if (k != i) diag += x[k] / dmat(i, k);
    }
    b(i, i) = diag;
    for (Index j = 0; j < last; ++j) {
      if (j != i) b(i, j) = x[i] * (Scalar(1) / dmat(i, last) - Scalar(1) / dmat(i, j));
    }
  }
  return {std::move(b)};
}

template <typename Scalar>
bool is_quasi_positive(const MatrixX<Scalar>& a) {
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      if (i != j && a(i, j) < Scalar(0)) return false;
    }
  }
  return true;
}

/// Structural irreducibility: the directed graph of nonzero off-diagonal
/// entries is strongly connected.
template <typename Scalar>
bool is_irreducible(const MatrixX<Scalar>& a) {
  const Index n = a.rows();
  if (n <= 1) return true;
  auto reaches_all = [&](bool transpose) {
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::vector<Index> stack{0};
    seen[0] = 1;
    Index count = 1;
    while (!stack.empty()) {
      const Index i = stack.back();
      stack.pop_back();
      for (Index j = 0; j < n; ++j) {
        const Scalar entry = transpose ? a(j, i) : a(i, j);
        if (j != i && entry != Scalar(0) && !seen[static_cast<std::size_t>(j)]) {
          seen[static_cast<std::size_t>(j)] = 1;
          ++count;
          stack.push_back(j);
        }
      }
    }
    return count == n;
  };
  return reaches_all(false) && reaches_all(true);
}

/// Eigenvalues of A via the symmetric similar matrix A_S, with the gap check
/// sigma(A) in (-inf, -delta] u {0}, zero simple.
template <typename Scalar>
BasicSpectrumReport<Scalar> spectrum(const VectorX<Scalar>& x, const MatrixX<Scalar>& dmat) {
  using std::abs;
  const MatrixX<Scalar> a_sym = assemble_A_sym(x, dmat);
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> eig(a_sym, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorCode::EigSolverFailure, "symmetric eigensolve on A_S did not converge");
  }
  BasicSpectrumReport<Scalar> report;
  report.eigenvalues = eig.eigenvalues().reverse();
  report.delta = spectral_gap_delta(dmat);
  const Scalar norm = a_sym.norm();
  const Scalar tol = Scalar(1e-10);
  const bool zero_top = abs(report.eigenvalues[0]) <= tol * norm;
  const bool gap = report.eigenvalues.size() < 2 ||
                   report.eigenvalues[1] <= -report.delta + tol * report.delta;
  report.gap_ok = zero_top && gap;
  return report;
}

/// Solves A J = c_tot d on the zero-sum subspace E by restriction to an
/// orthonormal basis of E. Construct once per composition, then solve for any
/// number of right-hand sides.
template <typename Scalar>
class BasicInvariantFluxSolver {
 public:
  BasicInvariantFluxSolver(const VectorX<Scalar>& x, const MatrixX<Scalar>& dmat)
      : a_(assemble_A(x, dmat).a), basis_(zero_sum_basis<Scalar>(x.size())) {
    const MatrixX<Scalar> restricted = basis_.transpose() * a_ * basis_;
    lu_.compute(restricted);
    const Scalar norm = restricted.cwiseAbs().maxCoeff();
    const auto& lu = lu_.matrixLU();
    for (Index k = 0; k < lu.rows(); ++k) {
      using std::abs;
      if (!(abs(lu(k, k)) > Scalar(1e-14) * norm)) {
        throw Error(ErrorCode::SingularSystem, "restricted Maxwell-Stefan matrix is singular");
      }
    }
  }

  /// J with A J = c_tot d and sum(J) = 0. `d` must sum to zero.
  VectorX<Scalar> solve(const VectorX<Scalar>& d, Scalar c_tot) const {
    const VectorX<Scalar> coords = lu_.solve(c_tot * (basis_.transpose() * d));
    return basis_ * coords;
  }

  /// The restricted matrix P^T A P and the basis P, for operator assembly.
  const MatrixX<Scalar>& matrix() const { return a_; }
  const MatrixX<Scalar>& basis() const { return basis_; }

 private:
  MatrixX<Scalar> a_;
  MatrixX<Scalar> basis_;
  Eigen::PartialPivLU<MatrixX<Scalar>> lu_;
};

using InvariantFluxSolver = BasicInvariantFluxSolver<double>;

template <typename Scalar>
BasicFluxSet<Scalar> solve_fluxes_invariant(const BasicComposition<Scalar>& comp, const MatrixX<Scalar>& dmat,
                                            const BasicDrivingForce<Scalar>& force) {
  return {BasicInvariantFluxSolver<Scalar>(comp.x, dmat).solve(force.d, comp.c_tot)};
}

/// Bordered route: (A - mu x e^T) J = c_tot d is regular for 0 < mu < delta and
/// its solution lies in E. Defaults to mu = delta / 2.
template <typename Scalar>
BasicFluxSet<Scalar> solve_fluxes_bordered(const BasicComposition<Scalar>& comp, const MatrixX<Scalar>& dmat,
                                           const BasicDrivingForce<Scalar>& force, Scalar mu = Scalar(-1)) {
  if (!(mu > Scalar(0))) mu = Scalar(0.5) * spectral_gap_delta(dmat);
  const VectorX<Scalar> x = floor_composition(comp.x);
  MatrixX<Scalar> bordered = assemble_A(x, dmat).a;
  bordered -= mu * x * VectorX<Scalar>::Ones(x.size()).transpose();
  Eigen::FullPivLU<MatrixX<Scalar>> lu(bordered);
  if (!lu.isInvertible()) throw Error(ErrorCode::SingularSystem, "bordered matrix A_mu is singular");
  return {lu.solve(comp.c_tot * force.d)};
}

/// Reduced route: B (J_1..J_{n-1}) = -c_tot (d_1..d_{n-1}), J_n = -sum_{i<n} J_i.
template <typename Scalar>
BasicFluxSet<Scalar> solve_fluxes_reduced(const BasicComposition<Scalar>& comp, const MatrixX<Scalar>& dmat,
                                          const BasicDrivingForce<Scalar>& force) {
  using std::abs;
  const Index n = comp.size();
  const MatrixX<Scalar> b = assemble_B(floor_composition(comp.x), dmat).b;
  Eigen::PartialPivLU<MatrixX<Scalar>> lu(b);
  const Scalar norm = b.cwiseAbs().maxCoeff();
  for (Index k = 0; k < b.rows(); ++k) {
    if (!(abs(lu.matrixLU()(k, k)) > Scalar(1e-14) * norm)) {
      throw Error(ErrorCode::SingularSystem, "LU of reduced matrix B broke down");
    }
  }
  VectorX<Scalar> flux(n);
  flux.head(n - 1) = lu.solve(-comp.c_tot * force.d.head(n - 1));
  flux[n - 1] = -flux.head(n - 1).sum();
  return {std::move(flux)};
}

/// Fick-limit diffusivity D_i = 1 / sum_{j != i} x_j / D_ij.
template <typename Scalar>
Scalar fick_limit_D(const VectorX<Scalar>& x, const MatrixX<Scalar>& dmat, Index i) {
  Scalar denom(0);
  for (Index j = 0; j < x.size(); ++j) {
    if (j != i) denom += x[j] / dmat(i, j);
  }
  if (!(denom > Scalar(0))) {
    throw Error(ErrorCode::DegenerateComposition, "Fick-limit diffusivity undefined for a pure species");
  }
  return Scalar(1) / denom;
}

/// Matrix of the diffusion operator D(x) on E in the orthonormal zero-sum
/// basis: column k is the basis image of -J for d = Gamma p_k (c_tot = 1).
/// No convexity check.
template <typename Scalar>
MatrixX<Scalar> diffusion_operator_matrix(const VectorX<Scalar>& x, const MatrixX<Scalar>& dmat,
                                          const BasicThermoModel<Scalar>& model) {
  const VectorX<Scalar> xf = floor_composition(x);
  const BasicInvariantFluxSolver<Scalar> solver(xf, dmat);
  const MatrixX<Scalar>& basis = solver.basis();
  const MatrixX<Scalar> gamma = gamma_matrix(model, xf).g;
  MatrixX<Scalar> op(basis.cols(), basis.cols());
  for (Index k = 0; k < basis.cols(); ++k) {
    const VectorX<Scalar> flux = solver.solve(gamma * basis.col(k), Scalar(1));
    op.col(k) = -(basis.transpose() * flux);
  }
  return op;
}

/// Eigenvalues of D(x) on E sorted by descending real part, without the
/// convexity precondition. Negative values indicate loss of parabolicity.
template <typename Scalar>
ComplexVectorX<Scalar> diffusion_operator_eigenvalues(const VectorX<Scalar>& x, const MatrixX<Scalar>& dmat,
                                                      const BasicThermoModel<Scalar>& model) {
  const MatrixX<Scalar> op = diffusion_operator_matrix(x, dmat, model);
  ComplexVectorX<Scalar> values;
  if (op.rows() == 1) {
    values.resize(1);
    values[0] = op(0, 0);
  } else {
    Eigen::EigenSolver<MatrixX<Scalar>> eig(op, false);
    if (eig.info() != Eigen::Success) {
      throw Error(ErrorCode::EigSolverFailure, "eigensolve of the diffusion operator failed");
    }
    values = eig.eigenvalues();
  }
  std::sort(values.data(), values.data() + values.size(),
            [](const auto& l, const auto& r) { return l.real() > r.real(); });
  return values;
}

/// Checked version: throws NotConvex when the Gibbs energy is not strongly
/// convex at x (phase-splitting regime).
template <typename Scalar>
ComplexVectorX<Scalar> diffusion_operator_spectrum(const VectorX<Scalar>& x, const MatrixX<Scalar>& dmat,
                                                   const BasicThermoModel<Scalar>& model) {
  const VectorX<Scalar> xf = floor_composition(x);
  const Scalar convexity = convexity_check(model, xf);
  if (!(convexity > Scalar(0))) {
    std::ostringstream os;
    os << "Gibbs energy not strongly convex (min eigenvalue " << convexity << ")";
    throw Error(ErrorCode::NotConvex, os.str());
  }
  return diffusion_operator_eigenvalues(xf, dmat, model);
}

}  // namespace msdiff

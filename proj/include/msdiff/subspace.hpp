#pragma once

#include "msdiff/types.hpp"

#include <cmath>

namespace msdiff {

/// Orthonormal basis of E = {v : sum(v) = 0} as the columns of an n x (n-1)
/// matrix (Helmert construction). Column k has k+1 leading entries
/// 1/sqrt((k+1)(k+2)), then -(k+1)/sqrt((k+1)(k+2)), then zeros.
template <typename Scalar>
MatrixX<Scalar> zero_sum_basis(Index n) {
  using std::sqrt;
  MatrixX<Scalar> basis = MatrixX<Scalar>::Zero(n, n - 1);
  for (Index k = 0; k + 1 < n; ++k) {
    const Scalar m = Scalar(k + 1);
    const Scalar scale = Scalar(1) / sqrt(m * (m + Scalar(1)));
    basis.col(k).head(k + 1).setConstant(scale);
    basis(k + 1, k) = -m * scale;
  }
  return basis;
}

/// Orthogonal projection of v onto E.
template <typename Scalar>
VectorX<Scalar> project_zero_sum(const VectorX<Scalar>& v) {
  return v.array() - v.mean();
}

}  // namespace msdiff

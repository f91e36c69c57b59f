#pragma once

#include "msdiff/types.hpp"

#include <cmath>
#include <random>

namespace msdiff {

/// Uniform point on the simplex scaled into {x : x_i >= min_fraction}.
template <typename Scalar, typename Rng>
VectorX<Scalar> random_interior_composition(Rng& rng, Index n, Scalar min_fraction = Scalar(1e-3)) {
  std::exponential_distribution<double> expo(1.0);
  VectorX<Scalar> e(n);
  for (Index i = 0; i < n; ++i) e[i] = Scalar(expo(rng));
  e /= e.sum();
  return VectorX<Scalar>::Constant(n, min_fraction) + (Scalar(1) - Scalar(n) * min_fraction) * e;
}

/// Symmetric matrix with zero diagonal and off-diagonal entries drawn
/// log-uniformly from [lo, hi].
template <typename Scalar, typename Rng>
MatrixX<Scalar> random_diffusivities(Rng& rng, Index n, Scalar lo = Scalar(0.1), Scalar hi = Scalar(10)) {
  std::uniform_real_distribution<double> u(std::log(double(lo)), std::log(double(hi)));
  MatrixX<Scalar> d = MatrixX<Scalar>::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) d(i, j) = d(j, i) = Scalar(std::exp(u(rng)));
  }
  return d;
}

/// Symmetric zero-diagonal matrix with entries uniform in [-bound, bound].
template <typename Scalar, typename Rng>
MatrixX<Scalar> random_interaction(Rng& rng, Index n, Scalar bound) {
  std::uniform_real_distribution<double> u(-double(bound), double(bound));
  MatrixX<Scalar> a = MatrixX<Scalar>::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) a(i, j) = a(j, i) = Scalar(u(rng));
  }
  return a;
}

/// Random vector with zero sum.
template <typename Scalar, typename Rng>
VectorX<Scalar> random_zero_sum(Rng& rng, Index n) {
  std::normal_distribution<double> g(0.0, 1.0);
  VectorX<Scalar> v(n);
  for (Index i = 0; i < n; ++i) v[i] = Scalar(g(rng));
  return v.array() - v.mean();
}

}  // namespace msdiff

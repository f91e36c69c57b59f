#pragma once

#include <Eigen/Dense>

#include <complex>

namespace msdiff {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using ComplexVectorX = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

using Index = Eigen::Index;

/// Floor applied to mole fractions inside matrix assembly.
inline constexpr double kCompositionFloor = 1e-12;

}  // namespace msdiff

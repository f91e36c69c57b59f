#pragma once

// Core domain types: compositions, flux/force vectors and the mixture description.

#include "msdiff/errors.hpp"
#include "msdiff/types.hpp"

#include <cmath>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace msdiff {

/// Ideal solution: all activity coefficients equal one.
struct Ideal {};

/// Multicomponent two-suffix Margules model with g_ex/RT = sum_{j<k} A_jk x_j x_k.
/// `interaction` is symmetric with zero diagonal.
template <typename Scalar>
struct Margules {
  MatrixX<Scalar> interaction;
};

template <typename Scalar>
using BasicThermoModel = std::variant<Ideal, Margules<Scalar>>;

using ThermoModel = BasicThermoModel<double>;

/// Mole fractions on the simplex plus the total molar concentration.
template <typename Scalar>
struct BasicComposition {
  VectorX<Scalar> x;
  Scalar c_tot{1};

  Index size() const { return x.size(); }
  VectorX<Scalar> concentrations() const { return c_tot * x; }
};

using Composition = BasicComposition<double>;

template <typename Scalar>
struct BasicDrivingForce {
  VectorX<Scalar> d;
};

template <typename Scalar>
struct BasicFluxSet {
  VectorX<Scalar> J;
};

using DrivingForce = BasicDrivingForce<double>;
using FluxSet = BasicFluxSet<double>;

/// Species labels, symmetric Maxwell-Stefan diffusivities (diagonal stored as
/// zero) and the thermodynamic model.
template <typename Scalar>
struct BasicMixtureSpec {
  std::vector<std::string> names;
  MatrixX<Scalar> dmat;
  BasicThermoModel<Scalar> thermo = Ideal{};

  Index n() const { return dmat.rows(); }
};

using MixtureSpec = BasicMixtureSpec<double>;

/// Relative threshold below which negative concentrations count as round-off.
inline constexpr double kNegativeClampTolerance = 1e-10;

/// x_i = c_i / sum(c). Round-off negatives (above -1e-10 * sum(c)) are clamped to zero.
template <typename Scalar>
BasicComposition<Scalar> mole_fractions(const VectorX<Scalar>& c) {
  using std::abs;
  const Scalar raw_total = c.sum();
  if (!(raw_total > Scalar(0))) {
    throw Error(ErrorCode::NonPositiveTotal, "sum of concentrations must be positive");
  }
  VectorX<Scalar> clamped = c;
  for (Index i = 0; i < c.size(); ++i) {
    if (c[i] < Scalar(0)) {
      if (c[i] < -Scalar(kNegativeClampTolerance) * raw_total) {
        std::ostringstream os;
        os << "c[" << i << "] = " << c[i];
        throw Error(ErrorCode::NegativeConcentration, os.str());
      }
      clamped[i] = Scalar(0);
    }
  }
  const Scalar total = clamped.sum();
  return {clamped / total, total};
}

enum class SpecIssueKind { BadDimension, AsymmetricD, NonPositiveD, NonzeroDiagonal, InvalidInteraction };

struct SpecIssue {
  SpecIssueKind kind;
  std::string message;
};

/// Collects every violated invariant of `spec`; an empty result means valid.
template <typename Scalar>
std::vector<SpecIssue> validate_spec(const BasicMixtureSpec<Scalar>& spec) {
  std::vector<SpecIssue> issues;
  auto add = [&](SpecIssueKind kind, Index i, Index j, const std::string& what) {
    std::ostringstream os;
    os << what << " at (" << i << ", " << j << ")";
    issues.push_back({kind, os.str()});
  };

  const Index n = spec.dmat.rows();
  if (n < 2 || spec.dmat.cols() != n) {
    issues.push_back({SpecIssueKind::BadDimension, "diffusivity matrix must be square with n >= 2"});
    return issues;
  }
  if (!spec.names.empty() && static_cast<Index>(spec.names.size()) != n) {
    issues.push_back({SpecIssueKind::BadDimension, "number of names does not match species count"});
  }
  for (Index i = 0; i < n; ++i) {
    if (spec.dmat(i, i) != Scalar(0)) add(SpecIssueKind::NonzeroDiagonal, i, i, "diagonal diffusivity must be 0");
    for (Index j = i + 1; j < n; ++j) {
      if (spec.dmat(i, j) != spec.dmat(j, i)) add(SpecIssueKind::AsymmetricD, i, j, "diffusivity not symmetric");
      if (!(spec.dmat(i, j) > Scalar(0)) || !(spec.dmat(j, i) > Scalar(0))) {
        add(SpecIssueKind::NonPositiveD, i, j, "diffusivity must be positive");
      }
    }
  }
  if (const auto* m = std::get_if<Margules<Scalar>>(&spec.thermo)) {
    const auto& a = m->interaction;
    if (a.rows() != n || a.cols() != n) {
      issues.push_back({SpecIssueKind::BadDimension, "Margules interaction matrix must be n x n"});
    } else {
      for (Index i = 0; i < n; ++i) {
        if (a(i, i) != Scalar(0)) add(SpecIssueKind::InvalidInteraction, i, i, "Margules diagonal must be 0");
        for (Index j = i + 1; j < n; ++j) {
          if (a(i, j) != a(j, i)) add(SpecIssueKind::InvalidInteraction, i, j, "Margules matrix not symmetric");
        }
      }
    }
  }
  return issues;
}

/// Throws the first issue reported by validate_spec.
template <typename Scalar>
void require_valid(const BasicMixtureSpec<Scalar>& spec) {
  const auto issues = validate_spec(spec);
  if (issues.empty()) return;
  ErrorCode code = ErrorCode::BadDimension;
  switch (issues.front().kind) {
    case SpecIssueKind::AsymmetricD: code = ErrorCode::AsymmetricD; break;
    case SpecIssueKind::NonPositiveD: code = ErrorCode::NonPositiveD; break;
    default: break;
  }
  throw Error(code, issues.front().message);
}

}  // namespace msdiff

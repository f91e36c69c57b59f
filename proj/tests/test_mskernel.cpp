#include "doctest.h"

#include "msdiff/mskernel.hpp"
#include "msdiff/sampling.hpp"
#include "oracles.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace msdiff;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXd uniform_d(Index n, double d) {
  MatrixXd m = MatrixXd::Constant(n, n, d);
  m.diagonal().setZero();
  return m;
}

MatrixXd ternary_d(double d12, double d13, double d23) {
  MatrixXd m(3, 3);
  m << 0, d12, d13, d12, 0, d23, d13, d23, 0;
  return m;
}

double rel(const VectorXd& a, const VectorXd& b) {
  const double s = std::max(a.norm(), b.norm());
  return s == 0.0 ? 0.0 : (a - b).norm() / s;
}

}  // namespace

TEST_CASE("assemble_A") {
  const MatrixXd a = assemble_A(VectorXd{{0.5, 0.5}}, uniform_d(2, 2.0)).a;
  CHECK(a.isApprox(MatrixXd{{-0.25, 0.25}, {0.25, -0.25}}, 1e-15));

  std::mt19937_64 rng(1);
  const VectorXd x = random_interior_composition<double>(rng, 3);
  const MatrixXd eq = assemble_A(x, uniform_d(3, 2.5)).a;
  const MatrixXd expected = (x * VectorXd::Ones(3).transpose() - MatrixXd::Identity(3, 3)) / 2.5;
  CHECK((eq - expected).cwiseAbs().maxCoeff() <= 1e-15);

  for (int trial = 0; trial < 200; ++trial) {
    const Index n = 2 + trial % 5;
    const VectorXd y = random_interior_composition<double>(rng, n);
    const MatrixXd dm = random_diffusivities<double>(rng, n);
    const MatrixXd m = assemble_A(y, dm).a;
    CHECK((m - oracle::ms_matrix(y, dm)).cwiseAbs().maxCoeff() <= 1e-14 * m.norm());
    CHECK(is_quasi_positive(m));
    CHECK(is_irreducible(m));
    CHECK((m * y).norm() <= 1e-12 * m.norm());
    CHECK(m.colwise().sum().norm() <= 1e-12 * m.norm());
  }
}

TEST_CASE("irreducibility is structural") {
  MatrixXd reducible{{-1, 0, 0}, {1, -1, 0}, {0, 1, -1}};
  CHECK_FALSE(is_irreducible(reducible));
  CHECK(is_irreducible(MatrixXd{{-1, 1}, {1, -1}}));
}

TEST_CASE("assemble_A_sym") {
  const MatrixXd s1 = assemble_A_sym(VectorXd{{0.5, 0.5}}, uniform_d(2, 2.0));
  CHECK(s1.isApprox(assemble_A(VectorXd{{0.5, 0.5}}, uniform_d(2, 2.0)).a, 1e-15));

  const VectorXd x{{0.8, 0.2}};
  const MatrixXd s2 = assemble_A_sym(x, uniform_d(2, 1.0));
  CHECK((s2 - MatrixXd{{-0.2, 0.4}, {0.4, -0.8}}).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK((s2 * VectorXd(x.array().sqrt())).norm() <= 1e-12);

  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = 2 + trial % 5;
    const VectorXd y = random_interior_composition<double>(rng, n);
    const MatrixXd dm = random_diffusivities<double>(rng, n);
    const MatrixXd s = assemble_A_sym(y, dm);
    CHECK((s - s.transpose()).cwiseAbs().maxCoeff() <= 1e-14 * s.norm());
    CHECK((s * VectorXd(y.array().sqrt())).norm() <= 1e-12 * s.norm());

    // similarity: nonsymmetric eigensolve of A against symmetric eigensolve of A_S
    Eigen::EigenSolver<MatrixXd> general(assemble_A(y, dm).a, false);
    VectorXd re = general.eigenvalues().real();
    CHECK(general.eigenvalues().imag().cwiseAbs().maxCoeff() <= 1e-10 * s.norm());
    std::sort(re.data(), re.data() + n);
    Eigen::SelfAdjointEigenSolver<MatrixXd> sym(s, Eigen::EigenvaluesOnly);
    CHECK((re - sym.eigenvalues()).cwiseAbs().maxCoeff() <= 1e-10 * s.norm());
  }
}

TEST_CASE("assemble_B and ternary closed forms") {
  const VectorXd third = VectorXd::Constant(3, 1.0 / 3.0);
  CHECK((assemble_B(third, uniform_d(3, 1.0)).b - MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-15);

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const VectorXd x = random_interior_composition<double>(rng, 3);
    const MatrixXd dm = random_diffusivities<double>(rng, 3);
    const double d12 = dm(0, 1), d13 = dm(0, 2), d23 = dm(1, 2);
    const MatrixXd b = assemble_B(x, dm).b;
    // explicit ternary matrix
    MatrixXd bt(2, 2);
    bt << 1 / d13 + x[1] * (1 / d12 - 1 / d13), -x[0] * (1 / d12 - 1 / d13),
        -x[1] * (1 / d12 - 1 / d23), 1 / d23 + x[0] * (1 / d12 - 1 / d23);
    CHECK((b - bt).cwiseAbs().maxCoeff() <= 1e-14 * bt.norm());
    const double det = x[0] / (d12 * d13) + x[1] / (d12 * d23) + x[2] / (d13 * d23);
    const double tr = (x[0] + x[1]) / d12 + (x[0] + x[2]) / d13 + (x[1] + x[2]) / d23;
    CHECK(std::abs(b.determinant() - det) <= 1e-12 * det);
    CHECK(std::abs(b.trace() - tr) <= 1e-12 * tr);
    CHECK(tr * tr >= 3.0 * det);
  }
}

TEST_CASE("spectrum") {
  const auto r1 = spectrum(VectorXd{{0.5, 0.5}}, uniform_d(2, 2.0));
  CHECK(r1.eigenvalues[0] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(r1.eigenvalues[1] == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(r1.delta == 0.5);
  CHECK(r1.gap_ok);

  const auto r2 = spectrum(VectorXd{{0.2, 0.3, 0.5}}, uniform_d(3, 4.0));
  CHECK(std::abs(r2.eigenvalues[0]) <= 1e-14);
  CHECK(r2.eigenvalues[1] == doctest::Approx(-0.25).epsilon(1e-13));
  CHECK(r2.eigenvalues[2] == doctest::Approx(-0.25).epsilon(1e-13));
  CHECK(r2.delta == 0.25);
  CHECK(r2.gap_ok);

  std::mt19937_64 rng(4);
  int failures = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Index n = 2 + trial % 5;
    const auto r = spectrum(random_interior_composition<double>(rng, n), random_diffusivities<double>(rng, n));
    if (!r.gap_ok) ++failures;
  }
  CHECK(failures == 0);
}

TEST_CASE("flux solves: worked examples") {
  const double d12 = 3.0;
  const Composition comp{VectorXd{{0.5, 0.5}}, 1.0};
  const DrivingForce force{VectorXd{{0.7, -0.7}}};
  const VectorXd expected{{-d12 * 0.7, d12 * 0.7}};
  CHECK(rel(solve_fluxes_invariant(comp, uniform_d(2, d12), force).J, expected) <= 1e-14);
  CHECK(rel(solve_fluxes_reduced(comp, uniform_d(2, d12), force).J, expected) <= 1e-14);
  CHECK(rel(solve_fluxes_bordered(comp, uniform_d(2, d12), force).J, expected) <= 1e-14);

  const DrivingForce zero{VectorXd::Zero(3)};
  const Composition tern{VectorXd{{0.2, 0.3, 0.5}}, 2.0};
  CHECK(solve_fluxes_invariant(tern, ternary_d(1, 2, 3), zero).J.isZero(0.0));
  CHECK(solve_fluxes_reduced(tern, ternary_d(1, 2, 3), zero).J.isZero(0.0));

  // equal diffusivities: J = -D c_tot d
  const DrivingForce d3{VectorXd{{0.4, -0.1, -0.3}}};
  const VectorXd fick = -1.5 * 2.0 * d3.d;
  CHECK(rel(solve_fluxes_invariant(tern, uniform_d(3, 1.5), d3).J, fick) <= 1e-13);
  CHECK(rel(solve_fluxes_reduced(tern, uniform_d(3, 1.5), d3).J, fick) <= 1e-13);
}

TEST_CASE("osmotic diffusion and ternary sector") {
  const MatrixXd dm = ternary_d(83.3, 68.0, 16.8);
  const Composition comp{VectorXd{{0.3, 0.4, 0.3}}, 1.0};
  const DrivingForce force{VectorXd{{1.0, 0.0, -1.0}}};
  const VectorXd j = solve_fluxes_invariant(comp, dm, force).J;
  CHECK(std::abs(j[1]) > 1e-3 * j.cwiseAbs().maxCoeff());
  CHECK(rel(j, solve_fluxes_reduced(comp, dm, force).J) <= 1e-10);

  const MatrixXd b = assemble_B(comp.x, dm).b;
  Eigen::EigenSolver<MatrixXd> eig(b, false);
  for (Index k = 0; k < 2; ++k) {
    CHECK(eig.eigenvalues()[k].real() > 0.0);
    CHECK(std::abs(std::arg(eig.eigenvalues()[k])) < std::numbers::pi / 6.0);
  }
}

TEST_CASE("flux solves: cross-route agreement and structure") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 1000; ++trial) {
    const Index n = 2 + trial % 5;
    const Composition comp{random_interior_composition<double>(rng, n), 0.5 + trial % 3};
    const MatrixXd dm = random_diffusivities<double>(rng, n);
    const DrivingForce force{random_zero_sum<double>(rng, n)};
    const VectorXd inv = solve_fluxes_invariant(comp, dm, force).J;
    const VectorXd red = solve_fluxes_reduced(comp, dm, force).J;
    const VectorXd bor = solve_fluxes_bordered(comp, dm, force).J;
    CHECK(rel(inv, red) <= 1e-10);
    CHECK(rel(inv, bor) <= 1e-10);
    CHECK(std::abs(inv.sum()) <= 1e-12 * inv.cwiseAbs().maxCoeff());
    CHECK(std::abs(red.sum()) <= 1e-12 * red.cwiseAbs().maxCoeff());
    const MatrixXd a = assemble_A(comp.x, dm).a;
    CHECK((a * inv - comp.c_tot * force.d).norm() <= 1e-10 * comp.c_tot * force.d.norm());
  }
}

TEST_CASE("Onsager symmetry and pointwise entropy inequality") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 300; ++trial) {
    const Index n = 2 + trial % 5;
    const VectorXd x = random_interior_composition<double>(rng, n);
    const MatrixXd dm = random_diffusivities<double>(rng, n);
    const Composition comp{x, 1.0};
    const VectorXd d1 = random_zero_sum<double>(rng, n);
    const VectorXd d2 = random_zero_sum<double>(rng, n);
    const VectorXd j1 = solve_fluxes_invariant(comp, dm, DrivingForce{d1}).J;
    const VectorXd j2 = solve_fluxes_invariant(comp, dm, DrivingForce{d2}).J;
    const VectorXd w = x.cwiseInverse();
    const double lhs = j1.dot(w.cwiseProduct(d2));
    const double rhs = d1.dot(w.cwiseProduct(j2));
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(std::abs(lhs), std::abs(rhs)));

    // convex Margules, |A| small
    const ThermoModel model = Margules<double>{random_interaction<double>(rng, n, 0.5)};
    const VectorXd grad = random_zero_sum<double>(rng, n);
    const VectorXd d = driving_force(model, x, grad).d;
    const VectorXd j = solve_fluxes_invariant(comp, dm, DrivingForce{d}).J;
    const VectorXd grad_mu = w.cwiseProduct(d);
    CHECK(-j.dot(grad_mu) >= -1e-12 * j.cwiseAbs().maxCoeff() * grad_mu.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("fick_limit_D") {
  std::mt19937_64 rng(7);
  const VectorXd xb = random_interior_composition<double>(rng, 2);
  CHECK(fick_limit_D(xb, uniform_d(2, 3.3), 0) == doctest::Approx(3.3 / xb[1]).epsilon(1e-14));
  CHECK(fick_limit_D(VectorXd{{1e-9, 1.0 - 1e-9}}, uniform_d(2, 3.3), 0) == doctest::Approx(3.3).epsilon(1e-8));

  const VectorXd x{{0.2, 0.3, 0.5}};
  CHECK(fick_limit_D(x, uniform_d(3, 2.0), 2) == doctest::Approx(2.0 / 0.5).epsilon(1e-14));
  CHECK(fick_limit_D(x, uniform_d(3, 2.0), 0) == doctest::Approx(2.0 / 0.8).epsilon(1e-14));

  try {
    fick_limit_D(VectorXd{{1.0, 0.0, 0.0}}, uniform_d(3, 1.0), 0);
    FAIL("expected DegenerateComposition");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateComposition);
  }

  SUBCASE("dilute species decouples from cross effects") {
    const MatrixXd dm = ternary_d(0.5, 4.0, 1.7);
    std::vector<double> errors;
    for (double xi : {1e-3, 1e-5, 1e-7}) {
      VectorXd y{{xi, 0.6, 0.4 - xi}};
      const VectorXd grad{{0.3, 0.5, -0.8}};
      const double c_tot = 2.0;
      const VectorXd j = solve_fluxes_invariant(Composition{y, c_tot}, dm, DrivingForce{grad}).J;
      const double fick = -fick_limit_D(y, dm, 0) * c_tot * grad[0];
      errors.push_back(std::abs(j[0] - fick) / std::abs(fick));
    }
    CHECK(errors[0] < 1e-2);
    CHECK(errors[1] <= errors[0] * 2e-2);
    CHECK(errors[2] <= errors[1] * 2e-2);
  }
}

TEST_CASE("diffusion_operator_spectrum") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 2 + trial % 5;
    const auto values = diffusion_operator_spectrum<double>(random_interior_composition<double>(rng, n),
                                                            uniform_d(n, 1.7), Ideal{});
    for (Index k = 0; k < values.size(); ++k) {
      CHECK(values[k].real() == doctest::Approx(1.7).epsilon(1e-12));
      CHECK(std::abs(values[k].imag()) <= 1e-12);
    }
  }

  SUBCASE("ideal ternary, frozen values and explicit assembly") {
    const VectorXd x{{0.2, 0.3, 0.5}};
    const MatrixXd dm = ternary_d(1.0, 2.0, 4.0);
    const auto values = diffusion_operator_spectrum<double>(x, dm, Ideal{});
    REQUIRE(values.size() == 2);
    CHECK(values[0].real() == doctest::Approx(3.032657860621751).epsilon(1e-10));
    CHECK(values[1].real() == doctest::Approx(1.3883947709571942).epsilon(1e-10));

    const MatrixXd explicit_op =
        oracle::diffusion_operator_explicit(x, dm, MatrixXd::Identity(3, 3), oracle::zero_sum_basis_qr(3));
    Eigen::EigenSolver<MatrixXd> eig(explicit_op, false);
    VectorXd re = eig.eigenvalues().real();
    std::sort(re.data(), re.data() + re.size(), std::greater<>());
    CHECK(values[0].real() == doctest::Approx(re[0]).epsilon(1e-10));
    CHECK(values[1].real() == doctest::Approx(re[1]).epsilon(1e-10));
  }

  SUBCASE("Margules operator against explicit assembly") {
    for (int trial = 0; trial < 50; ++trial) {
      const Index n = 3 + trial % 3;
      const VectorXd x = random_interior_composition<double>(rng, n, 0.05);
      const MatrixXd dm = random_diffusivities<double>(rng, n);
      const ThermoModel model = Margules<double>{random_interaction<double>(rng, n, 1.0)};
      const MatrixXd gamma = gamma_matrix(model, x).g;
      const MatrixXd p = zero_sum_basis<double>(n);
      const MatrixXd ours = diffusion_operator_matrix(x, dm, model);
      const MatrixXd theirs = oracle::diffusion_operator_explicit(x, dm, gamma, p);
      CHECK((ours - theirs).cwiseAbs().maxCoeff() <= 1e-9 * theirs.norm());
      const auto values = diffusion_operator_spectrum(x, dm, model);
      for (Index k = 0; k < values.size(); ++k) CHECK(values[k].real() > 0.0);
    }
  }

  SUBCASE("binary Margules near the spinodal") {
    auto model = [](double a) {
      return ThermoModel{Margules<double>{MatrixXd{{0, a}, {a, 0}}}};
    };
    const VectorXd x{{0.5, 0.5}};
    const auto below = diffusion_operator_spectrum(x, uniform_d(2, 1.0), model(1.9));
    CHECK(below[0].real() == doctest::Approx(1.0 - 2.0 * 1.9 * 0.25).epsilon(1e-12));
    CHECK(below[0].real() > 0.0);
    const auto raw = diffusion_operator_eigenvalues(x, uniform_d(2, 1.0), model(2.1));
    CHECK(raw[0].real() == doctest::Approx(1.0 - 2.0 * 2.1 * 0.25).epsilon(1e-12));
    CHECK(raw[0].real() < 0.0);
    try {
      diffusion_operator_spectrum(x, uniform_d(2, 1.0), model(2.1));
      FAIL("expected NotConvex");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NotConvex);
    }
  }
}

TEST_CASE("zero-sum basis is orthonormal") {
  for (Index n = 2; n <= 8; ++n) {
    const MatrixXd p = zero_sum_basis<double>(n);
    CHECK((p.transpose() * p - MatrixXd::Identity(n - 1, n - 1)).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(p.colwise().sum().cwiseAbs().maxCoeff() <= 1e-15);
  }
}

TEST_CASE("kernel instantiates for long double") {
  using LD = long double;
  MatrixX<LD> dm(3, 3);
  dm << 0, 1, 2, 1, 0, 4, 2, 4, 0;
  const VectorX<LD> x{{0.2L, 0.3L, 0.5L}};
  const auto report = spectrum(x, dm);
  CHECK(report.gap_ok);
  const BasicComposition<LD> comp{x, 1};
  const BasicDrivingForce<LD> force{VectorX<LD>{{1.0L, -0.5L, -0.5L}}};
  const auto j1 = solve_fluxes_invariant(comp, dm, force).J;
  const auto j2 = solve_fluxes_reduced(comp, dm, force).J;
  CHECK(static_cast<double>((j1 - j2).norm() / j1.norm()) <= 1e-15);
}

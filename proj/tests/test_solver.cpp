#include "doctest.h"

#include "msdiff/mskernel.hpp"
#include "msdiff/solver.hpp"

#include <cmath>

using namespace msdiff;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MixtureSpec uniform_spec(Index n, double d, ThermoModel thermo = Ideal{}) {
  MatrixXd m = MatrixXd::Constant(n, n, d);
  m.diagonal().setZero();
  std::vector<std::string> names;
  for (Index i = 0; i < n; ++i) names.push_back("s" + std::to_string(i));
  return MixtureSpec{names, m, std::move(thermo)};
}

MixtureSpec ternary_spec(double d12, double d13, double d23) {
  MatrixXd m(3, 3);
  m << 0, d12, d13, d12, 0, d23, d13, d23, 0;
  return MixtureSpec{{"a", "b", "c"}, m, Ideal{}};
}

Field step_field(Index cells, const VectorXd& left, const VectorXd& right, double c_tot = 1.0) {
  MatrixXd c(cells, left.size());
  for (Index i = 0; i < cells; ++i) c.row(i) = c_tot * (i < cells / 2 ? left : right).transpose();
  return make_field(Grid1D{cells, 1.0}, c);
}

}  // namespace

TEST_CASE("make_field validation") {
  CHECK_THROWS_AS(make_field(Grid1D{3, 1.0}, MatrixXd::Ones(2, 2)), Error);
  try {
    make_field(Grid1D{2, 1.0}, MatrixXd{{1.0, 0.0}, {0.5, 0.6}});
    FAIL("expected BadDimension");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BadDimension);
  }
  try {
    make_field(Grid1D{2, 1.0}, MatrixXd{{1.1, -0.1}, {0.5, 0.5}});
    FAIL("expected NegativeConcentration");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NegativeConcentration);
  }
}

TEST_CASE("face fluxes") {
  const auto spec = ternary_spec(1.0, 2.0, 4.0);
  const VectorXd x{{0.2, 0.3, 0.5}};
  const Field uniform = step_field(10, x, x);
  CHECK(face_fluxes(uniform, spec).isZero(0.0));

  const double d12 = 2.5, c_tot = 3.0;
  MatrixXd c2(2, 2);
  c2 << 0.6 * c_tot, 0.4 * c_tot, 0.4 * c_tot, 0.6 * c_tot;
  const Field two = make_field(Grid1D{2, 1.0}, c2);
  const MatrixXd j = face_fluxes(two, uniform_spec(2, d12));
  const double expected = 0.2 * d12 * c_tot / two.grid.h();
  CHECK(j(1, 0) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(j(1, 1) == doctest::Approx(-expected).epsilon(1e-14));
  CHECK(j.row(0).isZero(0.0));
  CHECK(j.row(2).isZero(0.0));

  const Field stepped = step_field(20, VectorXd{{0.7, 0.2, 0.1}}, VectorXd{{0.1, 0.3, 0.6}});
  const MatrixXd js = face_fluxes(stepped, spec);
  CHECK(js.row(0).isZero(0.0));
  CHECK(js.row(20).isZero(0.0));
  CHECK(js.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("stable_dt") {
  const auto spec = uniform_spec(2, 2.0);
  const Field f = step_field(10, VectorXd{{0.8, 0.2}}, VectorXd{{0.3, 0.7}});
  const double h = f.grid.h();
  CHECK(stable_dt(f, spec, {}, 0.4) == doctest::Approx(0.4 * h * h / 4.0).epsilon(1e-12));
  const Field fine = step_field(20, VectorXd{{0.8, 0.2}}, VectorXd{{0.3, 0.7}});
  CHECK(stable_dt(fine, spec, {}, 0.4) == doctest::Approx(stable_dt(f, spec, {}, 0.4) / 4.0).epsilon(1e-12));

  // reaction cap: A -> B with k = 50 at c_A = 0.8 limits dt to 0.1 * 0.8 / 40
  const auto reactions = ReactionNetwork::reversible({{0, 1}}, {{1, 1}}, 50.0, 0.0, 2);
  const Field flat = step_field(4, VectorXd{{0.8, 0.2}}, VectorXd{{0.8, 0.2}});
  CHECK(stable_dt(flat, uniform_spec(2, 1e-6), reactions, 0.4) == doctest::Approx(0.1 * 0.8 / 40.0).epsilon(1e-12));
}

TEST_CASE("reaction network") {
  CHECK_THROWS_AS(ReactionNetwork({Reaction{{{0, 1}}, {{1, 2}}, 1.0}}, 2), Error);  // moles
  CHECK_THROWS_AS(ReactionNetwork({Reaction{{{0, 1}}, {{5, 1}}, 1.0}}, 2), Error);  // index
  CHECK_THROWS_AS(ReactionNetwork({Reaction{{{0, 1}}, {{1, 1}}, -1.0}}, 2), Error);
  const auto net = ReactionNetwork::reversible({{0, 2}}, {{1, 1}, {2, 1}}, 2.0, 3.0, 3);
  const VectorXd r = net.rates(VectorXd{{0.5, 0.2, 0.3}});
  const double forward = 2.0 * 0.25, backward = 3.0 * 0.06;
  CHECK(r[0] == doctest::Approx(-2.0 * (forward - backward)));
  CHECK(r[1] == doctest::Approx(forward - backward));
  CHECK(std::abs(r.sum()) <= 1e-15);
  // a species absent from the cell is never consumed
  const VectorXd r0 = net.rates(VectorXd{{0.0, 0.5, 0.5}});
  CHECK(r0[0] >= 0.0);
}

TEST_CASE("simulation conserves mass and keeps totals") {
  const auto spec = ternary_spec(1.0, 2.0, 4.0);
  const Field f0 = step_field(40, VectorXd{{0.7, 0.2, 0.1}}, VectorXd{{0.1, 0.3, 0.6}}, 2.0);
  SimConfig cfg;
  cfg.t_end = 0.02;
  cfg.checkpoint_interval = 0.005;
  const Trajectory traj = simulate(f0, spec, {}, cfg);
  CHECK(traj.checkpoints.size() == 5);
  CHECK(traj.checkpoints.back().field.time == doctest::Approx(0.02).epsilon(1e-14));
  const VectorXd m0 = traj.samples.front().masses;
  for (const auto& s : traj.samples) {
    CHECK((s.masses - m0).cwiseAbs().maxCoeff() <= 1e-12 * m0.sum());
    CHECK(s.min_concentration >= 0.0);
  }
  const Field& last = traj.checkpoints.back().field;
  const VectorXd totals = last.c.rowwise().sum();
  CHECK((totals.array() - 2.0).abs().maxCoeff() <= 1e-8 * 2.0);
  for (std::size_t k = 1; k < traj.samples.size(); ++k) {
    CHECK(traj.samples[k].V <= traj.samples[k - 1].V + 1e-12 * std::abs(traj.samples[0].V));
  }
}

TEST_CASE("binary step relaxes monotonically") {
  const auto spec = uniform_spec(2, 1.0);
  const Field f0 = step_field(20, VectorXd{{0.9, 0.1}}, VectorXd{{0.1, 0.9}});
  SimConfig cfg;
  cfg.t_end = 0.05;
  Field f = f0;
  while (f.time < cfg.t_end) {
    const Field next = step(f, spec, {}, stable_dt(f, spec, {}, 0.4));
    // profile stays sorted (maximum principle for the scalar reduction)
    for (Index i = 1; i < next.cells(); ++i) CHECK(next.c(i, 0) <= next.c(i - 1, 0) + 1e-14);
    CHECK(next.c.col(0).maxCoeff() <= f.c.col(0).maxCoeff() + 1e-14);
    CHECK(next.c.col(0).minCoeff() >= f.c.col(0).minCoeff() - 1e-14);
    f = next;
  }
}

TEST_CASE("reaction drives a uniform field to equilibrium") {
  const double kf = 2.0, kb = 0.5;
  const auto spec = uniform_spec(2, 1.0);
  const auto reactions = ReactionNetwork::reversible({{0, 1}}, {{1, 1}}, kf, kb, 2);
  const Field f0 = step_field(4, VectorXd{{0.9, 0.1}}, VectorXd{{0.9, 0.1}});
  SimConfig cfg;
  cfg.t_end = 20.0;
  const Trajectory traj = simulate(f0, spec, reactions, cfg);
  const Field& last = traj.checkpoints.back().field;
  for (Index i = 0; i < last.cells(); ++i) {
    CHECK(last.c(i, 1) / last.c(i, 0) == doctest::Approx(kf / kb).epsilon(1e-8));
  }
}

TEST_CASE("simulate error paths") {
  const auto spec = uniform_spec(2, 1.0);
  const Field f0 = step_field(10, VectorXd{{0.9, 0.1}}, VectorXd{{0.1, 0.9}});
  SimConfig cfg;
  cfg.t_end = 1.0;
  cfg.max_steps = 5;
  try {
    simulate(f0, spec, {}, cfg);
    FAIL("expected MaxStepsExceeded");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MaxStepsExceeded);
  }

  // an oversized step drives a cell negative
  try {
    step(f0, spec, {}, 10.0);
    FAIL("expected PositivityViolation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::PositivityViolation);
  }

  // a species with zero content stays at zero, not below
  const Field edge = step_field(10, VectorXd{{1.0, 0.0}}, VectorXd{{0.5, 0.5}});
  const Field next = step(edge, spec, {}, stable_dt(edge, spec, {}, 0.4));
  CHECK(next.c.minCoeff() >= 0.0);
}

TEST_CASE("dissipation is nonnegative and vanishes at equilibrium") {
  const auto spec = ternary_spec(0.5, 3.0, 1.2);
  const Field f = step_field(16, VectorXd{{0.6, 0.3, 0.1}}, VectorXd{{0.2, 0.2, 0.6}});
  CHECK(dissipation(f, face_fluxes(f, spec), spec, {}) > 0.0);
  const Field u = step_field(16, VectorXd{{0.6, 0.3, 0.1}}, VectorXd{{0.6, 0.3, 0.1}});
  CHECK(dissipation(u, face_fluxes(u, spec), spec, {}) == 0.0);
  const Field z = step_field(16, VectorXd{{1.0, 0.0, 0.0}}, VectorXd{{0.2, 0.2, 0.6}});
  CHECK(std::isnan(dissipation(z, face_fluxes(z, spec), spec, {})));
}

TEST_CASE("trace species next to a jump can undershoot and is reported") {
  // Strong drag contrast and a trace species on one side of a discontinuity:
  // the mean-composition face flux drains the depleted cell faster than it
  // refills. Refining the grid does not help (the undershoot is self-similar).
  MatrixXd dm(3, 3);
  dm << 0, 0.14159, 5.2628, 0.14159, 0, 0.530226, 5.2628, 0.530226, 0;
  const MixtureSpec spec{{"a", "b", "c"}, dm, Ideal{}};
  for (Index cells : {24, 48}) {
    const VectorXd left{{0.896926, 0.00749879, 0.0955756}};
    const VectorXd right{{0.232454, 0.123634, 0.643912}};
    const Field f0 = step_field(cells, left / left.sum(), right / right.sum());
    SimConfig cfg;
    cfg.t_end = 0.02;
    try {
      simulate(f0, spec, {}, cfg);
      FAIL("expected PositivityViolation");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::PositivityViolation);
    }
  }
}

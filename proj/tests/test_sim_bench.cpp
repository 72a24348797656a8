// Copyright (c) 2026 lpo-mor contributors.
// SPDX-License-Identifier: Apache-2.0

#include "lpo/sim_bench.hpp"

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "doctest.h"
#include "lpo/cp_tensor.hpp"
#include "lpo/energy.hpp"
#include "lpo/errors.hpp"
#include "lpo/kron_solver.hpp"
#include "lpo/lyapunov.hpp"
#include "oracles.hpp"

namespace {

lpo::LPOSystem scalar_system(double a) {
  Eigen::MatrixXd A(1, 1), B(1, 1);
  A << a;
  B << 1.0;
  Eigen::VectorXd e(1);
  e << 1.0;
  return lpo::make_lpo_system(A, B, {lpo::cp_rank_one({e})});
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST_CASE("simulate reproduces the scalar step response") {
  const lpo::LPOSystem sys = scalar_system(-1.0);
  const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(1);
  const lpo::Trajectory traj =
      lpo::simulate(sys, lpo::step_input(1), x0, 0.0, 5.0, 1e-3);

  REQUIRE(traj.times.size() == 5001);
  CHECK(traj.times(0) == 0.0);
  CHECK(traj.times(5000) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(traj.states.rows() == 1);
  CHECK(traj.states.cols() == traj.times.size());
  double worst = 0.0;
  for (Eigen::Index i = 0; i < traj.times.size(); ++i) {
    const double exact = 1.0 - std::exp(-traj.times(i));
    worst = std::max(worst, std::abs(traj.outputs(i) - exact));
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("simulate converges at fourth order in the step size") {
  std::mt19937 rng(2026);
  const int n = 3;
  const Eigen::MatrixXd A = oracle::random_stable(n, rng);
  const Eigen::MatrixXd B = oracle::randn(n, 1, rng);
  const lpo::LPOSystem sys =
      lpo::make_lpo_system(A, B, {oracle::random_cp(1, n, 1, rng)});
  const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(n);

  const double t1 = 1.0;
  const Eigen::MatrixXd expAt = (A * t1).exp();
  const Eigen::VectorXd exact =
      A.lu().solve((expAt - Eigen::MatrixXd::Identity(n, n)) * B.col(0));

  std::vector<double> log_dt, log_err;
  for (double dt : {0.05, 0.025, 0.0125}) {
    const lpo::Trajectory traj =
        lpo::simulate(sys, lpo::step_input(1), x0, 0.0, t1, dt);
    const double err =
        (traj.states.col(traj.states.cols() - 1) - exact).norm();
    REQUIRE(err > 0.0);
    log_dt.push_back(std::log(dt));
    log_err.push_back(std::log(err));
  }
  const double slope = fit_slope(log_dt, log_err);
  CHECK(slope > 3.5);
  CHECK(slope < 4.5);
}

TEST_CASE("simulate lands exactly on the requested end time") {
  const lpo::LPOSystem sys = scalar_system(-1.0);
  const Eigen::VectorXd x0 = Eigen::VectorXd::Ones(1);
  const lpo::Trajectory traj =
      lpo::simulate(sys, lpo::zero_input(1), x0, 0.0, 1.0, 0.3);
  REQUIRE(traj.times.size() == 5);  // ceil(1/0.3) = 4 steps of h = 0.25
  CHECK(traj.times(4) == 1.0);
  CHECK(traj.times(1) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("simulate aborts on divergent states") {
  const lpo::LPOSystem sys = scalar_system(1.0);
  const Eigen::VectorXd x0 = Eigen::VectorXd::Ones(1);
  bool threw = false;
  try {
    lpo::simulate(sys, lpo::zero_input(1), x0, 0.0, 300.0, 1e-2);
  } catch (const lpo::numerical_error& err) {
    threw = true;
    CHECK(std::string(err.what()).find("at t") != std::string::npos);
  }
  CHECK(threw);
}

TEST_CASE("simulate validates its arguments") {
  const lpo::LPOSystem sys = scalar_system(-1.0);
  const Eigen::VectorXd x0 = Eigen::VectorXd::Ones(1);
  CHECK_THROWS_AS(
      lpo::simulate(sys, lpo::zero_input(1), Eigen::VectorXd::Ones(2), 0.0, 1.0),
      lpo::validation_error);
  CHECK_THROWS_AS(lpo::simulate(sys, lpo::zero_input(1), x0, 1.0, 1.0),
                  lpo::validation_error);
  CHECK_THROWS_AS(lpo::simulate(sys, lpo::zero_input(1), x0, 0.0, 1.0, 0.0),
                  lpo::validation_error);
  CHECK_THROWS_AS(lpo::simulate(sys, lpo::zero_input(2), x0, 0.0, 1.0),
                  lpo::validation_error);
}

TEST_CASE("build_msd assembles the damped mass chain") {
  const int N = 5;
  const lpo::LPOSystem sys = lpo::build_msd(N);
  REQUIRE(sys.n() == 2 * N);
  REQUIRE(sys.m() == 2);
  REQUIRE(sys.d() == 2);

  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(N, N);
  for (int i = 0; i < N; ++i) {
    T(i, i) = 3.0;
    if (i > 0) T(i, i - 1) = -1.0;
    if (i + 1 < N) T(i, i + 1) = -1.0;
  }
  const Eigen::MatrixXd K = 0.5 * T;  // default stiffness
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(N, N);
  CHECK((sys.A.topLeftCorner(N, N)).norm() == 0.0);
  CHECK((sys.A.topRightCorner(N, N) - I).norm() <= 1e-14);
  CHECK((sys.A.bottomLeftCorner(N, N) + K).norm() <= 1e-14);
  CHECK((sys.A.bottomRightCorner(N, N) + 4.0 * T).norm() <= 1e-14);
  CHECK(lpo::spectral_abscissa(sys.A) < 0.0);

  CHECK(sys.B.sum() == 2.0);
  CHECK(sys.B(N, 0) == 1.0);
  CHECK(sys.B(2 * N - 1, 1) == 1.0);

  REQUIRE(sys.outputs[0].order() == 1);
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(2 * N);
  e1(0) = 1.0;
  CHECK((sys.outputs[0].factors[0].rowwise().sum() - e1).norm() <= 1e-14);

  REQUIRE(sys.outputs[1].order() == 2);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(2 * N, 2 * N);
  H.topLeftCorner(N, N) = 0.5 * K;
  H.bottomRightCorner(N, N) = 0.5 * I;
  CHECK((lpo::cp_to_matrix(sys.outputs[1]) - H).norm() <= 1e-12);
}

TEST_CASE("build_msd honours mass, stiffness, and damping") {
  const int N = 3;
  const lpo::LPOSystem sys = lpo::build_msd(N, 2.0, 5.0, 0.1);
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(N, N);
  for (int i = 0; i < N; ++i) {
    T(i, i) = 3.0;
    if (i > 0) T(i, i - 1) = -1.0;
    if (i + 1 < N) T(i, i + 1) = -1.0;
  }
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(N, N);
  CHECK((sys.A.topRightCorner(N, N) - 0.5 * I).norm() <= 1e-14);
  CHECK((sys.A.bottomRightCorner(N, N) + 0.05 * T).norm() <= 1e-14);
  CHECK(sys.A.bottomLeftCorner(N, N)(0, 0) == doctest::Approx(-15.0));
  const Eigen::MatrixXd H = lpo::cp_to_matrix(sys.outputs[1]);
  CHECK(H(0, 0) == doctest::Approx(7.5));               // 5 * 3 / 2
  CHECK(H(N, N) == doctest::Approx(0.25).epsilon(1e-12));  // 1 / (2 m)

  CHECK_THROWS_AS(lpo::build_msd(0), lpo::validation_error);
  CHECK_THROWS_AS(lpo::build_msd(2, -1.0), lpo::validation_error);
  CHECK_THROWS_AS(lpo::build_msd(2, 1.0, 0.0), lpo::validation_error);
  CHECK_THROWS_AS(lpo::build_msd(2, 1.0, 1.0, -0.2), lpo::validation_error);
}

TEST_CASE("mass chain dissipates its total energy without input") {
  std::mt19937 rng(5112);
  const int N = 5;
  const lpo::LPOSystem sys = lpo::build_msd(N);
  const Eigen::VectorXd x0 = 0.3 * oracle::randn(2 * N, 1, rng).col(0);
  const lpo::Trajectory traj =
      lpo::simulate(sys, lpo::zero_input(2), x0, 0.0, 15.0, 1e-3);

  const double h0 = lpo::cp_eval(sys.outputs[1], traj.states.col(0));
  REQUIRE(h0 > 0.0);
  double prev = h0;
  for (Eigen::Index i = 1; i < traj.times.size(); ++i) {
    const double h = lpo::cp_eval(sys.outputs[1], traj.states.col(i));
    CHECK(h <= prev + 1e-12 * h0);
    prev = h;
  }
  CHECK(prev < 0.1 * h0);  // damping actually drains the chain
}

TEST_CASE("observability energy matches the integrated squared output") {
  std::mt19937 rng(7718);
  const int N = 5;
  const lpo::LPOSystem sys = lpo::build_msd(N);

  lpo::CoefficientBuildOptions opts;
  opts.tol = 1e-8;
  const lpo::ObservabilityCoefficients coeffs =
      lpo::build_observability_coefficients(sys.A, sys.outputs, opts);
  const lpo::EnergyFunction energy = lpo::make_energy(coeffs.w);

  Eigen::VectorXd x0 = oracle::randn(2 * N, 1, rng).col(0);
  x0 *= 0.08 / x0.norm();

  const lpo::Trajectory traj =
      lpo::simulate(sys, lpo::zero_input(2), x0, 0.0, 40.0, 1e-3);
  const double integral =
      0.5 * oracle::trapezoid(traj.times, traj.outputs.cwiseAbs2());
  const double predicted = lpo::eval_energy(energy, x0);
  REQUIRE(predicted > 0.0);
  CHECK(std::abs(integral - predicted) <= 1e-3 * predicted);
}

TEST_CASE("build_convdiff assembles the upwinded grid operator") {
  const int g = 4;
  const double h = 1.0 / (g + 1.0);
  const double w = 1.0 / (h * h);

  SUBCASE("pure diffusion is symmetric") {
    const lpo::LPOSystem sys = lpo::build_convdiff(g, 0.0);
    REQUIRE(sys.n() == g * g);
    REQUIRE(sys.m() == 1);
    REQUIRE(sys.d() == 3);
    CHECK((sys.A - sys.A.transpose()).norm() <= 1e-10);
    CHECK(lpo::spectral_abscissa(sys.A) < 0.0);
    CHECK((sys.B - Eigen::MatrixXd::Ones(g * g, 1)).norm() == 0.0);
    CHECK(sys.A(0, 0) == doctest::Approx(-4.0 * w));
    CHECK(sys.A(0, 1) == doctest::Approx(w));
    CHECK(sys.A(0, g) == doctest::Approx(w));
    CHECK(sys.A(0, g + 1) == 0.0);

    Eigen::VectorXd x = Eigen::VectorXd::Zero(g * g);
    x(0) = 0.5;
    x(1) = -0.25;
    x(2) = 2.0;
    CHECK(lpo::cp_eval(sys.outputs[0], x) == doctest::Approx(10.0 * 0.5));
    CHECK(lpo::cp_eval(sys.outputs[1], x) == doctest::Approx(100.0 * 0.0625));
    CHECK(lpo::cp_eval(sys.outputs[2], x) == doctest::Approx(1000.0 * 8.0));
    for (int k = 0; k < 3; ++k) {
      CHECK(sys.outputs[k].order() == k + 1);
      CHECK(sys.outputs[k].rank() == 1);
    }
  }

  SUBCASE("convection skews the stencil upwind") {
    const double v = 1.0;
    const lpo::LPOSystem sys = lpo::build_convdiff(g, v);
    CHECK((sys.A - sys.A.transpose()).norm() > 1.0);
    CHECK(lpo::spectral_abscissa(sys.A) < 0.0);
    CHECK(sys.A(0, 0) == doctest::Approx(2.0 * (-2.0 * w - v / h)));
    CHECK(sys.A(1, 0) == doctest::Approx(w + v / h));  // sub-diagonal gains v/h
    CHECK(sys.A(0, 1) == doctest::Approx(w));
    CHECK(sys.A(g, 0) == doctest::Approx(w + v / h));
    CHECK(sys.A(0, g) == doctest::Approx(w));
  }

  SUBCASE("validation") {
    CHECK_THROWS_AS(lpo::build_convdiff(2, 0.0), lpo::validation_error);
    CHECK_THROWS_AS(lpo::build_convdiff(5, -1.0), lpo::validation_error);
  }
}

TEST_CASE("error_metrics compares trajectories on one grid") {
  lpo::Trajectory ref, test;
  ref.times = Eigen::Vector3d(0.0, 1.0, 2.0);
  ref.outputs = Eigen::Vector3d(0.0, 1.0, 2.0);
  test.times = ref.times;
  test.outputs = Eigen::Vector3d(0.0, 1.1, 1.9);

  const lpo::ErrorMetrics metrics = lpo::error_metrics(ref, test);
  REQUIRE(metrics.pointwise.size() == 3);
  CHECK(metrics.pointwise(1) == doctest::Approx(0.1));
  CHECK(metrics.linf == doctest::Approx(0.1));
  CHECK(metrics.l2 == doctest::Approx(std::sqrt(0.015)));

  lpo::Trajectory shifted = test;
  shifted.times(2) += 1e-6;
  CHECK_THROWS_AS(lpo::error_metrics(ref, shifted), lpo::validation_error);
  lpo::Trajectory shorter;
  shorter.times = Eigen::Vector2d(0.0, 1.0);
  shorter.outputs = Eigen::Vector2d(0.0, 1.0);
  CHECK_THROWS_AS(lpo::error_metrics(ref, shorter), lpo::validation_error);
}

TEST_CASE("input builders produce the documented signals") {
  CHECK(lpo::zero_input(3)(1.7).isZero());
  CHECK(lpo::zero_input(3)(0.0).size() == 3);
  CHECK((lpo::step_input(2)(0.4) - Eigen::VectorXd::Ones(2)).norm() == 0.0);

  const Eigen::VectorXd um = lpo::msd_input()(0.3);
  REQUIRE(um.size() == 2);
  CHECK(um(0) == doctest::Approx(std::exp(-0.6) * std::sin(0.15)));
  CHECK(um(1) == um(0));

  const Eigen::VectorXd uc = lpo::convdiff_input()(0.2);
  REQUIRE(uc.size() == 1);
  CHECK(uc(0) == doctest::Approx(100.0 / 1.2 * std::sin(1.0)));
}

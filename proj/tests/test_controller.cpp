#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "gravcomp/controller.hpp"
#include "test_helpers.hpp"

using namespace gravcomp;
using gravcomp::testing::one_link;
using gravcomp::testing::three_link;
constexpr double kPi = std::numbers::pi;

namespace {

TrajectoryLog synthetic_log(int n, double dt, double duration,
                            const std::function<double(double, int)>& signal) {
  TrajectoryLog log;
  const int steps = static_cast<int>(std::llround(duration / dt));
  for (int k = 0; k < steps; ++k) {
    TrajectoryLog::Row row;
    row.t = k * dt;
    row.q = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < n; ++j) row.q[j] = signal(row.t, j);
    row.qdot = Eigen::VectorXd::Zero(n);
    row.tau_applied = Eigen::VectorXd::Zero(n);
    log.rows.push_back(std::move(row));
  }
  return log;
}

}  // namespace

TEST_CASE("control_torque") {
  const RobotModel model = three_link();
  const GravityParams params = params_from_links(model);
  const Eigen::VectorXd target = Eigen::VectorXd::Constant(3, 0.2);

  SUBCASE("zero gains reduce to pure feedforward") {
    const JointState measured{Eigen::VectorXd::Constant(3, -0.5),
                              Eigen::VectorXd::Constant(3, 0.3)};
    const auto [tau, next] =
        control_torque(Gains::zero(3), model, params,
                       ControllerState::regulation(target), measured, 1e-3);
    CHECK(tau == gravity_torque(model, measured.q, params));
  }
  SUBCASE("at the target with zero integral, still pure feedforward") {
    Gains gains = Gains::zero(3);
    gains.kp.setConstant(50.0);
    gains.ki.setConstant(10.0);
    gains.kv.setConstant(5.0);
    const JointState measured{target, Eigen::VectorXd::Zero(3)};
    const auto [tau, next] = control_torque(
        gains, model, params, ControllerState::regulation(target), measured, 1e-3);
    CHECK((tau - gravity_torque(model, target, params)).norm() ==
          doctest::Approx(0.0));
  }
  SUBCASE("masked joints emit exactly zero") {
    Gains gains = Gains::zero(3);
    gains.kp.setConstant(100.0);
    ControllerState state = ControllerState::regulation(target);
    state.zero_mask = {false, true, true};
    const JointState measured{Eigen::VectorXd::Constant(3, 1.0),
                              Eigen::VectorXd::Constant(3, -2.0)};
    const auto [tau, next] = control_torque(gains, model, params, state,
                                            measured, 1e-3);
    CHECK(tau[1] == 0.0);
    CHECK(tau[2] == 0.0);
    CHECK(tau[0] != 0.0);
  }
  SUBCASE("integral clamps at the windup limit for any input sequence") {
    std::mt19937_64 rng(113);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    Gains gains = Gains::zero(3);
    gains.ki.setConstant(1.0);
    ControllerState state = ControllerState::regulation(target);
    state.windup_limit = 0.25;
    for (int k = 0; k < 2000; ++k) {
      const JointState measured{
          Eigen::Vector3d(u(rng), u(rng), u(rng)),
          Eigen::Vector3d(u(rng), u(rng), u(rng))};
      auto [tau, next] = control_torque(gains, model, params, state, measured,
                                        0.01);
      state = std::move(next);
      CHECK(state.integral.cwiseAbs().maxCoeff() <= 0.25 + 1e-15);
    }
  }
  SUBCASE("non-finite measurement names the joint") {
    JointState measured{Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(3)};
    measured.q[1] = std::nan("");
    CHECK_THROWS_WITH_AS(
        control_torque(Gains::zero(3), model, params,
                       ControllerState::regulation(target), measured, 1e-3),
        doctest::Contains("joint 2"), std::invalid_argument);
  }
}

TEST_CASE("drift_metric") {
  SUBCASE("constant log drifts zero") {
    const TrajectoryLog log =
        synthetic_log(2, 1e-3, 1.0, [](double, int) { return 0.7; });
    CHECK(drift_metric(log, 0.0).maxCoeff() == doctest::Approx(0.0));
  }
  SUBCASE("linear drift of 0.01 rad/s over one second") {
    const TrajectoryLog log = synthetic_log(
        1, 1e-3, 2.0, [](double t, int) { return 0.01 * t; });
    const Eigen::VectorXd drift = drift_metric(log, 0.999);
    CHECK(drift[0] == doctest::Approx(0.01).epsilon(0.01));
  }
  SUBCASE("release time outside the log throws") {
    const TrajectoryLog log =
        synthetic_log(1, 1e-3, 1.0, [](double, int) { return 0.0; });
    CHECK_THROWS_AS(drift_metric(log, 5.0), std::out_of_range);
  }
}

TEST_CASE("oscillation_metrics") {
  SUBCASE("pure sinusoid recovered within 1%") {
    const TrajectoryLog log = synthetic_log(1, 1e-3, 5.0, [](double t, int) {
      return 0.05 * std::sin(2 * kPi * t);
    });
    const OscillationResult osc = oscillation_metrics(log, 0, 0.0, 5.0);
    REQUIRE(osc.oscillatory);
    CHECK(osc.amplitude == doctest::Approx(0.05).epsilon(0.01));
    CHECK(osc.frequency == doctest::Approx(1.0).epsilon(0.01));
  }
  SUBCASE("constant signal is not oscillatory") {
    const TrajectoryLog log =
        synthetic_log(1, 1e-3, 5.0, [](double, int) { return 0.3; });
    CHECK_FALSE(oscillation_metrics(log, 0, 0.0, 5.0).oscillatory);
  }
  SUBCASE("small second tone does not break the dominant estimate") {
    const TrajectoryLog log = synthetic_log(1, 1e-3, 5.0, [](double t, int) {
      return 0.05 * std::sin(2 * kPi * t) + 0.005 * std::sin(2 * kPi * 7 * t);
    });
    const OscillationResult osc = oscillation_metrics(log, 0, 0.0, 5.0);
    REQUIRE(osc.oscillatory);
    CHECK(osc.amplitude == doctest::Approx(0.05).epsilon(0.10));
    CHECK(osc.frequency == doctest::Approx(1.0).epsilon(0.10));
  }
}

TEST_CASE("tune_kp_oscillation on a viscous pendulum") {
  const RobotModel model = one_link(1.0, 1.0);
  const GravityParams params = params_from_links(model);
  SimConfig config = SimConfig::defaults(1, 1e-3, 40.0);
  config.viscous_friction = Eigen::VectorXd::Constant(1, 0.05);
  const Eigen::VectorXd rest = Eigen::VectorXd::Zero(1);

  // static: doctest re-enters the test case per subcase, tune once
  static const TuneResult tuned =
      tune_kp_oscillation(model, params, params, 0, config, rest);

  SUBCASE("period matches the linearized estimate") {
    const double inertia = 1.0 + config.armature[0];
    const double expected = 2 * kPi * std::sqrt(inertia / tuned.kp_critical);
    CHECK(tuned.period == doctest::Approx(expected).epsilon(0.20));
  }
  SUBCASE("adding kv above the critical gain damps the response") {
    Gains gains = Gains::zero(1);
    gains.kp[0] = 2.0 * tuned.kp_critical;
    gains.kv[0] = 2.0;
    PidGravityController controller(gains, model, params,
                                    ControllerState::regulation(rest),
                                    config.dt);
    Eigen::VectorXd q0 = rest;
    q0[0] += 0.1;
    const TrajectoryLog log = simulate(model, params, std::ref(controller),
                                       config, q0, Eigen::VectorXd::Zero(1));
    CHECK(std::abs(log.rows.back().q[0]) < 0.01);
  }
  SUBCASE("doubling the plant mass lengthens the critical period") {
    const RobotModel heavy = one_link(1.0, 2.0);
    const GravityParams heavy_params = params_from_links(heavy);
    const TuneResult heavy_tuned = tune_kp_oscillation(
        heavy, heavy_params, heavy_params, 0, config, rest);
    CHECK(heavy_tuned.period > tuned.period);
  }
  SUBCASE("hopeless bracket is reported") {
    CHECK_THROWS_AS(tune_kp_oscillation(model, params, params, 0, config, rest,
                                        1e-4, 1e-3),
                    std::runtime_error);
  }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>
#include <random>

#include "gravcomp/kinematics.hpp"
#include "test_helpers.hpp"

using namespace gravcomp;
using gravcomp::testing::random_model;
constexpr double kPi = std::numbers::pi;

TEST_CASE("dh_theta affine joint mapping") {
  CHECK(dh_theta({-1.0, kPi / 2, 0, 0, 0}, 0.0) == doctest::Approx(kPi / 2));
  CHECK(dh_theta({1.0, 0.0, 0, 0, 0}, 0.3) == doctest::Approx(0.3));
  CHECK(dh_theta({-1.0, kPi, 0, 0, 0}, kPi) == doctest::Approx(0.0));
  // negative sign: increasing q decreases theta
  CHECK(dh_theta({-1.0, kPi / 2, 0, 0, 0}, 0.1) <
        dh_theta({-1.0, kPi / 2, 0, 0, 0}, 0.0));
}

TEST_CASE("dh_transform elementary cases") {
  SUBCASE("all parameters zero gives identity") {
    const Transform t = dh_transform({1.0, 0, 0, 0, 0}, 0.0);
    CHECK(t.rotation.isIdentity(1e-15));
    CHECK(t.translation.norm() == doctest::Approx(0.0));
  }
  SUBCASE("pure d translation with alpha rotation") {
    const Transform t = dh_transform({1.0, 0, -0.2, -kPi / 2, 0}, 0.0);
    CHECK(t.translation.isApprox(Eigen::Vector3d(0, 0, -0.2), 1e-15));
    Eigen::Matrix3d rot_x;
    rot_x = Eigen::AngleAxisd(-kPi / 2, Eigen::Vector3d::UnitX());
    CHECK((t.rotation - rot_x).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("rotations stay orthonormal with unit determinant") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    const DHRow row{u(rng) > 0 ? 1.0 : -1.0, u(rng), u(rng), u(rng), u(rng)};
    const Transform t = dh_transform(row, u(rng));
    const Eigen::Matrix3d gram = t.rotation.transpose() * t.rotation;
    CHECK((gram - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(t.rotation.determinant() == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("forward_kinematics") {
  SUBCASE("zero-length chain keeps every origin at the base") {
    std::mt19937_64 rng(3);
    RobotModel model = random_model(rng, 4);
    for (auto& row : model.dh) {
      row.d = 0.0;
      row.a = 0.0;
    }
    const auto frames = forward_kinematics(model, Eigen::VectorXd::Zero(4));
    for (const auto& f : frames) {
      CHECK(f.translation.norm() == doctest::Approx(0.0));
    }
  }
  SUBCASE("first frame of a d = -L1 root joint") {
    RobotModel model;
    model.dh.push_back({1.0, 0.0, -0.21, -kPi / 2, 0.0});
    model.links.push_back({1.0, Eigen::Vector3d::Zero()});
    const auto frames = forward_kinematics(model, Eigen::VectorXd::Zero(1));
    CHECK(frames[0].translation.isApprox(Eigen::Vector3d(0, 0, -0.21), 1e-15));
  }
  SUBCASE("prefix composition") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
      const RobotModel model = random_model(rng, 5);
      Eigen::VectorXd q(5);
      std::uniform_real_distribution<double> u(-kPi, kPi);
      for (int j = 0; j < 5; ++j) q[j] = u(rng);
      const auto frames = forward_kinematics(model, q);
      const Transform last = frames[3] * dh_transform(model.dh[4], q[4]);
      CHECK((last.rotation - frames[4].rotation).cwiseAbs().maxCoeff() < 1e-14);
      CHECK((last.translation - frames[4].translation).cwiseAbs().maxCoeff() <
            1e-14);
    }
  }
  SUBCASE("dimension mismatch throws") {
    std::mt19937_64 rng(5);
    const RobotModel model = random_model(rng, 3);
    CHECK_THROWS_AS(forward_kinematics(model, Eigen::VectorXd::Zero(4)),
                    std::invalid_argument);
  }
}

TEST_CASE("com_positions") {
  SUBCASE("planar one-link arm") {
    const RobotModel model = gravcomp::testing::one_link(1.0);
    for (double q : {0.0, 0.7, -1.3, 2.9}) {
      const auto coms = com_positions(model, Eigen::VectorXd::Constant(1, q));
      CHECK(coms[0].isApprox(Eigen::Vector3d(std::cos(q), std::sin(q), 0.0),
                             1e-12));
    }
  }
  SUBCASE("zero com collapses to the frame origins") {
    std::mt19937_64 rng(17);
    RobotModel model = random_model(rng, 4);
    for (auto& link : model.links) link.com.setZero();
    const Eigen::VectorXd q = Eigen::VectorXd::Constant(4, 0.4);
    const auto frames = forward_kinematics(model, q);
    const auto coms = com_positions(model, q);
    for (int i = 0; i < 4; ++i) {
      CHECK((coms[i] - frames[i].translation).norm() == doctest::Approx(0.0));
    }
  }
  SUBCASE("independent of the gravity vector") {
    std::mt19937_64 rng(19);
    RobotModel model = random_model(rng, 3);
    const Eigen::VectorXd q = Eigen::VectorXd::Constant(3, -0.2);
    const auto before = com_positions(model, q);
    model.gravity = Eigen::Vector3d(3.0, -1.0, 2.0);
    const auto after = com_positions(model, q);
    for (int i = 0; i < 3; ++i) {
      CHECK((before[i] - after[i]).norm() == doctest::Approx(0.0));
    }
  }
}

namespace {

// central differences of com_positions, the independent oracle for the Jacobian
Eigen::Matrix3Xd fd_com_jacobian(const RobotModel& model,
                                 const Eigen::VectorXd& q, int link) {
  constexpr double h = 1e-6;
  Eigen::Matrix3Xd jac(3, model.dof());
  Eigen::VectorXd probe = q;
  for (int k = 0; k < model.dof(); ++k) {
    probe[k] = q[k] + h;
    const Eigen::Vector3d plus = com_positions(model, probe)[link];
    probe[k] = q[k] - h;
    const Eigen::Vector3d minus = com_positions(model, probe)[link];
    probe[k] = q[k];
    jac.col(k) = (plus - minus) / (2.0 * h);
  }
  return jac;
}

}  // namespace

TEST_CASE("com_jacobian") {
  SUBCASE("one-link arm at home") {
    const RobotModel model = gravcomp::testing::one_link(1.0);
    const Eigen::Matrix3Xd jac =
        com_jacobian(model, Eigen::VectorXd::Zero(1), 0);
    CHECK(jac.col(0).isApprox(Eigen::Vector3d(0, 1, 0), 1e-12));
  }
  SUBCASE("distal columns are zero") {
    std::mt19937_64 rng(23);
    const RobotModel model = random_model(rng, 5);
    const Eigen::VectorXd q = Eigen::VectorXd::Constant(5, 0.3);
    const Eigen::Matrix3Xd jac = com_jacobian(model, q, 2);
    CHECK(jac.col(3).norm() == doctest::Approx(0.0));
    CHECK(jac.col(4).norm() == doctest::Approx(0.0));
  }
  SUBCASE("matches finite differences on random chains") {
    std::mt19937_64 rng(29);
    std::uniform_int_distribution<int> dof(1, 5);
    std::uniform_real_distribution<double> u(-kPi, kPi);
    for (int trial = 0; trial < 100; ++trial) {
      const int n = dof(rng);
      const RobotModel model = random_model(rng, n);
      Eigen::VectorXd q(n);
      for (int j = 0; j < n; ++j) q[j] = u(rng);
      const int link = std::uniform_int_distribution<int>(0, n - 1)(rng);
      const Eigen::Matrix3Xd analytic = com_jacobian(model, q, link);
      const Eigen::Matrix3Xd fd = fd_com_jacobian(model, q, link);
      CHECK((analytic - fd).cwiseAbs().maxCoeff() < 1e-6);
    }
  }
  SUBCASE("bad link index throws") {
    const RobotModel model = gravcomp::testing::one_link();
    CHECK_THROWS_AS(com_jacobian(model, Eigen::VectorXd::Zero(1), 1),
                    std::out_of_range);
    CHECK_THROWS_AS(com_jacobian(model, Eigen::VectorXd::Zero(1), -1),
                    std::out_of_range);
  }
}

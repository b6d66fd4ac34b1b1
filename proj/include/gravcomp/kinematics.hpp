#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace gravcomp {

/// One row of the DH table. The joint variable enters the theta column as
/// theta_i = sign * q_i + theta_offset; sign must be -1 or +1.
struct DHRow {
  double sign = 1.0;
  double theta_offset = 0.0;  // rad
  double d = 0.0;             // m
  double alpha = 0.0;         // rad
  double a = 0.0;             // m
};

/// Rigid transform, rotation kept orthonormal by construction.
struct Transform {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  Transform operator*(const Transform& rhs) const {
    return {rotation * rhs.rotation, rotation * rhs.translation + translation};
  }
};

/// Point-mass inertial data for one link, com expressed in that link's frame.
struct LinkInertia {
  double mass = 0.0;          // kg
  Eigen::Vector3d com = Eigen::Vector3d::Zero();  // m
};

/// Serial revolute chain: DH geometry, per-link inertial data and the gravity
/// vector in the base frame. The single source of geometric truth.
struct RobotModel {
  std::string name;
  std::vector<DHRow> dh;
  std::vector<LinkInertia> links;
  Eigen::Vector3d gravity = Eigen::Vector3d(0, 0, -9.81);  // m/s^2
  std::optional<std::vector<std::pair<double, double>>> joint_limits;

  int dof() const { return static_cast<int>(dh.size()); }
};

struct JointState {
  Eigen::VectorXd q;     // rad
  Eigen::VectorXd qdot;  // rad/s
};

/// theta_i = sign * q_i + theta_offset.
double dh_theta(const DHRow& row, double qi);

/// Standard (distal) DH link transform RotZ(theta)*TransZ(d)*TransX(a)*RotX(alpha).
Transform dh_transform(const DHRow& row, double qi);

/// Base-frame pose of every link frame: element i is A_1 * ... * A_{i+1}.
/// Throws std::invalid_argument on dimension mismatch.
std::vector<Transform> forward_kinematics(const RobotModel& model,
                                          const Eigen::VectorXd& q);

/// Base-frame center-of-mass position of every link.
std::vector<Eigen::Vector3d> com_positions(const RobotModel& model,
                                           const Eigen::VectorXd& q);

/// 3 x n positional Jacobian of link i's center of mass (i is 0-based).
/// Column k is sign_k * z_{k-1} x (p_i - o_{k-1}) for k <= i, zero beyond,
/// so it matches finite differences of com_positions including the joint
/// sign mapping. Throws std::out_of_range for a bad link index.
Eigen::Matrix3Xd com_jacobian(const RobotModel& model, const Eigen::VectorXd& q,
                              int link);

}  // namespace gravcomp

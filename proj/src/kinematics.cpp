#include "gravcomp/kinematics.hpp"

#include <cmath>
#include <stdexcept>

namespace gravcomp {

double dh_theta(const DHRow& row, double qi) {
  return row.sign * qi + row.theta_offset;
}

Transform dh_transform(const DHRow& row, double qi) {
  const double th = dh_theta(row, qi);
  const double ct = std::cos(th), st = std::sin(th);
  const double ca = std::cos(row.alpha), sa = std::sin(row.alpha);
  Transform t;
  t.rotation << ct, -st * ca, st * sa,
                st,  ct * ca, -ct * sa,
                 0,       sa,       ca;
  t.translation << row.a * ct, row.a * st, row.d;
  return t;
}

std::vector<Transform> forward_kinematics(const RobotModel& model,
                                          const Eigen::VectorXd& q) {
  const int n = model.dof();
  if (q.size() != n) {
    throw std::invalid_argument("forward_kinematics: expected q of length " +
                                std::to_string(n) + ", got " +
                                std::to_string(q.size()));
  }
  std::vector<Transform> frames;
  frames.reserve(n);
  Transform acc;
  for (int i = 0; i < n; ++i) {
    acc = acc * dh_transform(model.dh[i], q[i]);
    frames.push_back(acc);
  }
  return frames;
}

std::vector<Eigen::Vector3d> com_positions(const RobotModel& model,
                                           const Eigen::VectorXd& q) {
  const auto frames = forward_kinematics(model, q);
  std::vector<Eigen::Vector3d> out;
  out.reserve(frames.size());
  for (int i = 0; i < model.dof(); ++i) {
    out.push_back(frames[i].rotation * model.links[i].com +
                  frames[i].translation);
  }
  return out;
}

Eigen::Matrix3Xd com_jacobian(const RobotModel& model, const Eigen::VectorXd& q,
                              int link) {
  const int n = model.dof();
  if (link < 0 || link >= n) {
    throw std::out_of_range("com_jacobian: link index " + std::to_string(link) +
                            " out of range [0, " + std::to_string(n) + ")");
  }
  const auto frames = forward_kinematics(model, q);
  const Eigen::Vector3d p =
      frames[link].rotation * model.links[link].com + frames[link].translation;

  Eigen::Matrix3Xd jac = Eigen::Matrix3Xd::Zero(3, n);
  for (int k = 0; k <= link; ++k) {
    const Eigen::Vector3d axis =
        k == 0 ? Eigen::Vector3d::UnitZ()
               : Eigen::Vector3d(frames[k - 1].rotation.col(2));
    const Eigen::Vector3d origin =
        k == 0 ? Eigen::Vector3d::Zero() : frames[k - 1].translation;
    jac.col(k) = model.dh[k].sign * axis.cross(p - origin);
  }
  return jac;
}

}  // namespace gravcomp

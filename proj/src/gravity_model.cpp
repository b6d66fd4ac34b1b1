#include "gravcomp/gravity_model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gravcomp {

namespace {

void check_params(const RobotModel& model, const GravityParams& params,
                  const char* where) {
  if (params.size() != 4 * model.dof()) {
    throw std::invalid_argument(std::string(where) + ": expected params of length " +
                                std::to_string(4 * model.dof()) + ", got " +
                                std::to_string(params.size()));
  }
}

}  // namespace

GravityParams params_from_links(const RobotModel& model) {
  GravityParams p = GravityParams::Zero(4 * model.dof());
  for (int i = 0; i < model.dof(); ++i) {
    p[4 * i] = model.links[i].mass;
    p.segment<3>(4 * i + 1) = model.links[i].mass * model.links[i].com;
  }
  return p;
}

double potential_energy(const RobotModel& model, const Eigen::VectorXd& q,
                        const GravityParams& params) {
  check_params(model, params, "potential_energy");
  const auto frames = forward_kinematics(model, q);
  double energy = 0.0;
  for (int i = 0; i < model.dof(); ++i) {
    // mass-weighted com position, linear in [m, m*c]
    const Eigen::Vector3d w = params[4 * i] * frames[i].translation +
                              frames[i].rotation * params.segment<3>(4 * i + 1);
    energy -= model.gravity.dot(w);
  }
  return energy;
}

Eigen::VectorXd gravity_torque(const RobotModel& model, const Eigen::VectorXd& q,
                               const GravityParams& params) {
  check_params(model, params, "gravity_torque");
  const int n = model.dof();
  const auto frames = forward_kinematics(model, q);

  Eigen::VectorXd tau = Eigen::VectorXd::Zero(n);
  for (int k = 0; k < n; ++k) {
    const Eigen::Vector3d axis =
        k == 0 ? Eigen::Vector3d::UnitZ()
               : Eigen::Vector3d(frames[k - 1].rotation.col(2));
    const Eigen::Vector3d origin =
        k == 0 ? Eigen::Vector3d::Zero() : frames[k - 1].translation;
    Eigen::Vector3d sum = Eigen::Vector3d::Zero();
    for (int i = k; i < n; ++i) {
      sum += params[4 * i] * (frames[i].translation - origin) +
             frames[i].rotation * params.segment<3>(4 * i + 1);
    }
    tau[k] = -model.gravity.dot(model.dh[k].sign * axis.cross(sum));
  }
  return tau;
}

Eigen::MatrixXd gravity_regressor(const RobotModel& model,
                                  const Eigen::VectorXd& q) {
  const int n = model.dof();
  Eigen::MatrixXd regressor(n, 4 * n);
  GravityParams unit = GravityParams::Zero(4 * n);
  for (int j = 0; j < 4 * n; ++j) {
    unit[j] = 1.0;
    regressor.col(j) = gravity_torque(model, q, unit);
    unit[j] = 0.0;
  }
  return regressor;
}

Eigen::VectorXd random_pose(const RobotModel& model, std::mt19937_64& rng) {
  const int n = model.dof();
  Eigen::VectorXd q(n);
  for (int j = 0; j < n; ++j) {
    double lo = -std::numbers::pi, hi = std::numbers::pi;
    if (model.joint_limits) {
      lo = (*model.joint_limits)[j].first;
      hi = (*model.joint_limits)[j].second;
    }
    q[j] = std::uniform_real_distribution<double>(lo, hi)(rng);
  }
  return q;
}

BaseParamMap base_reduction(const RobotModel& model, int n_poses,
                            unsigned seed, double tol) {
  if (n_poses < 1) {
    throw std::invalid_argument("base_reduction: n_poses must be >= 1");
  }
  if (tol <= 0) {
    throw std::invalid_argument("base_reduction: tol must be > 0");
  }
  const int n = model.dof();
  const int cols = 4 * n;

  Eigen::MatrixXd stacked(n_poses * n, cols);
  std::mt19937_64 rng(seed);
  for (int s = 0; s < n_poses; ++s) {
    stacked.middleRows(s * n, n) = gravity_regressor(model, random_pose(model, rng));
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(stacked);
  const Eigen::MatrixXd r = qr.matrixR().topRows(std::min<int>(stacked.rows(), cols));
  const double pivot_max = std::abs(r(0, 0));

  BaseParamMap map;
  int rank = 0;
  const int diag = static_cast<int>(std::min(r.rows(), r.cols()));
  for (int k = 0; k < diag; ++k) {
    if (std::abs(r(k, k)) > tol * pivot_max) {
      ++rank;
    } else {
      break;  // column-pivoted QR orders the diagonal by magnitude
    }
  }
  map.rank = rank;

  const auto perm = qr.colsPermutation().indices();
  map.independent_columns.resize(rank);
  for (int k = 0; k < rank; ++k) {
    map.independent_columns[k] = perm[k];
  }

  // pi_base = pi_pivot + R11^-1 R12 * pi_dependent, expressed over the
  // original column order.
  map.recombination = Eigen::MatrixXd::Zero(rank, cols);
  if (rank > 0) {
    const Eigen::MatrixXd r11 = r.topLeftCorner(rank, rank);
    const Eigen::MatrixXd fold =
        r11.triangularView<Eigen::Upper>().solve(r.topRightCorner(rank, cols - rank));
    for (int k = 0; k < rank; ++k) {
      map.recombination(k, perm[k]) = 1.0;
    }
    for (int j = rank; j < cols; ++j) {
      map.recombination.col(perm[j]) = fold.col(j - rank);
    }
  }
  return map;
}

}  // namespace gravcomp

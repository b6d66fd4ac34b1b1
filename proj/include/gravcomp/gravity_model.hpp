#pragma once

#include <random>
#include <vector>

#include <Eigen/Dense>

#include "gravcomp/kinematics.hpp"

namespace gravcomp {

/// Linear gravity parameter vector, 4 entries per link:
/// [m_i, m_i*cx, m_i*cy, m_i*cz] at indices 4*i .. 4*i+3.
using GravityParams = Eigen::VectorXd;

/// Assemble the full parameter vector from a model's link inertial data.
GravityParams params_from_links(const RobotModel& model);

/// Numeric base-parameter map: which full-parameter columns are identifiable
/// and how the full vector folds onto them.
struct BaseParamMap {
  std::vector<int> independent_columns;  // pivot columns into the full vector
  Eigen::MatrixXd recombination;         // rank x 4n, pi_base = recombination * pi
  int rank = 0;
};

/// Gravitational potential energy, linear in params:
/// P = -sum_i g . (m_i o_i + R_i (mc)_i).
double potential_energy(const RobotModel& model, const Eigen::VectorXd& q,
                        const GravityParams& params);

/// Static holding torque tau = dP/dq, computed analytically from the frame
/// axes (cross-product columns, same chain rule as com_jacobian).
Eigen::VectorXd gravity_torque(const RobotModel& model, const Eigen::VectorXd& q,
                               const GravityParams& params);

/// n x 4n regressor with Y(q) * pi == gravity_torque(model, q, pi) for all pi.
/// Column j is gravity_torque at the j-th unit parameter vector.
Eigen::MatrixXd gravity_regressor(const RobotModel& model,
                                  const Eigen::VectorXd& q);

/// Rank-revealing QR of the regressor stacked over n_poses random poses
/// (uniform within joint limits, else [-pi, pi]). rank counts R diagonals
/// above tol * |r_11|. A rank-0 result is reported, not thrown.
BaseParamMap base_reduction(const RobotModel& model, int n_poses,
                            unsigned seed, double tol = 1e-8);

/// Uniform random pose within the model's joint limits (else [-pi, pi]).
Eigen::VectorXd random_pose(const RobotModel& model, std::mt19937_64& rng);

}  // namespace gravcomp

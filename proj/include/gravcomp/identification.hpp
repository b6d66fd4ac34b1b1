#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gravcomp/gravity_model.hpp"

namespace gravcomp {

/// Ordered (pose, holding torque) samples.
struct Dataset {
  struct Sample {
    Eigen::VectorXd q;    // rad
    Eigen::VectorXd tau;  // N*m
  };
  std::vector<Sample> samples;
  std::string meta;
};

struct IdentReport {
  GravityParams params_full;     // minimum-norm lift
  Eigen::VectorXd params_base;   // over base pivot columns (empty without a map)
  double residual_rms = 0.0;     // N*m
  Eigen::VectorXd per_joint_rms; // N*m
  double condition_number = 1.0; // over retained singular values
  int rank = 0;
  int n_samples = 0;
};

enum class SolveMethod {
  kSvd,              // minimum-norm pseudo-inverse, default
  kNormalEquations,  // literal (Y^T Y)^-1 Y^T tau, for fidelity comparison
};

/// Stack per-sample regressors and torques in dataset order:
/// [(Y(q_1); ...; Y(q_N)], [tau_1; ...; tau_N].
std::pair<Eigen::MatrixXd, Eigen::VectorXd> stack(const RobotModel& model,
                                                  const Dataset& data);

/// Least-squares fit of the stacked system. Singular values below
/// tol * sigma_max are dropped; an all-zero regressor reports rank 0 with
/// zero params rather than throwing.
IdentReport solve(const Eigen::MatrixXd& stacked, const Eigen::VectorXd& torques,
                  double tol = 1e-10, const BaseParamMap* base_map = nullptr,
                  SolveMethod method = SolveMethod::kSvd);

/// Synthetic stand-in for hands-on data collection: random poses, exact
/// gravity torques plus optional i.i.d. Gaussian noise per joint.
Dataset synth_dataset(const RobotModel& model, const GravityParams& params_true,
                      int n_poses, double noise_std, unsigned seed);

/// Predicted holding torque from a fit: Y(q) * params_full.
Eigen::VectorXd predict(const RobotModel& model, const IdentReport& report,
                        const Eigen::VectorXd& q);

}  // namespace gravcomp

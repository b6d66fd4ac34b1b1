#include "gravcomp/identification.hpp"

#include <cmath>
#include <stdexcept>

namespace gravcomp {

std::pair<Eigen::MatrixXd, Eigen::VectorXd> stack(const RobotModel& model,
                                                  const Dataset& data) {
  const int n = model.dof();
  const int count = static_cast<int>(data.samples.size());
  if (count == 0) {
    throw std::invalid_argument("stack: dataset has no samples");
  }
  Eigen::MatrixXd regressors(count * n, 4 * n);
  Eigen::VectorXd torques(count * n);
  for (int s = 0; s < count; ++s) {
    const auto& sample = data.samples[s];
    if (sample.q.size() != n || sample.tau.size() != n) {
      throw std::invalid_argument("stack: sample " + std::to_string(s) +
                                  " dimension does not match model dof " +
                                  std::to_string(n));
    }
    regressors.middleRows(s * n, n) = gravity_regressor(model, sample.q);
    torques.segment(s * n, n) = sample.tau;
  }
  return {std::move(regressors), std::move(torques)};
}

IdentReport solve(const Eigen::MatrixXd& stacked, const Eigen::VectorXd& torques,
                  double tol, const BaseParamMap* base_map, SolveMethod method) {
  if (stacked.rows() != torques.size()) {
    throw std::invalid_argument("solve: regressor rows != torque length");
  }
  const int cols = static_cast<int>(stacked.cols());
  const int n = cols / 4;

  IdentReport report;
  report.n_samples = static_cast<int>(stacked.rows()) / std::max(n, 1);

  if (method == SolveMethod::kNormalEquations) {
    const Eigen::MatrixXd gram = stacked.transpose() * stacked;
    report.params_full = gram.ldlt().solve(stacked.transpose() * torques);
    report.rank = static_cast<int>(Eigen::FullPivLU<Eigen::MatrixXd>(gram).rank());
    report.condition_number =
        report.rank > 0 ? gram.norm() * gram.ldlt().solve(
                              Eigen::MatrixXd::Identity(cols, cols)).norm()
                        : 1.0;
  } else {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(stacked,
                                       Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sigma = svd.singularValues();
    const double sigma_max = sigma.size() > 0 ? sigma[0] : 0.0;
    int rank = 0;
    for (int k = 0; k < sigma.size(); ++k) {
      if (sigma[k] > tol * sigma_max && sigma[k] > 0.0) ++rank;
    }
    report.rank = rank;
    if (rank == 0) {
      report.params_full = Eigen::VectorXd::Zero(cols);
      report.condition_number = 1.0;
    } else {
      const Eigen::VectorXd coeffs = svd.matrixU().leftCols(rank).transpose() * torques;
      report.params_full = svd.matrixV().leftCols(rank) *
                           (coeffs.array() / sigma.head(rank).array()).matrix();
      report.condition_number = sigma[0] / sigma[rank - 1];
    }
  }

  const Eigen::VectorXd residual = stacked * report.params_full - torques;
  report.residual_rms =
      residual.size() > 0 ? std::sqrt(residual.squaredNorm() / residual.size()) : 0.0;
  report.per_joint_rms = Eigen::VectorXd::Zero(n);
  if (n > 0) {
    const int count = static_cast<int>(residual.size()) / n;
    for (int s = 0; s < count; ++s) {
      report.per_joint_rms.array() +=
          residual.segment(s * n, n).array().square();
    }
    report.per_joint_rms =
        (report.per_joint_rms / std::max(count, 1)).cwiseSqrt();
  }

  if (base_map != nullptr) {
    report.params_base = base_map->recombination * report.params_full;
  }
  return report;
}

Dataset synth_dataset(const RobotModel& model, const GravityParams& params_true,
                      int n_poses, double noise_std, unsigned seed) {
  if (n_poses < 1) {
    throw std::invalid_argument("synth_dataset: n_poses must be >= 1");
  }
  if (noise_std < 0) {
    throw std::invalid_argument("synth_dataset: noise_std must be >= 0");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Dataset data;
  data.samples.reserve(n_poses);
  for (int s = 0; s < n_poses; ++s) {
    Dataset::Sample sample;
    sample.q = random_pose(model, rng);
    sample.tau = gravity_torque(model, sample.q, params_true);
    if (noise_std > 0) {
      for (int j = 0; j < model.dof(); ++j) {
        sample.tau[j] += noise_std * gauss(rng);
      }
    }
    data.samples.push_back(std::move(sample));
  }
  return data;
}

Eigen::VectorXd predict(const RobotModel& model, const IdentReport& report,
                        const Eigen::VectorXd& q) {
  return gravity_torque(model, q, report.params_full);
}

}  // namespace gravcomp

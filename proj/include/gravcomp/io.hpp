#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "gravcomp/controller.hpp"
#include "gravcomp/identification.hpp"

namespace gravcomp {

// Exit-code contract shared with the CLI: 0 ok, 2 parse, 3 dimension,
// 4 I/O, 5 degenerate, 6 divergence.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DimensionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DegenerateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Robot description JSON: name, gravity, joints (sign/theta_offset/d/alpha/a,
/// optional limit_lo/limit_hi), links (mass, com). Parse errors carry the
/// offending key.
RobotModel load_robot(const std::filesystem::path& path);

/// Fully assembled closed-loop experiment.
struct Experiment {
  RobotModel robot;
  GravityParams plant_params;
  GravityParams controller_params;
  Gains gains;
  std::vector<bool> zero_mask;
  SimConfig sim;
  Eigen::VectorXd initial_q;
  Eigen::VectorXd initial_qdot;
  Eigen::VectorXd target_q;
};

Experiment load_experiment(const std::filesystem::path& path);

/// Dataset CSV: header q1..qn,tau1..taun, one sample per line, radians and
/// newton-meters, LF line endings.
Dataset load_dataset_csv(const std::filesystem::path& path, int n);
void save_dataset_csv(const std::filesystem::path& path, const Dataset& data);

/// Trajectory CSV: header t,q1..qn,qd1..qdn,tau1..taun.
void save_trajectory_csv(const std::filesystem::path& path,
                         const TrajectoryLog& log);
TrajectoryLog load_trajectory_csv(const std::filesystem::path& path);

void save_ident_report_json(const std::filesystem::path& path,
                            const IdentReport& report,
                            const BaseParamMap& base_map,
                            double holdout_rms);
GravityParams load_params_json(const std::filesystem::path& path, int n);

/// Write-then-rename; a failed run never leaves a truncated file behind.
void atomic_write(const std::filesystem::path& path, const std::string& contents);

}  // namespace gravcomp

#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "gravcomp/gravity_model.hpp"

namespace gravcomp {

enum class Integrator { kSemiImplicitEuler, kRk4 };

struct SimConfig {
  double dt = 1e-3;      // s
  double duration = 1.0; // s
  Integrator integrator = Integrator::kSemiImplicitEuler;
  Eigen::VectorXd armature;          // per-joint inertia floor, kg*m^2
  Eigen::VectorXd viscous_friction;  // N*m*s/rad

  static SimConfig defaults(int n, double dt = 1e-3, double duration = 1.0);
};

struct PlantState {
  double t = 0.0;
  JointState joint;
};

struct TrajectoryLog {
  struct Row {
    double t;
    Eigen::VectorXd q;
    Eigen::VectorXd qdot;
    Eigen::VectorXd tau_applied;
  };
  std::vector<Row> rows;
};

/// Raised when the mass matrix is singular or the state leaves the finite
/// range; carries the simulation time at failure.
struct SimulationError : std::runtime_error {
  double t;
  SimulationError(double t_, const std::string& what)
      : std::runtime_error(what), t(t_) {}
};

/// Point-mass inertia matrix M = sum_i m_i J_i^T J_i + diag(armature).
Eigen::MatrixXd mass_matrix(const RobotModel& model, const Eigen::VectorXd& q,
                            const Eigen::VectorXd& armature);

/// Coriolis/centrifugal torque via Christoffel symbols from central finite
/// differences of the mass matrix (h = 1e-6).
Eigen::VectorXd coriolis_torque(const RobotModel& model, const Eigen::VectorXd& q,
                                const Eigen::VectorXd& qdot,
                                const Eigen::VectorXd& armature);

/// qddot = M^-1 (tau - c(q, qdot) - G(q) - diag(viscous) qdot), G from the
/// plant's true gravity params. Throws SimulationError if M is singular.
Eigen::VectorXd forward_dynamics(const RobotModel& model, const Eigen::VectorXd& q,
                                 const Eigen::VectorXd& qdot,
                                 const Eigen::VectorXd& tau_applied,
                                 const GravityParams& params_plant,
                                 const SimConfig& config);

/// One integration step with the applied torque held over the step.
PlantState step(const RobotModel& model, const PlantState& state,
                const Eigen::VectorXd& tau, const GravityParams& params_plant,
                const SimConfig& config);

/// Torque command as a function of time and measured joint state.
using ControlCallback =
    std::function<Eigen::VectorXd(double t, const JointState& measured)>;

/// Closed-loop rollout; one log row per step, applied torque included.
TrajectoryLog simulate(const RobotModel& model, const GravityParams& params_plant,
                       const ControlCallback& controller, const SimConfig& config,
                       const Eigen::VectorXd& q0, const Eigen::VectorXd& qdot0);

/// Total mechanical energy 0.5 qdot^T M qdot + P, for conservation audits.
double total_energy(const RobotModel& model, const PlantState& state,
                    const GravityParams& params_plant,
                    const Eigen::VectorXd& armature);

}  // namespace gravcomp

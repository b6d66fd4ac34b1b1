#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gravcomp/plant_sim.hpp"

namespace gravcomp {

/// Diagonal PID gains, entries >= 0.
struct Gains {
  Eigen::VectorXd kp;  // N*m/rad
  Eigen::VectorXd ki;  // N*m/(rad*s)
  Eigen::VectorXd kv;  // N*m*s/rad

  static Gains zero(int n) {
    return {Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n),
            Eigen::VectorXd::Zero(n)};
  }
};

struct ControllerState {
  Eigen::VectorXd integral;     // rad*s, clamped to +-windup_limit
  Eigen::VectorXd target_q;     // rad
  Eigen::VectorXd target_qdot;  // rad/s
  std::vector<bool> zero_mask;  // masked joints emit exactly 0 N*m
  double windup_limit = 1.0;

  static ControllerState regulation(const Eigen::VectorXd& target);
};

/// One control tick: tau = G(q_m) + Kp e + Kv edot + Ki * integral(e), with
/// the integral clamped and masked joints forced to exactly zero.
/// Throws std::invalid_argument naming the joint on non-finite measurement.
std::pair<Eigen::VectorXd, ControllerState> control_torque(
    const Gains& gains, const RobotModel& model, const GravityParams& params_hat,
    const ControllerState& ctl_state, const JointState& measured, double dt);

/// Convenience wrapper binding gains/model/params/state into a simulate()
/// callback; mutates its internal state each tick.
class PidGravityController {
 public:
  PidGravityController(Gains gains, const RobotModel& model,
                       GravityParams params_hat, ControllerState initial,
                       double dt)
      : gains_(std::move(gains)), model_(model),
        params_hat_(std::move(params_hat)), state_(std::move(initial)), dt_(dt) {}

  Eigen::VectorXd operator()(double /*t*/, const JointState& measured) {
    auto [tau, next] = control_torque(gains_, model_, params_hat_, state_,
                                      measured, dt_);
    state_ = std::move(next);
    return tau;
  }

  const ControllerState& state() const { return state_; }

 private:
  Gains gains_;
  const RobotModel& model_;
  GravityParams params_hat_;
  ControllerState state_;
  double dt_;
};

struct TuneResult {
  double kp_critical;       // N*m/rad
  double period;            // s of the sustained oscillation
};

/// Mechanized version of manual Kp tuning: bisect kp (ki = kv = 0) for the
/// smallest gain whose post-transient oscillation holds its amplitude to
/// within 5% per period. Throws std::runtime_error naming the bracket when
/// no oscillatory regime exists in it.
TuneResult tune_kp_oscillation(const RobotModel& model,
                               const GravityParams& params_plant,
                               const GravityParams& params_hat, int joint,
                               const SimConfig& config,
                               const Eigen::VectorXd& rest_q,
                               double kp_lo = 1e-2, double kp_hi = 1e4);

/// Per-joint max |q(t) - q(release_t)| for t >= release_t.
Eigen::VectorXd drift_metric(const TrajectoryLog& log, double release_t);

struct OscillationResult {
  bool oscillatory = false;
  double amplitude = 0.0;  // rad, half peak-to-peak
  double frequency = 0.0;  // Hz, from mean zero-crossing interval
};

/// Amplitude/frequency of one joint's trace over [t_begin, t_end]. Fewer
/// than 3 zero crossings of (q - mean) yields a non-oscillatory result.
OscillationResult oscillation_metrics(const TrajectoryLog& log, int joint,
                                      double t_begin, double t_end);

}  // namespace gravcomp

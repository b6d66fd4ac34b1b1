#include "gravcomp/controller.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace gravcomp {

ControllerState ControllerState::regulation(const Eigen::VectorXd& target) {
  ControllerState state;
  const int n = static_cast<int>(target.size());
  state.integral = Eigen::VectorXd::Zero(n);
  state.target_q = target;
  state.target_qdot = Eigen::VectorXd::Zero(n);
  state.zero_mask.assign(n, false);
  return state;
}

std::pair<Eigen::VectorXd, ControllerState> control_torque(
    const Gains& gains, const RobotModel& model, const GravityParams& params_hat,
    const ControllerState& ctl_state, const JointState& measured, double dt) {
  if (dt <= 0) {
    throw std::invalid_argument("control_torque: dt must be > 0");
  }
  const int n = model.dof();
  for (int j = 0; j < n; ++j) {
    if (!std::isfinite(measured.q[j]) || !std::isfinite(measured.qdot[j])) {
      throw std::invalid_argument("control_torque: non-finite measurement at joint " +
                                  std::to_string(j + 1));
    }
  }

  const Eigen::VectorXd e = ctl_state.target_q - measured.q;
  const Eigen::VectorXd edot = ctl_state.target_qdot - measured.qdot;

  ControllerState next = ctl_state;
  next.integral = (ctl_state.integral + dt * e)
                      .cwiseMax(-ctl_state.windup_limit)
                      .cwiseMin(ctl_state.windup_limit);

  Eigen::VectorXd tau = gravity_torque(model, measured.q, params_hat) +
                        gains.kp.cwiseProduct(e) + gains.kv.cwiseProduct(edot) +
                        gains.ki.cwiseProduct(next.integral);
  for (int j = 0; j < n; ++j) {
    if (j < static_cast<int>(ctl_state.zero_mask.size()) && ctl_state.zero_mask[j]) {
      tau[j] = 0.0;
    }
  }
  return {std::move(tau), std::move(next)};
}

namespace {

struct PeriodScan {
  double amplitude_ratio;  // per-period amplitude change
  double period;           // s
};

// Per-period amplitude ratio of (q_joint - target) after the transient.
// Empty when fewer than three full periods are visible.
std::optional<PeriodScan> scan_periods(const TrajectoryLog& log, int joint,
                                       double target) {
  const auto& rows = log.rows;
  if (rows.size() < 4) return std::nullopt;
  const double t0 =
      rows.front().t + 0.2 * (rows.back().t - rows.front().t);  // skip transient

  // upward zero crossings of the error signal
  std::vector<double> crossings;
  for (size_t k = 1; k < rows.size(); ++k) {
    if (rows[k].t < t0) continue;
    const double prev = rows[k - 1].q[joint] - target;
    const double cur = rows[k].q[joint] - target;
    if (prev < 0.0 && cur >= 0.0) {
      const double frac = prev / (prev - cur);
      crossings.push_back(rows[k - 1].t + frac * (rows[k].t - rows[k - 1].t));
    }
  }
  if (crossings.size() < 4) return std::nullopt;

  std::vector<double> amplitudes;
  for (size_t c = 0; c + 1 < crossings.size(); ++c) {
    double peak = 0.0;
    for (const auto& row : rows) {
      if (row.t >= crossings[c] && row.t < crossings[c + 1]) {
        peak = std::max(peak, std::abs(row.q[joint] - target));
      }
    }
    amplitudes.push_back(peak);
  }
  if (amplitudes.size() < 3 || amplitudes.front() <= 0.0) return std::nullopt;

  const double span = static_cast<double>(amplitudes.size() - 1);
  const double ratio =
      std::pow(amplitudes.back() / amplitudes.front(), 1.0 / span);
  const double period =
      (crossings.back() - crossings.front()) / (crossings.size() - 1);
  return PeriodScan{ratio, period};
}

}  // namespace

TuneResult tune_kp_oscillation(const RobotModel& model,
                               const GravityParams& params_plant,
                               const GravityParams& params_hat, int joint,
                               const SimConfig& config,
                               const Eigen::VectorXd& rest_q, double kp_lo,
                               double kp_hi) {
  const int n = model.dof();
  if (joint < 0 || joint >= n) {
    throw std::out_of_range("tune_kp_oscillation: joint index out of range");
  }
  constexpr double kSustainedRatio = 0.95;  // < 5% amplitude loss per period
  constexpr double kOffset = 0.1;           // rad initial displacement

  const auto response = [&](double kp) -> std::optional<PeriodScan> {
    Gains gains = Gains::zero(n);
    gains.kp[joint] = kp;
    PidGravityController controller(gains, model, params_hat,
                                    ControllerState::regulation(rest_q),
                                    config.dt);
    Eigen::VectorXd q0 = rest_q;
    q0[joint] += kOffset;
    const TrajectoryLog log =
        simulate(model, params_plant, std::ref(controller), config, q0,
                 Eigen::VectorXd::Zero(n));
    return scan_periods(log, joint, rest_q[joint]);
  };

  const auto sustained = [&](double kp) {
    const auto scan = response(kp);
    return scan && scan->amplitude_ratio >= kSustainedRatio;
  };

  if (sustained(kp_lo)) {
    return {kp_lo, response(kp_lo)->period};
  }
  if (!sustained(kp_hi)) {
    throw std::runtime_error(
        "tune_kp_oscillation: no sustained oscillation in kp bracket [" +
        std::to_string(kp_lo) + ", " + std::to_string(kp_hi) + "]");
  }

  double lo = kp_lo, hi = kp_hi;
  for (int iter = 0; iter < 40 && hi / lo > 1.01; ++iter) {
    const double mid = std::sqrt(lo * hi);
    (sustained(mid) ? hi : lo) = mid;
  }
  return {hi, response(hi)->period};
}

Eigen::VectorXd drift_metric(const TrajectoryLog& log, double release_t) {
  const auto& rows = log.rows;
  if (rows.empty() || release_t < rows.front().t || release_t > rows.back().t) {
    throw std::out_of_range("drift_metric: release_t outside the log");
  }
  const Eigen::VectorXd* reference = nullptr;
  for (const auto& row : rows) {
    if (row.t >= release_t) {
      reference = &row.q;
      break;
    }
  }
  Eigen::VectorXd drift = Eigen::VectorXd::Zero(reference->size());
  for (const auto& row : rows) {
    if (row.t >= release_t) {
      drift = drift.cwiseMax((row.q - *reference).cwiseAbs());
    }
  }
  return drift;
}

OscillationResult oscillation_metrics(const TrajectoryLog& log, int joint,
                                      double t_begin, double t_end) {
  double mean = 0.0;
  int count = 0;
  for (const auto& row : log.rows) {
    if (row.t >= t_begin && row.t <= t_end) {
      mean += row.q[joint];
      ++count;
    }
  }
  if (count == 0) return {};
  mean /= count;

  double lo = 0.0, hi = 0.0;
  std::vector<double> crossings;
  bool first = true;
  double prev_t = 0.0, prev_v = 0.0;
  for (const auto& row : log.rows) {
    if (row.t < t_begin || row.t > t_end) continue;
    const double v = row.q[joint] - mean;
    if (first) {
      lo = hi = v;
      first = false;
    } else {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      if ((prev_v < 0.0 && v >= 0.0) || (prev_v > 0.0 && v <= 0.0)) {
        const double frac = prev_v / (prev_v - v);
        crossings.push_back(prev_t + frac * (row.t - prev_t));
      }
    }
    prev_t = row.t;
    prev_v = v;
  }
  if (crossings.size() < 3) return {};

  OscillationResult result;
  result.oscillatory = true;
  result.amplitude = 0.5 * (hi - lo);
  const double mean_interval =
      (crossings.back() - crossings.front()) / (crossings.size() - 1);
  result.frequency = 1.0 / (2.0 * mean_interval);
  return result;
}

}  // namespace gravcomp

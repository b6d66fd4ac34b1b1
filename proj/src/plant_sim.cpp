#include "gravcomp/plant_sim.hpp"

#include <cmath>

namespace gravcomp {

SimConfig SimConfig::defaults(int n, double dt, double duration) {
  SimConfig config;
  config.dt = dt;
  config.duration = duration;
  config.armature = Eigen::VectorXd::Constant(n, 1e-4);
  config.viscous_friction = Eigen::VectorXd::Zero(n);
  return config;
}

Eigen::MatrixXd mass_matrix(const RobotModel& model, const Eigen::VectorXd& q,
                            const Eigen::VectorXd& armature) {
  const int n = model.dof();
  const auto frames = forward_kinematics(model, q);

  Eigen::MatrixXd inertia = Eigen::MatrixXd::Zero(n, n);
  Eigen::Matrix3Xd jac(3, n);
  for (int i = 0; i < n; ++i) {
    if (model.links[i].mass == 0.0) continue;
    const Eigen::Vector3d p =
        frames[i].rotation * model.links[i].com + frames[i].translation;
    jac.setZero();
    for (int k = 0; k <= i; ++k) {
      const Eigen::Vector3d axis =
          k == 0 ? Eigen::Vector3d::UnitZ()
               : Eigen::Vector3d(frames[k - 1].rotation.col(2));
      const Eigen::Vector3d origin =
          k == 0 ? Eigen::Vector3d::Zero() : frames[k - 1].translation;
      jac.col(k) = model.dh[k].sign * axis.cross(p - origin);
    }
    inertia.noalias() += model.links[i].mass * jac.transpose() * jac;
  }
  inertia += armature.asDiagonal();
  return inertia;
}

Eigen::VectorXd coriolis_torque(const RobotModel& model, const Eigen::VectorXd& q,
                                const Eigen::VectorXd& qdot,
                                const Eigen::VectorXd& armature) {
  const int n = model.dof();
  if (qdot.isZero(0.0)) return Eigen::VectorXd::Zero(n);

  constexpr double h = 1e-6;
  std::vector<Eigen::MatrixXd> dmass(n);  // dmass[k] = dM/dq_k
  Eigen::VectorXd probe = q;
  for (int k = 0; k < n; ++k) {
    probe[k] = q[k] + h;
    const Eigen::MatrixXd plus = mass_matrix(model, probe, armature);
    probe[k] = q[k] - h;
    const Eigen::MatrixXd minus = mass_matrix(model, probe, armature);
    probe[k] = q[k];
    dmass[k] = (plus - minus) / (2.0 * h);
  }

  Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
  for (int k = 0; k < n; ++k) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double gamma =
            0.5 * (dmass[i](k, j) + dmass[j](k, i) - dmass[k](i, j));
        acc += gamma * qdot[i] * qdot[j];
      }
    }
    c[k] = acc;
  }
  return c;
}

Eigen::VectorXd forward_dynamics(const RobotModel& model, const Eigen::VectorXd& q,
                                 const Eigen::VectorXd& qdot,
                                 const Eigen::VectorXd& tau_applied,
                                 const GravityParams& params_plant,
                                 const SimConfig& config) {
  const Eigen::MatrixXd inertia = mass_matrix(model, q, config.armature);
  Eigen::LLT<Eigen::MatrixXd> chol(inertia);
  if (chol.info() != Eigen::Success) {
    std::string pose = "[";
    for (int j = 0; j < q.size(); ++j) {
      pose += (j ? ", " : "") + std::to_string(q[j]);
    }
    throw SimulationError(0.0, "singular mass matrix at pose " + pose +
                                   "]; increase armature");
  }
  const Eigen::VectorXd rhs =
      tau_applied - coriolis_torque(model, q, qdot, config.armature) -
      gravity_torque(model, q, params_plant) -
      config.viscous_friction.cwiseProduct(qdot);
  return chol.solve(rhs);
}

PlantState step(const RobotModel& model, const PlantState& state,
                const Eigen::VectorXd& tau, const GravityParams& params_plant,
                const SimConfig& config) {
  const double dt = config.dt;
  PlantState next;
  next.t = state.t + dt;

  const auto accel = [&](const Eigen::VectorXd& q, const Eigen::VectorXd& qd) {
    return forward_dynamics(model, q, qd, tau, params_plant, config);
  };

  if (config.integrator == Integrator::kSemiImplicitEuler) {
    const Eigen::VectorXd qdd = accel(state.joint.q, state.joint.qdot);
    next.joint.qdot = state.joint.qdot + dt * qdd;
    next.joint.q = state.joint.q + dt * next.joint.qdot;
  } else {
    const Eigen::VectorXd& q0 = state.joint.q;
    const Eigen::VectorXd& v0 = state.joint.qdot;
    const Eigen::VectorXd a1 = accel(q0, v0);
    const Eigen::VectorXd a2 = accel(q0 + 0.5 * dt * v0, v0 + 0.5 * dt * a1);
    const Eigen::VectorXd a3 =
        accel(q0 + 0.5 * dt * (v0 + 0.5 * dt * a1), v0 + 0.5 * dt * a2);
    const Eigen::VectorXd a4 = accel(q0 + dt * (v0 + 0.5 * dt * a2), v0 + dt * a3);
    next.joint.q =
        q0 + dt * v0 + (dt * dt / 6.0) * (a1 + a2 + a3);
    next.joint.qdot = v0 + (dt / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
  }

  if (!next.joint.q.allFinite() || !next.joint.qdot.allFinite()) {
    throw SimulationError(next.t, "non-finite state at t = " +
                                      std::to_string(next.t) + " s");
  }
  return next;
}

TrajectoryLog simulate(const RobotModel& model, const GravityParams& params_plant,
                       const ControlCallback& controller, const SimConfig& config,
                       const Eigen::VectorXd& q0, const Eigen::VectorXd& qdot0) {
  if (config.dt <= 0 || config.dt > config.duration) {
    throw std::invalid_argument("simulate: need 0 < dt <= duration");
  }
  const int steps = static_cast<int>(std::llround(config.duration / config.dt));

  TrajectoryLog log;
  log.rows.reserve(steps);
  PlantState state{0.0, {q0, qdot0}};
  for (int k = 0; k < steps; ++k) {
    const Eigen::VectorXd tau = controller(state.t, state.joint);
    log.rows.push_back({state.t, state.joint.q, state.joint.qdot, tau});
    try {
      state = step(model, state, tau, params_plant, config);
    } catch (const SimulationError& err) {
      throw SimulationError(state.t, err.what());
    }
  }
  return log;
}

double total_energy(const RobotModel& model, const PlantState& state,
                    const GravityParams& params_plant,
                    const Eigen::VectorXd& armature) {
  const Eigen::MatrixXd inertia = mass_matrix(model, state.joint.q, armature);
  return 0.5 * state.joint.qdot.dot(inertia * state.joint.qdot) +
         potential_energy(model, state.joint.q, params_plant);
}

}  // namespace gravcomp

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gravcomp/io.hpp"

namespace {

using namespace gravcomp;

constexpr int kExitParse = 2;
constexpr int kExitDimension = 3;
constexpr int kExitIo = 4;
constexpr int kExitDegenerate = 5;
constexpr int kExitDivergence = 6;

void print_fk(const RobotModel& model, const Eigen::VectorXd& q) {
  const auto frames = forward_kinematics(model, q);
  for (size_t i = 0; i < frames.size(); ++i) {
    const auto& f = frames[i];
    std::printf("frame %zu origin [%.9g, %.9g, %.9g]\n", i + 1,
                f.translation[0], f.translation[1], f.translation[2]);
    for (int r = 0; r < 3; ++r) {
      std::printf("        R[%d]   [%.9g, %.9g, %.9g]\n", r, f.rotation(r, 0),
                  f.rotation(r, 1), f.rotation(r, 2));
    }
  }
}

int run_identify(const std::string& robot_path, const std::string& data_path,
                 const std::string& out_path, double tol, double holdout_frac,
                 bool normal_equations) {
  const RobotModel model = load_robot(robot_path);
  const int n = model.dof();
  Dataset data = load_dataset_csv(data_path, n);

  const int total = static_cast<int>(data.samples.size());
  const int holdout = std::min(total - 1, static_cast<int>(holdout_frac * total));
  Dataset train, test;
  train.samples.assign(data.samples.begin(), data.samples.end() - holdout);
  test.samples.assign(data.samples.end() - holdout, data.samples.end());

  const BaseParamMap base_map = base_reduction(model, 200, 0xba5e, tol > 0 ? tol : 1e-8);
  const auto [regressors, torques] = stack(model, train);
  const IdentReport report =
      solve(regressors, torques, tol, &base_map,
            normal_equations ? SolveMethod::kNormalEquations : SolveMethod::kSvd);
  if (report.rank == 0) {
    std::cerr << "degenerate fit: stacked regressor has rank 0 "
                 "(zero-geometry model or gravity-free chain)\n";
    return kExitDegenerate;
  }

  double holdout_rms = 0.0;
  if (!test.samples.empty()) {
    double acc = 0.0;
    for (const auto& sample : test.samples) {
      acc += (predict(model, report, sample.q) - sample.tau).squaredNorm();
    }
    holdout_rms = std::sqrt(acc / (test.samples.size() * n));
  }

  save_ident_report_json(out_path, report, base_map, holdout_rms);
  std::printf("samples      %d (train %zu, holdout %zu)\n", total,
              train.samples.size(), test.samples.size());
  std::printf("rank         %d\n", report.rank);
  std::printf("condition    %.6g\n", report.condition_number);
  std::printf("residual_rms %.9g N*m\n", report.residual_rms);
  std::printf("holdout_rms  %.9g N*m\n", holdout_rms);
  for (int j = 0; j < n; ++j) {
    std::printf("joint %d rms  %.9g N*m\n", j + 1, report.per_joint_rms[j]);
  }
  return 0;
}

int run_simulate(const std::string& exp_path, const std::string& out_path) {
  Experiment exp = load_experiment(exp_path);
  const int n = exp.robot.dof();

  ControllerState init = ControllerState::regulation(exp.target_q);
  init.zero_mask = exp.zero_mask;
  PidGravityController controller(exp.gains, exp.robot, exp.controller_params,
                                  init, exp.sim.dt);
  const TrajectoryLog log =
      simulate(exp.robot, exp.plant_params, std::ref(controller), exp.sim,
               exp.initial_q, exp.initial_qdot);
  save_trajectory_csv(out_path, log);

  const Eigen::VectorXd drift = drift_metric(log, 0.0);
  for (int j = 0; j < n; ++j) {
    const auto osc =
        oscillation_metrics(log, j, 0.0, log.rows.back().t);
    if (osc.oscillatory) {
      std::printf("joint %d drift %.9g rad, amplitude %.9g rad, frequency %.9g Hz\n",
                  j + 1, drift[j], osc.amplitude, osc.frequency);
    } else {
      std::printf("joint %d drift %.9g rad, not oscillatory\n", j + 1, drift[j]);
    }
  }
  return 0;
}

int run_rank(const std::string& robot_path, int n_poses, unsigned seed, double tol) {
  const RobotModel model = load_robot(robot_path);
  const BaseParamMap map = base_reduction(model, n_poses, seed, tol);
  std::printf("rank %d of %d\n", map.rank, 4 * model.dof());
  std::printf("pivot columns:");
  for (int col : map.independent_columns) std::printf(" %d", col);
  std::printf("\n");

  // condition of the base regressor over the same pose sample
  std::mt19937_64 rng(seed);
  Eigen::MatrixXd stacked(n_poses * model.dof(), 4 * model.dof());
  for (int s = 0; s < n_poses; ++s) {
    stacked.middleRows(s * model.dof(), model.dof()) =
        gravity_regressor(model, random_pose(model, rng));
  }
  Eigen::MatrixXd base(stacked.rows(), map.rank);
  for (int k = 0; k < map.rank; ++k) {
    base.col(k) = stacked.col(map.independent_columns[k]);
  }
  if (map.rank > 0) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(base);
    const auto& sigma = svd.singularValues();
    std::printf("base condition %.6g\n", sigma[0] / sigma[sigma.size() - 1]);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Manipulator gravity-compensation toolkit"};
  app.require_subcommand(1);

  std::string robot_path, dataset_path, out_path, exp_path, report_path;
  std::vector<double> q_values;
  int poses = 200;
  unsigned seed = 0;
  double noise = 0.0, tol = 1e-10;
  double holdout = 0.2;
  int jobs = 1;
  bool normal_equations = false;

  auto* fk = app.add_subcommand("fk", "Forward kinematics at a pose");
  fk->add_option("--robot", robot_path, "robot description JSON")->required();
  fk->add_option("--q", q_values, "joint angles, rad")->required();

  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  synth->add_option("--robot", robot_path)->required();
  synth->add_option("--out", out_path)->required();
  synth->add_option("--poses", poses);
  synth->add_option("--noise", noise);
  synth->add_option("--seed", seed);
  synth->add_option("--jobs", jobs);

  auto* identify = app.add_subcommand("identify", "Fit gravity parameters");
  identify->add_option("--robot", robot_path)->required();
  identify->add_option("--dataset", dataset_path)->required();
  identify->add_option("--out", out_path)->required();
  identify->add_option("--tol", tol);
  identify->add_option("--holdout", holdout);
  identify->add_flag("--normal-equations", normal_equations,
                     "literal normal-equation solve instead of SVD");

  auto* simulate_cmd = app.add_subcommand("simulate", "Run a closed-loop experiment");
  simulate_cmd->add_option("--experiment", exp_path)->required();
  simulate_cmd->add_option("--out", out_path)->required();

  auto* rank = app.add_subcommand("rank", "Base-parameter rank of the geometry");
  rank->add_option("--robot", robot_path)->required();
  rank->add_option("--poses", poses);
  rank->add_option("--seed", seed);
  rank->add_option("--tol", tol)->default_val(1e-8);

  CLI11_PARSE(app, argc, argv);

  try {
    if (fk->parsed()) {
      const gravcomp::RobotModel model = gravcomp::load_robot(robot_path);
      if (static_cast<int>(q_values.size()) != model.dof()) {
        std::cerr << "expected " << model.dof() << " joint angles, got "
                  << q_values.size() << "\n";
        return kExitDimension;
      }
      print_fk(model, Eigen::Map<Eigen::VectorXd>(q_values.data(),
                                                  q_values.size()));
      return 0;
    }
    if (synth->parsed()) {
      const gravcomp::RobotModel model = gravcomp::load_robot(robot_path);
      const gravcomp::Dataset data = gravcomp::synth_dataset(
          model, gravcomp::params_from_links(model), poses, noise, seed);
      gravcomp::save_dataset_csv(out_path, data);
      std::printf("wrote %d samples to %s\n", poses, out_path.c_str());
      return 0;
    }
    if (identify->parsed()) {
      return run_identify(robot_path, dataset_path, out_path, tol, holdout,
                          normal_equations);
    }
    if (simulate_cmd->parsed()) {
      return run_simulate(exp_path, out_path);
    }
    if (rank->parsed()) {
      return run_rank(robot_path, poses, seed, tol);
    }
  } catch (const gravcomp::ParseError& err) {
    std::cerr << "parse error: " << err.what() << "\n";
    return kExitParse;
  } catch (const gravcomp::DimensionError& err) {
    std::cerr << "dimension error: " << err.what() << "\n";
    return kExitDimension;
  } catch (const gravcomp::IoError& err) {
    std::cerr << "I/O error: " << err.what() << "\n";
    return kExitIo;
  } catch (const gravcomp::DegenerateError& err) {
    std::cerr << "degenerate problem: " << err.what() << "\n";
    return kExitDegenerate;
  } catch (const gravcomp::SimulationError& err) {
    std::cerr << "simulation diverged at t = " << err.t << " s: " << err.what()
              << "\n";
    return kExitDivergence;
  } catch (const std::invalid_argument& err) {
    std::cerr << "dimension error: " << err.what() << "\n";
    return kExitDimension;
  }
  return 0;
}

#include "gravcomp/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace gravcomp {

namespace {

using nlohmann::json;

json parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  try {
    return json::parse(in);
  } catch (const json::parse_error& err) {
    throw ParseError(path.string() + ": " + err.what());
  }
}

Eigen::VectorXd to_vector(const json& node, const std::string& key, int expected) {
  if (!node.is_array()) {
    throw ParseError("key '" + key + "' must be an array");
  }
  if (expected >= 0 && static_cast<int>(node.size()) != expected) {
    throw DimensionError("key '" + key + "' must have length " +
                         std::to_string(expected) + ", got " +
                         std::to_string(node.size()));
  }
  Eigen::VectorXd v(node.size());
  for (size_t k = 0; k < node.size(); ++k) {
    if (!node[k].is_number()) {
      throw ParseError("key '" + key + "' element " + std::to_string(k) +
                       " is not a number");
    }
    v[k] = node[k].get<double>();
  }
  return v;
}

double require_number(const json& node, const std::string& key) {
  if (!node.contains(key) || !node[key].is_number()) {
    throw ParseError("missing or non-numeric key '" + key + "'");
  }
  return node[key].get<double>();
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

RobotModel load_robot(const std::filesystem::path& path) {
  const json doc = parse_file(path);
  RobotModel model;
  model.name = doc.value("name", path.stem().string());
  if (doc.contains("gravity")) {
    const Eigen::VectorXd g = to_vector(doc["gravity"], "gravity", 3);
    model.gravity = g.head<3>();
  }
  if (!doc.contains("joints") || !doc["joints"].is_array() ||
      !doc.contains("links") || !doc["links"].is_array()) {
    throw ParseError(path.string() + ": need 'joints' and 'links' arrays");
  }
  if (doc["joints"].size() != doc["links"].size() || doc["joints"].empty()) {
    throw ParseError(path.string() + ": 'joints' and 'links' must be equal-length, non-empty");
  }

  bool any_limits = false;
  std::vector<std::pair<double, double>> limits;
  for (const auto& jnode : doc["joints"]) {
    DHRow row;
    row.sign = require_number(jnode, "sign");
    if (row.sign != 1.0 && row.sign != -1.0) {
      throw ParseError(path.string() + ": joint 'sign' must be -1 or +1");
    }
    row.theta_offset = require_number(jnode, "theta_offset");
    if (std::abs(row.theta_offset) > 2 * std::numbers::pi + 1e-12) {
      throw ParseError(path.string() + ": 'theta_offset' outside [-2pi, 2pi]");
    }
    row.d = require_number(jnode, "d");
    row.alpha = require_number(jnode, "alpha");
    row.a = require_number(jnode, "a");
    model.dh.push_back(row);

    if (jnode.contains("limit_lo") != jnode.contains("limit_hi")) {
      throw ParseError(path.string() + ": 'limit_lo'/'limit_hi' must come in pairs");
    }
    if (jnode.contains("limit_lo")) {
      const double lo = require_number(jnode, "limit_lo");
      const double hi = require_number(jnode, "limit_hi");
      if (lo >= hi) {
        throw ParseError(path.string() + ": joint limit needs lo < hi");
      }
      limits.emplace_back(lo, hi);
      any_limits = true;
    } else {
      limits.emplace_back(-std::numbers::pi, std::numbers::pi);
    }
  }
  for (const auto& lnode : doc["links"]) {
    LinkInertia link;
    link.mass = require_number(lnode, "mass");
    if (link.mass < 0 || !std::isfinite(link.mass)) {
      throw ParseError(path.string() + ": link 'mass' must be finite and >= 0");
    }
    if (lnode.contains("com")) {
      link.com = to_vector(lnode["com"], "com", 3).head<3>();
    }
    model.links.push_back(link);
  }
  if (any_limits) {
    model.joint_limits = std::move(limits);
  }
  return model;
}

GravityParams load_params_json(const std::filesystem::path& path, int n) {
  const json doc = parse_file(path);
  const json& node = doc.is_array() ? doc
                     : doc.contains("params_full") ? doc["params_full"]
                                                   : doc;
  return to_vector(node, "params_full", 4 * n);
}

Experiment load_experiment(const std::filesystem::path& path) {
  const json doc = parse_file(path);
  if (!doc.contains("robot") || !doc["robot"].is_string()) {
    throw ParseError(path.string() + ": missing 'robot' path");
  }
  Experiment exp;
  std::filesystem::path robot_path = doc["robot"].get<std::string>();
  if (robot_path.is_relative()) {
    robot_path = path.parent_path() / robot_path;
  }
  exp.robot = load_robot(robot_path);
  const int n = exp.robot.dof();

  const auto load_params = [&](const char* key) -> GravityParams {
    if (!doc.contains(key)) {
      return params_from_links(exp.robot);
    }
    if (doc[key].is_string()) {
      std::filesystem::path p = doc[key].get<std::string>();
      if (p.is_relative()) p = path.parent_path() / p;
      return load_params_json(p, n);
    }
    return to_vector(doc[key], key, 4 * n);
  };
  exp.plant_params = load_params("plant_params");
  exp.controller_params = load_params("controller_params");

  exp.gains = Gains::zero(n);
  if (doc.contains("gains")) {
    const json& g = doc["gains"];
    if (g.contains("kp")) exp.gains.kp = to_vector(g["kp"], "gains.kp", n);
    if (g.contains("ki")) exp.gains.ki = to_vector(g["ki"], "gains.ki", n);
    if (g.contains("kv")) exp.gains.kv = to_vector(g["kv"], "gains.kv", n);
    if ((exp.gains.kp.array() < 0).any() || (exp.gains.ki.array() < 0).any() ||
        (exp.gains.kv.array() < 0).any()) {
      throw ParseError(path.string() + ": gains must be >= 0");
    }
  }

  exp.zero_mask.assign(n, false);
  if (doc.contains("zero_mask")) {
    const json& mask = doc["zero_mask"];
    if (!mask.is_array() || static_cast<int>(mask.size()) != n) {
      throw DimensionError(path.string() + ": 'zero_mask' must have length " +
                           std::to_string(n));
    }
    for (int j = 0; j < n; ++j) {
      exp.zero_mask[j] = mask[j].get<bool>();
    }
  }

  exp.sim = SimConfig::defaults(n);
  if (doc.contains("sim")) {
    const json& sim = doc["sim"];
    if (sim.contains("dt")) exp.sim.dt = require_number(sim, "dt");
    if (sim.contains("duration")) exp.sim.duration = require_number(sim, "duration");
    if (sim.contains("integrator")) {
      const std::string name = sim["integrator"].get<std::string>();
      if (name == "semi_implicit_euler") {
        exp.sim.integrator = Integrator::kSemiImplicitEuler;
      } else if (name == "rk4") {
        exp.sim.integrator = Integrator::kRk4;
      } else {
        throw ParseError(path.string() + ": unknown integrator '" + name + "'");
      }
    }
    if (sim.contains("armature")) {
      exp.sim.armature = to_vector(sim["armature"], "sim.armature", n);
    }
    if (sim.contains("viscous")) {
      exp.sim.viscous_friction = to_vector(sim["viscous"], "sim.viscous", n);
    }
    if (exp.sim.dt <= 0 || exp.sim.duration <= 0 || exp.sim.dt > exp.sim.duration) {
      throw ParseError(path.string() + ": need 0 < sim.dt <= sim.duration");
    }
  }

  exp.initial_q = Eigen::VectorXd::Zero(n);
  exp.initial_qdot = Eigen::VectorXd::Zero(n);
  if (doc.contains("initial")) {
    const json& init = doc["initial"];
    if (init.contains("q")) exp.initial_q = to_vector(init["q"], "initial.q", n);
    if (init.contains("qdot")) {
      exp.initial_qdot = to_vector(init["qdot"], "initial.qdot", n);
    }
  }
  exp.target_q = exp.initial_q;
  if (doc.contains("target") && doc["target"].contains("q")) {
    exp.target_q = to_vector(doc["target"]["q"], "target.q", n);
  }
  return exp;
}

Dataset load_dataset_csv(const std::filesystem::path& path, int n) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  Dataset data;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1) continue;  // header
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::vector<double> values;
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        values.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ParseError(path.string() + ":" + std::to_string(lineno) +
                         ": bad number '" + cell + "'");
      }
    }
    if (static_cast<int>(values.size()) != 2 * n) {
      throw DimensionError(path.string() + ":" + std::to_string(lineno) +
                           ": expected " + std::to_string(2 * n) +
                           " columns, got " + std::to_string(values.size()));
    }
    Dataset::Sample sample;
    sample.q = Eigen::Map<Eigen::VectorXd>(values.data(), n);
    sample.tau = Eigen::Map<Eigen::VectorXd>(values.data() + n, n);
    data.samples.push_back(std::move(sample));
  }
  if (data.samples.empty()) {
    throw DimensionError(path.string() + ": no samples");
  }
  return data;
}

void save_dataset_csv(const std::filesystem::path& path, const Dataset& data) {
  const int n = static_cast<int>(data.samples.front().q.size());
  std::string out;
  for (int j = 0; j < n; ++j) out += "q" + std::to_string(j + 1) + ",";
  for (int j = 0; j < n; ++j) {
    out += "tau" + std::to_string(j + 1) + (j + 1 < n ? "," : "\n");
  }
  for (const auto& sample : data.samples) {
    for (int j = 0; j < n; ++j) out += fmt(sample.q[j]) + ",";
    for (int j = 0; j < n; ++j) {
      out += fmt(sample.tau[j]) + (j + 1 < n ? "," : "\n");
    }
  }
  atomic_write(path, out);
}

void save_trajectory_csv(const std::filesystem::path& path,
                         const TrajectoryLog& log) {
  if (log.rows.empty()) {
    throw IoError("save_trajectory_csv: empty log");
  }
  const int n = static_cast<int>(log.rows.front().q.size());
  std::string out = "t";
  for (int j = 0; j < n; ++j) out += ",q" + std::to_string(j + 1);
  for (int j = 0; j < n; ++j) out += ",qd" + std::to_string(j + 1);
  for (int j = 0; j < n; ++j) out += ",tau" + std::to_string(j + 1);
  out += "\n";
  for (const auto& row : log.rows) {
    out += fmt(row.t);
    for (int j = 0; j < n; ++j) out += "," + fmt(row.q[j]);
    for (int j = 0; j < n; ++j) out += "," + fmt(row.qdot[j]);
    for (int j = 0; j < n; ++j) out += "," + fmt(row.tau_applied[j]);
    out += "\n";
  }
  atomic_write(path, out);
}

TrajectoryLog load_trajectory_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  TrajectoryLog log;
  std::string line;
  int lineno = 0;
  int n = -1;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 || line.empty()) continue;
    std::stringstream ss(line);
    std::vector<double> values;
    std::string cell;
    while (std::getline(ss, cell, ',')) values.push_back(std::stod(cell));
    if (n < 0) {
      if ((values.size() - 1) % 3 != 0) {
        throw ParseError(path.string() + ": column count must be 1 + 3n");
      }
      n = static_cast<int>(values.size() - 1) / 3;
    }
    TrajectoryLog::Row row;
    row.t = values[0];
    row.q = Eigen::Map<Eigen::VectorXd>(values.data() + 1, n);
    row.qdot = Eigen::Map<Eigen::VectorXd>(values.data() + 1 + n, n);
    row.tau_applied = Eigen::Map<Eigen::VectorXd>(values.data() + 1 + 2 * n, n);
    log.rows.push_back(std::move(row));
  }
  return log;
}

void save_ident_report_json(const std::filesystem::path& path,
                            const IdentReport& report,
                            const BaseParamMap& base_map, double holdout_rms) {
  json doc;
  doc["params_full"] = std::vector<double>(
      report.params_full.begin(), report.params_full.end());
  doc["params_base"] = std::vector<double>(
      report.params_base.begin(), report.params_base.end());
  doc["base_columns"] = base_map.independent_columns;
  doc["residual_rms"] = report.residual_rms;
  doc["per_joint_rms"] = std::vector<double>(
      report.per_joint_rms.begin(), report.per_joint_rms.end());
  doc["condition_number"] = report.condition_number;
  doc["rank"] = report.rank;
  doc["n_samples"] = report.n_samples;
  doc["holdout_rms"] = holdout_rms;
  atomic_write(path, doc.dump(2) + "\n");
}

void atomic_write(const std::filesystem::path& path, const std::string& contents) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw IoError("cannot open " + tmp.string() + " for writing");
    }
    out << contents;
    if (!out.flush()) {
      throw IoError("write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw IoError("rename to " + path.string() + " failed: " + ec.message());
  }
}

}  // namespace gravcomp

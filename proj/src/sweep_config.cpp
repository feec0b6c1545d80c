#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "snl/experiment.hpp"

namespace snl {

namespace {

using json = nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!known.count(it.key())) {
      throw InvalidInput("unknown key '" + it.key() + "' in " + where);
    }
  }
}

template <typename T>
T read(const json& v, const std::string& key) {
  try {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw InvalidInput("");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw InvalidInput("");
      if constexpr (std::is_unsigned_v<T>) {
        if (v.is_number_unsigned()) return v.get<T>();
        if (v.get<long long>() < 0) throw InvalidInput("");
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw InvalidInput("");
    } else {
      if (!v.is_string()) throw InvalidInput("");
    }
    return v.get<T>();
  } catch (const std::exception&) {
    throw InvalidInput("key '" + key + "' has the wrong type");
  }
}

SolverOptions parse_solver(const json& j) {
  if (!j.is_object()) {
    throw InvalidInput("'solver' must be an object");
  }
  reject_unknown(j,
                 {"grad_tol", "max_iters", "initial_radius", "max_radius", "acceptance_threshold", "tcg_max_inner",
                  "tcg_kappa", "tcg_theta", "max_consecutive_rejections", "time_limit_seconds"},
                 "solver");
  SolverOptions s;
  if (j.contains("grad_tol")) s.grad_tol = read<double>(j["grad_tol"], "solver.grad_tol");
  if (j.contains("max_iters")) s.max_iters = read<int>(j["max_iters"], "solver.max_iters");
  if (j.contains("initial_radius")) s.initial_radius = read<double>(j["initial_radius"], "solver.initial_radius");
  if (j.contains("max_radius")) s.max_radius = read<double>(j["max_radius"], "solver.max_radius");
  if (j.contains("acceptance_threshold"))
    s.acceptance_threshold = read<double>(j["acceptance_threshold"], "solver.acceptance_threshold");
  if (j.contains("tcg_max_inner")) s.tcg_max_inner = read<int>(j["tcg_max_inner"], "solver.tcg_max_inner");
  if (j.contains("tcg_kappa")) s.tcg_kappa = read<double>(j["tcg_kappa"], "solver.tcg_kappa");
  if (j.contains("tcg_theta")) s.tcg_theta = read<double>(j["tcg_theta"], "solver.tcg_theta");
  if (j.contains("max_consecutive_rejections"))
    s.max_consecutive_rejections = read<int>(j["max_consecutive_rejections"], "solver.max_consecutive_rejections");
  if (j.contains("time_limit_seconds"))
    s.time_limit_seconds = read<double>(j["time_limit_seconds"], "solver.time_limit_seconds");
  return s;
}

}  // namespace

SweepSpec parse_sweep_spec(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) {
    throw InvalidInput("sweep config must be a JSON object");
  }
  reject_unknown(j,
                 {"experiment_id", "n", "dg", "k_values", "densities", "trials_per_cell", "base_seed",
                  "noise_variance", "success_mode", "cost_tol", "recovery_tol", "noisy_cost_factor",
                  "trial_time_limit_seconds", "polish", "polish_max_ratio", "record_runtime", "solver"},
                 "sweep config");
  SweepSpec s;
  if (j.contains("experiment_id")) s.experiment_id = read<std::string>(j["experiment_id"], "experiment_id");
  if (j.contains("n")) s.n = read<Index>(j["n"], "n");
  if (j.contains("dg")) s.dg = read<Index>(j["dg"], "dg");
  if (j.contains("k_values")) {
    if (!j["k_values"].is_array()) throw InvalidInput("'k_values' must be an array");
    s.k_values.clear();
    for (const auto& v : j["k_values"]) s.k_values.push_back(read<Index>(v, "k_values"));
  }
  if (j.contains("densities")) {
    if (!j["densities"].is_array()) throw InvalidInput("'densities' must be an array");
    s.densities.clear();
    for (const auto& v : j["densities"]) s.densities.push_back(read<double>(v, "densities"));
  }
  if (j.contains("trials_per_cell")) s.trials_per_cell = read<int>(j["trials_per_cell"], "trials_per_cell");
  if (j.contains("base_seed")) s.base_seed = read<std::uint64_t>(j["base_seed"], "base_seed");
  if (j.contains("noise_variance")) s.noise_variance = read<double>(j["noise_variance"], "noise_variance");
  if (j.contains("success_mode")) s.success_mode = parse_success_mode(read<std::string>(j["success_mode"], "success_mode"));
  if (j.contains("cost_tol")) s.cost_tol = read<double>(j["cost_tol"], "cost_tol");
  if (j.contains("recovery_tol")) s.recovery_tol = read<double>(j["recovery_tol"], "recovery_tol");
  if (j.contains("noisy_cost_factor")) s.noisy_cost_factor = read<double>(j["noisy_cost_factor"], "noisy_cost_factor");
  if (j.contains("trial_time_limit_seconds"))
    s.trial_time_limit_seconds = read<double>(j["trial_time_limit_seconds"], "trial_time_limit_seconds");
  if (j.contains("polish")) s.polish = read<bool>(j["polish"], "polish");
  if (j.contains("polish_max_ratio")) s.polish_max_ratio = read<double>(j["polish_max_ratio"], "polish_max_ratio");
  if (j.contains("record_runtime")) s.record_runtime = read<bool>(j["record_runtime"], "record_runtime");
  if (j.contains("solver")) s.solver = parse_solver(j["solver"]);
  s.validate();
  return s;
}

SweepSpec load_sweep_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot read '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_sweep_spec(buf.str());
}

std::string to_json(const SweepSpec& spec) {
  json solver = {
      {"grad_tol", spec.solver.grad_tol},
      {"max_iters", spec.solver.max_iters},
      {"initial_radius", spec.solver.initial_radius},
      {"max_radius", spec.solver.max_radius},
      {"acceptance_threshold", spec.solver.acceptance_threshold},
      {"tcg_max_inner", spec.solver.tcg_max_inner},
      {"tcg_kappa", spec.solver.tcg_kappa},
      {"tcg_theta", spec.solver.tcg_theta},
      {"max_consecutive_rejections", spec.solver.max_consecutive_rejections},
      {"time_limit_seconds", spec.solver.time_limit_seconds},
  };
  json j = {
      {"experiment_id", spec.experiment_id},
      {"n", spec.n},
      {"dg", spec.dg},
      {"k_values", spec.k_values},
      {"densities", spec.densities},
      {"trials_per_cell", spec.trials_per_cell},
      {"base_seed", spec.base_seed},
      {"noise_variance", spec.noise_variance},
      {"success_mode", to_string(spec.success_mode)},
      {"cost_tol", spec.cost_tol},
      {"recovery_tol", spec.recovery_tol},
      {"noisy_cost_factor", spec.noisy_cost_factor},
      {"trial_time_limit_seconds", spec.trial_time_limit_seconds},
      {"polish", spec.polish},
      {"polish_max_ratio", spec.polish_max_ratio},
      {"record_runtime", spec.record_runtime},
      {"solver", solver},
  };
  return j.dump(2);
}

}  // namespace snl

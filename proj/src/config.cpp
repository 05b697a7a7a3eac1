#include "restart_agd/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>

#include "restart_agd/prng.hpp"
#include "restart_agd/trace_io.hpp"

namespace restart_agd {

namespace {

using nlohmann::ordered_json;

const std::set<std::string> kProblemTypes = {
    "quadratic",   "huber",       "hinder-lubin", "modified-hinder-lubin",
    "scalar-quad", "scalar-huber", "asymmetric"};

template <typename T>
void read_field(const ordered_json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("config field '") + key + "' has the wrong type");
  }
}

}  // namespace

nlohmann::ordered_json config_to_json(const ExperimentConfig& cfg) {
  ordered_json j;
  j["problem"] = cfg.problem.type;
  j["n"] = cfg.problem.n;
  j["m"] = cfg.problem.m;
  j["seed"] = cfg.problem.seed;
  j["tau"] = cfg.problem.tau;
  j["delta"] = cfg.problem.delta;
  j["alpha"] = cfg.problem.alpha;
  j["gamma"] = cfg.problem.gamma;
  j["c"] = cfg.problem.c;
  j["L"] = cfg.problem.L;
  j["center"] = cfg.problem.center;
  j["c_left"] = cfg.problem.c_left;
  j["c_right"] = cfg.problem.c_right;
  j["b"] = cfg.problem.b;
  j["policy"] = cfg.policy;
  j["schedule"] = cfg.schedule;
  j["max_iters"] = cfg.max_iters;
  j["grad_tol"] = cfg.grad_tol;
  j["x0"] = cfg.x0;
  j["out_dir"] = cfg.out_dir;
  j["csv_path"] = cfg.csv_path;
  j["json_path"] = cfg.json_path;
  j["svg_path"] = cfg.svg_path;
  return j;
}

ExperimentConfig config_from_json(const nlohmann::ordered_json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> known = {
      "problem", "n",      "m",        "seed",      "tau",     "delta",
      "alpha",   "gamma",  "c",        "L",         "center",  "c_left",
      "c_right", "b",      "policy",   "schedule",  "max_iters",
      "grad_tol", "x0",    "out_dir",  "csv_path",  "json_path", "svg_path"};
  for (const auto& [key, value] : j.items())
    if (known.find(key) == known.end())
      throw ConfigError("unknown config field '" + key + "'");
  ExperimentConfig cfg;
  read_field(j, "problem", cfg.problem.type);
  read_field(j, "n", cfg.problem.n);
  read_field(j, "m", cfg.problem.m);
  read_field(j, "seed", cfg.problem.seed);
  read_field(j, "tau", cfg.problem.tau);
  read_field(j, "delta", cfg.problem.delta);
  read_field(j, "alpha", cfg.problem.alpha);
  read_field(j, "gamma", cfg.problem.gamma);
  read_field(j, "c", cfg.problem.c);
  read_field(j, "L", cfg.problem.L);
  read_field(j, "center", cfg.problem.center);
  read_field(j, "c_left", cfg.problem.c_left);
  read_field(j, "c_right", cfg.problem.c_right);
  read_field(j, "b", cfg.problem.b);
  read_field(j, "policy", cfg.policy);
  read_field(j, "schedule", cfg.schedule);
  read_field(j, "max_iters", cfg.max_iters);
  read_field(j, "grad_tol", cfg.grad_tol);
  read_field(j, "x0", cfg.x0);
  read_field(j, "out_dir", cfg.out_dir);
  read_field(j, "csv_path", cfg.csv_path);
  read_field(j, "json_path", cfg.json_path);
  read_field(j, "svg_path", cfg.svg_path);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config: " + path);
  ordered_json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + path + " is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

std::unique_ptr<Objective> build_problem(const ProblemSpec& spec) {
  if (kProblemTypes.find(spec.type) == kProblemTypes.end())
    throw ConfigError("unknown problem type '" + spec.type + "'");
  if (spec.type == "quadratic") {
    if (spec.n < 1) throw ConfigError("problem 'quadratic': n must be >= 1");
    Prng prng(spec.seed);
    return std::make_unique<QuadraticProblem>(make_quadratic(spec.n, prng));
  }
  if (spec.type == "huber") {
    if (spec.m < 1) throw ConfigError("problem 'huber': m must be >= 1");
    if (spec.n < 1) throw ConfigError("problem 'huber': n must be >= 1");
    if (!(spec.tau > 0.0)) throw ConfigError("problem 'huber': tau must be > 0");
    Prng prng(spec.seed);
    return std::make_unique<HuberProblem>(make_huber(spec.m, spec.n, spec.tau, prng));
  }
  if (spec.type == "hinder-lubin") {
    if (spec.n < 1) throw ConfigError("problem 'hinder-lubin': n must be >= 1");
    if (!(spec.delta > 0.0))
      throw ConfigError("problem 'hinder-lubin': delta must be > 0");
    if (!(spec.alpha >= 0.0))
      throw ConfigError("problem 'hinder-lubin': alpha must be >= 0");
    return std::make_unique<HinderLubinProblem>(
        make_hinder_lubin(spec.n, spec.delta, spec.alpha));
  }
  if (spec.type == "modified-hinder-lubin") {
    if (spec.n < 1)
      throw ConfigError("problem 'modified-hinder-lubin': n must be >= 1");
    if (spec.m < 1)
      throw ConfigError("problem 'modified-hinder-lubin': m must be >= 1");
    if (!(spec.delta > 0.0))
      throw ConfigError("problem 'modified-hinder-lubin': delta must be > 0");
    if (!(spec.alpha >= 0.0))
      throw ConfigError("problem 'modified-hinder-lubin': alpha must be >= 0");
    if (!(spec.gamma > 0.0))
      throw ConfigError("problem 'modified-hinder-lubin': gamma must be > 0");
    Prng prng(spec.seed);
    return std::make_unique<HinderLubinProblem>(make_modified_hinder_lubin(
        spec.n, spec.m, spec.delta, spec.alpha, spec.gamma, prng));
  }
  try {
    if (spec.type == "scalar-quad") {
      if (!(spec.c > 0.0)) throw ConfigError("problem 'scalar-quad': c must be > 0");
      const double L = spec.L == 0.0 ? spec.c : spec.L;
      return std::make_unique<ScalarProblem>(ScalarProblem::scaled_quadratic(spec.c, L));
    }
    if (spec.type == "scalar-huber") {
      if (!(spec.tau > 0.0))
        throw ConfigError("problem 'scalar-huber': tau must be > 0");
      const double L = spec.L == 0.0 ? 1.0 : spec.L;
      return std::make_unique<ScalarProblem>(
          ScalarProblem::scalar_huber(spec.tau, spec.center, L));
    }
    // asymmetric
    if (!(spec.c_left > 0.0))
      throw ConfigError("problem 'asymmetric': c_left must be > 0");
    if (!(spec.c_right > 0.0))
      throw ConfigError("problem 'asymmetric': c_right must be > 0");
    const double L = spec.L == 0.0 ? std::max(spec.c_left, spec.c_right) : spec.L;
    return std::make_unique<ScalarProblem>(
        ScalarProblem::asymmetric_piecewise(spec.c_left, spec.c_right, spec.b, L));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("problem '" + spec.type + "': " + std::string(e.what()));
  }
}

Eigen::VectorXd build_x0(const std::string& spec, int dim) {
  if (dim < 1) throw ConfigError("x0: dimension must be >= 1");
  if (spec == "zeros") return Eigen::VectorXd::Zero(dim);
  if (spec == "ones") return Eigen::VectorXd::Ones(dim);
  if (spec.rfind("normal(", 0) == 0 && spec.back() == ')') {
    const std::string inner = spec.substr(7, spec.size() - 8);
    char* end = nullptr;
    const unsigned long long seed = std::strtoull(inner.c_str(), &end, 10);
    // strtoull silently wraps a leading minus, so reject it explicitly
    if (inner.empty() || inner[0] == '-' || end == inner.c_str() || *end != '\0')
      throw ConfigError("x0: bad seed in '" + spec + "'");
    Prng prng(seed);
    Eigen::VectorXd x(dim);
    prng.fill_normal(x.data(), static_cast<std::size_t>(dim));
    return x;
  }
  char* end = nullptr;
  const double v = std::strtod(spec.c_str(), &end);
  if (spec.empty() || end == spec.c_str() || *end != '\0' || !std::isfinite(v))
    throw ConfigError("x0: expected zeros, ones, normal(<seed>), or a number, got '" +
                      spec + "'");
  return Eigen::VectorXd::Constant(dim, v);
}

}  // namespace restart_agd

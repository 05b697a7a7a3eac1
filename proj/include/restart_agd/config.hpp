#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

#include "json.hpp"
#include "restart_agd/objectives.hpp"

namespace restart_agd {

// Invalid configuration; the message names the offending field.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Problem selector plus every tunable any problem type uses. Unused fields
// keep their defaults so a config round-trips through JSON losslessly.
struct ProblemSpec {
  std::string type = "quadratic";  // quadratic | huber | hinder-lubin |
                                   // modified-hinder-lubin | scalar-quad |
                                   // scalar-huber | asymmetric
  int n = 500;
  int m = 300;
  std::uint64_t seed = 0;
  double tau = 0.5;
  double delta = 1e-4;
  double alpha = 1e-4;
  double gamma = 1e-4;
  double c = 1.0;        // scalar-quad curvature
  double L = 0.0;        // scalar declared L; 0 means tightest valid choice
  double center = 0.0;   // scalar-huber center
  double c_left = 1.0;   // asymmetric curvatures and breakpoint
  double c_right = 1.0;
  double b = 0.0;
};

struct ExperimentConfig {
  ProblemSpec problem;
  std::string policy = "grad-next";
  std::string schedule = "linear";
  int max_iters = 5000;
  double grad_tol = 0.0;
  std::string x0 = "ones";  // zeros | ones | normal(seed) | numeric constant
  std::string out_dir;
  std::string csv_path;
  std::string json_path;
  std::string svg_path;
};

// Flat JSON form: problem fields and run fields share one object, with the
// problem type under the key "problem".
nlohmann::ordered_json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const nlohmann::ordered_json& j);
ExperimentConfig load_config(const std::string& path);

std::unique_ptr<Objective> build_problem(const ProblemSpec& spec);

// x0 spec grammar: "zeros", "ones", "normal(<seed>)", or a numeric constant
// applied to every coordinate.
Eigen::VectorXd build_x0(const std::string& spec, int dim);

}  // namespace restart_agd

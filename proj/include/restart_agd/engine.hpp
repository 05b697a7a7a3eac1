#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "restart_agd/objectives.hpp"
#include "restart_agd/policies.hpp"

namespace restart_agd {

enum class ScheduleVariant { Recursive, Linear };

std::string schedule_name(ScheduleVariant v);
ScheduleVariant schedule_from_name(const std::string& name);

/// Momentum sequence t_k with t_0 = 1. The recursive variant advances by
/// t_{k+1} = (1 + sqrt(1 + 4 t_k^2))/2; the linear variant is t_k = (k+2)/2.
/// Indexing is local to the current segment: reset() returns to t_0 = 1.
class MomentumSchedule {
 public:
  explicit MomentumSchedule(ScheduleVariant variant) : variant_(variant) {}

  ScheduleVariant variant() const { return variant_; }
  int index() const { return index_; }
  double t() const { return t_; }

  /// Advances the index and returns the new t_{k+1}.
  double advance();

  void reset() {
    index_ = 0;
    t_ = 1.0;
  }

 private:
  ScheduleVariant variant_;
  int index_ = 0;
  double t_ = 1.0;
};

/// Mutable per-run state; confined to a single solver run.
struct SolverState {
  int k = 0;
  Eigen::VectorXd x_prev;
  Eigen::VectorXd x_curr;
  Eigen::VectorXd y_curr;
  MomentumSchedule schedule;
  int steps_since_restart = 0;
};

SolverState make_solver_state(const Eigen::VectorXd& x0, ScheduleVariant variant);

enum class Termination { MaxIters, GradTol, StationaryExact };

std::string termination_name(Termination t);

/// One recorded iteration. t_value is the schedule value t_k in effect at
/// iteration k (pre-reset when a restart fires at k).
struct TraceRecord {
  int k = 0;
  double f_value = 0.0;
  std::optional<double> gap;            // f(x_k) - f*, when f* is known
  double grad_norm_y = 0.0;             // ||grad f(y_k)||
  bool restarted = false;               // the restart condition fired at k
  double t_value = 1.0;
  std::optional<Eigen::VectorXd> x;     // snapshot; always stored when dim == 1
  std::optional<Eigen::VectorXd> discarded_x;  // keep-prev restarts: dropped T(y_k)
};

struct RunTrace {
  std::vector<TraceRecord> records;
  std::vector<int> restart_iterations;                // strictly increasing
  std::vector<std::vector<int>> coordinate_restarts;  // coordinate-wise runs only
  Termination termination = Termination::MaxIters;
  PolicyKind policy = PolicyKind::None;
  bool gb_resets_schedule = false;
  ScheduleVariant schedule = ScheduleVariant::Linear;
  double lipschitz = 0.0;
  Eigen::VectorXd x0;
  long long n_feval = 0;
  long long n_geval = 0;

  int last_k() const { return records.empty() ? -1 : records.back().k; }
};

struct RunOptions {
  bool record_snapshots = false;  // snapshots are always kept when dim == 1
  bool allow_nonseparable_coordinatewise = false;
#ifdef RESTART_AGD_MUTATE_MOMENTUM
  // Deliberately broken momentum numerator for falsifiability builds.
  double momentum_numerator_bias = 1.0;
#else
  double momentum_numerator_bias = 0.0;
#endif
};

/// Gradient step operator T = Id - (1/L) grad f.
Eigen::VectorXd t_step(const Objective& obj, const Eigen::VectorXd& y);

/// One classical AGD iteration in place: x_{k+1} = T(y_k), then
/// y_{k+1} = x_{k+1} + ((t_k - 1)/t_{k+1})(x_{k+1} - x_k) with the schedule
/// advanced between the two uses of t.
void agd_step(SolverState& state, const Objective& obj);

/// Full solver loop. Records every iteration (k = 0 through the final
/// iterate), delegates restart decisions to the policy, and terminates on
/// max_iters, on ||grad f(x_k)|| <= grad_tol (when grad_tol > 0), or, in one
/// dimension, as soon as f'(x_k) is exactly zero.
RunTrace run(const Objective& obj, const Eigen::VectorXd& x0, const RestartPolicy& policy,
             ScheduleVariant schedule, int max_iters, double grad_tol,
             const RunOptions& opts = {});

/// Per-coordinate Algorithm-1 driver for separable objectives: one shared
/// full gradient per iteration, with each coordinate holding its own momentum
/// schedule and restarting (keep-next) when its own scalar condition fires.
/// Uses the linear schedule. Non-separable objectives are rejected unless
/// opts.allow_nonseparable_coordinatewise is set (the heuristic mode used by
/// the coupled benchmark).
RunTrace run_coordinatewise(const Objective& obj, const Eigen::VectorXd& x0,
                            int max_iters, double grad_tol,
                            const RunOptions& opts = {});

}  // namespace restart_agd

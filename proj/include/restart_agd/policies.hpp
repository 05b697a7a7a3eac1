#pragma once

#include <Eigen/Dense>
#include <string>

namespace restart_agd {

struct SolverState;

enum class PolicyKind {
  None,
  FunctionValue,
  GradientKeepPrev,
  GradientKeepNext,
  GiselssonBoyd,
  CoordinatewiseKeepNext,
};

/// Restart rule selection. gb_resets_schedule only affects GiselssonBoyd: the
/// cited scheme keeps the momentum sequence growing across restarts, so the
/// default is false; true is offered for ablation.
struct RestartPolicy {
  PolicyKind kind = PolicyKind::None;
  bool gb_resets_schedule = false;
};

/// Function-value rule: restart when the objective strictly increased.
bool should_restart_function_value(double f_next, double f_curr);

/// Gradient rule: restart when <grad f(y_k), x_{k+1} - x_k> > 0 (strict;
/// an inner product of exactly zero does not restart).
bool should_restart_gradient(const Eigen::VectorXd& grad_at_y,
                             const Eigen::VectorXd& x_next,
                             const Eigen::VectorXd& x_curr);

/// Giselsson-Boyd rule: restart when
/// <y_{k-1} - x_k, x_{k+1} - (x_k + y_{k-1})/2> > 0.
bool should_restart_gb(const Eigen::VectorXd& y_prev, const Eigen::VectorXd& x_curr,
                       const Eigen::VectorXd& x_next);

/// Discards the fresh iterate: x stays at the pre-step point, y collapses
/// onto it, and the schedule returns to t = 1.
void apply_restart_keep_prev(SolverState& state, const Eigen::VectorXd& x_next);

/// Keeps the fresh iterate as the new anchor: x advances to x_next, y
/// collapses onto it, and the schedule returns to t = 1.
void apply_restart_keep_next(SolverState& state, const Eigen::VectorXd& x_next);

/// CLI names: none | fval | grad-prev | grad-next | gb | coord.
std::string policy_name(PolicyKind kind);
PolicyKind policy_from_name(const std::string& name);

}  // namespace restart_agd

#include "restart_agd/policies.hpp"

#include <cmath>
#include <stdexcept>

#include "restart_agd/engine.hpp"

namespace restart_agd {

bool should_restart_function_value(double f_next, double f_curr) {
  if (!std::isfinite(f_next) || !std::isfinite(f_curr))
    throw std::invalid_argument("should_restart_function_value: non-finite input");
  return f_next > f_curr;
}

bool should_restart_gradient(const Eigen::VectorXd& grad_at_y,
                             const Eigen::VectorXd& x_next,
                             const Eigen::VectorXd& x_curr) {
  if (grad_at_y.size() != x_next.size() || x_next.size() != x_curr.size())
    throw std::invalid_argument("should_restart_gradient: length mismatch");
  return grad_at_y.dot(x_next - x_curr) > 0.0;
}

bool should_restart_gb(const Eigen::VectorXd& y_prev, const Eigen::VectorXd& x_curr,
                       const Eigen::VectorXd& x_next) {
  if (y_prev.size() != x_curr.size() || x_curr.size() != x_next.size())
    throw std::invalid_argument("should_restart_gb: length mismatch");
  return (y_prev - x_curr).dot(x_next - 0.5 * (x_curr + y_prev)) > 0.0;
}

void apply_restart_keep_prev(SolverState& state, const Eigen::VectorXd& x_next) {
  if (x_next.size() != state.x_curr.size())
    throw std::invalid_argument("apply_restart_keep_prev: length mismatch");
  state.x_prev = state.x_curr;
  state.y_curr = state.x_curr;
  state.schedule.reset();
  state.steps_since_restart = 0;
  state.k += 1;
}

void apply_restart_keep_next(SolverState& state, const Eigen::VectorXd& x_next) {
  if (x_next.size() != state.x_curr.size())
    throw std::invalid_argument("apply_restart_keep_next: length mismatch");
  state.x_prev = state.x_curr;
  state.x_curr = x_next;
  state.y_curr = x_next;
  state.schedule.reset();
  state.steps_since_restart = 0;
  state.k += 1;
}

std::string policy_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::None: return "none";
    case PolicyKind::FunctionValue: return "fval";
    case PolicyKind::GradientKeepPrev: return "grad-prev";
    case PolicyKind::GradientKeepNext: return "grad-next";
    case PolicyKind::GiselssonBoyd: return "gb";
    case PolicyKind::CoordinatewiseKeepNext: return "coord";
  }
  throw std::logic_error("policy_name: unreachable");
}

PolicyKind policy_from_name(const std::string& name) {
  if (name == "none") return PolicyKind::None;
  if (name == "fval") return PolicyKind::FunctionValue;
  if (name == "grad-prev") return PolicyKind::GradientKeepPrev;
  if (name == "grad-next") return PolicyKind::GradientKeepNext;
  if (name == "gb") return PolicyKind::GiselssonBoyd;
  if (name == "coord") return PolicyKind::CoordinatewiseKeepNext;
  throw std::invalid_argument("unknown policy: " + name);
}

RunTrace run_coordinatewise(const Objective& obj, const Eigen::VectorXd& x0,
                            int max_iters, double grad_tol, const RunOptions& opts) {
  if (!obj.separable() && !opts.allow_nonseparable_coordinatewise)
    throw std::invalid_argument(
        "run_coordinatewise: objective is not separable; per-coordinate restarts "
        "are only exact for separable objectives");
  if (x0.size() != obj.dim())
    throw std::invalid_argument("run_coordinatewise: x0 dimension mismatch");
  if (max_iters < 1) throw std::invalid_argument("run_coordinatewise: max_iters must be >= 1");
  if (!(grad_tol >= 0.0) || !std::isfinite(grad_tol))
    throw std::invalid_argument("run_coordinatewise: grad_tol must be nonnegative");

  const int dim = obj.dim();
  const double L = obj.lipschitz();
  const bool snapshots = dim == 1 || opts.record_snapshots;
  const std::optional<double> fstar = obj.known_min_value();

  RunTrace trace;
  trace.policy = PolicyKind::CoordinatewiseKeepNext;
  trace.schedule = ScheduleVariant::Linear;
  trace.lipschitz = L;
  trace.x0 = x0;
  trace.records.reserve(static_cast<std::size_t>(max_iters) + 1);
  trace.coordinate_restarts.assign(static_cast<std::size_t>(dim), {});

  std::vector<MomentumSchedule> sched(static_cast<std::size_t>(dim),
                                      MomentumSchedule(ScheduleVariant::Linear));
  Eigen::VectorXd x = x0, y = x0, g_y(dim), g_x(dim), x_next(dim);
  double f_curr = obj.eval(x);
  ++trace.n_feval;

  for (int k = 0;; ++k) {
    obj.grad_into(y, g_y);
    ++trace.n_geval;

    TraceRecord rec;
    rec.k = k;
    rec.f_value = f_curr;
    if (fstar) rec.gap = f_curr - *fstar;
    rec.grad_norm_y = g_y.norm();
    rec.t_value = sched[0].t();
    if (snapshots) rec.x = x;

    bool stop = false;
    if (dim == 1 || grad_tol > 0.0) {
      obj.grad_into(x, g_x);
      ++trace.n_geval;
      if (dim == 1 && g_x(0) == 0.0) {
        trace.termination = Termination::StationaryExact;
        stop = true;
      } else if (grad_tol > 0.0 && g_x.norm() <= grad_tol) {
        trace.termination = Termination::GradTol;
        stop = true;
      }
    }
    if (!stop && k == max_iters) {
      trace.termination = Termination::MaxIters;
      stop = true;
    }
    if (stop) {
      trace.records.push_back(std::move(rec));
      break;
    }

    bool any_fired = false;
    for (int i = 0; i < dim; ++i) {
      const double xi_next = y(i) - g_y(i) / L;
      x_next(i) = xi_next;
      const bool fired = g_y(i) * (xi_next - x(i)) > 0.0;
      if (fired) {
        any_fired = true;
        trace.coordinate_restarts[static_cast<std::size_t>(i)].push_back(k);
        y(i) = xi_next;
        sched[static_cast<std::size_t>(i)].reset();
      } else {
        const double t_i = sched[static_cast<std::size_t>(i)].t();
        const double coef = (t_i - 1.0 + opts.momentum_numerator_bias) /
                            sched[static_cast<std::size_t>(i)].advance();
        y(i) = xi_next + coef * (xi_next - x(i));
      }
    }
    if (!x_next.allFinite()) throw NumericError("run_coordinatewise: non-finite iterate");

    rec.restarted = any_fired;
    trace.records.push_back(std::move(rec));
    if (any_fired) trace.restart_iterations.push_back(k);

    x = x_next;
    f_curr = obj.eval(x);
    ++trace.n_feval;
  }
  return trace;
}

}  // namespace restart_agd

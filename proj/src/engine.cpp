#include "restart_agd/engine.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace restart_agd {

std::string schedule_name(ScheduleVariant v) {
  return v == ScheduleVariant::Recursive ? "recursive" : "linear";
}

ScheduleVariant schedule_from_name(const std::string& name) {
  if (name == "recursive") return ScheduleVariant::Recursive;
  if (name == "linear") return ScheduleVariant::Linear;
  throw std::invalid_argument("unknown schedule: " + name);
}

std::string termination_name(Termination t) {
  switch (t) {
    case Termination::MaxIters: return "max_iters";
    case Termination::GradTol: return "grad_tol";
    case Termination::StationaryExact: return "stationary_exact";
  }
  throw std::logic_error("termination_name: unreachable");
}

double MomentumSchedule::advance() {
  index_ += 1;
  t_ = variant_ == ScheduleVariant::Recursive
           ? 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_ * t_))
           : 0.5 * static_cast<double>(index_ + 2);
  return t_;
}

SolverState make_solver_state(const Eigen::VectorXd& x0, ScheduleVariant variant) {
  if (x0.size() < 1) throw std::invalid_argument("make_solver_state: empty x0");
  if (!x0.allFinite()) throw std::invalid_argument("make_solver_state: non-finite x0");
  SolverState st{0, x0, x0, x0, MomentumSchedule(variant), 0};
  return st;
}

Eigen::VectorXd t_step(const Objective& obj, const Eigen::VectorXd& y) {
  Eigen::VectorXd g = obj.grad(y);
  Eigen::VectorXd out = y - g / obj.lipschitz();
  if (!out.allFinite()) throw NumericError("t_step produced a non-finite iterate");
  return out;
}

void agd_step(SolverState& state, const Objective& obj) {
  Eigen::VectorXd x_next = t_step(obj, state.y_curr);
  const double t_k = state.schedule.t();
  const double t_next = state.schedule.advance();
  const double coef = (t_k - 1.0) / t_next;
  state.x_prev = state.x_curr;
  state.y_curr = x_next + coef * (x_next - state.x_prev);
  state.x_curr = std::move(x_next);
  state.k += 1;
  state.steps_since_restart += 1;
}

RunTrace run(const Objective& obj, const Eigen::VectorXd& x0, const RestartPolicy& policy,
             ScheduleVariant schedule, int max_iters, double grad_tol,
             const RunOptions& opts) {
  if (policy.kind == PolicyKind::CoordinatewiseKeepNext) {
    if (schedule != ScheduleVariant::Linear)
      throw std::invalid_argument("run: the coordinate-wise policy uses the linear schedule");
    return run_coordinatewise(obj, x0, max_iters, grad_tol, opts);
  }
  if (x0.size() != obj.dim())
    throw std::invalid_argument("run: x0 dimension does not match the objective");
  if (max_iters < 1) throw std::invalid_argument("run: max_iters must be >= 1");
  if (!(grad_tol >= 0.0) || !std::isfinite(grad_tol))
    throw std::invalid_argument("run: grad_tol must be nonnegative and finite");

  const int dim = obj.dim();
  const double L = obj.lipschitz();
  const bool keep_prev = policy.kind == PolicyKind::FunctionValue ||
                         policy.kind == PolicyKind::GradientKeepPrev;
  const bool snapshots = dim == 1 || opts.record_snapshots;
  const std::optional<double> fstar = obj.known_min_value();

  RunTrace trace;
  trace.policy = policy.kind;
  trace.gb_resets_schedule = policy.gb_resets_schedule;
  trace.schedule = schedule;
  trace.lipschitz = L;
  trace.x0 = x0;
  trace.records.reserve(static_cast<std::size_t>(max_iters) + 1);

  SolverState st = make_solver_state(x0, schedule);
  Eigen::VectorXd g_y(dim), g_x(dim), x_next(dim), y_prev(dim);
  bool have_y_prev = false;
  double f_curr = obj.eval(st.x_curr);
  ++trace.n_feval;

  for (int k = 0;; ++k) {
    obj.grad_into(st.y_curr, g_y);
    ++trace.n_geval;
    const double gy_norm = g_y.norm();
    const double t_k = st.schedule.t();

    TraceRecord rec;
    rec.k = k;
    rec.f_value = f_curr;
    if (fstar) rec.gap = f_curr - *fstar;
    rec.grad_norm_y = gy_norm;
    rec.t_value = t_k;
    if (snapshots) rec.x = st.x_curr;

    // Termination tests are applied to the accepted iterate x_k.
    bool stop = false;
    if (dim == 1 || grad_tol > 0.0) {
      obj.grad_into(st.x_curr, g_x);
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

    x_next = st.y_curr - g_y / L;
    if (!x_next.allFinite()) throw NumericError("run: non-finite iterate");
    const double f_next = obj.eval(x_next);
    ++trace.n_feval;

    bool fired = false;
    switch (policy.kind) {
      case PolicyKind::None:
        break;
      case PolicyKind::FunctionValue:
        fired = should_restart_function_value(f_next, f_curr);
        break;
      case PolicyKind::GradientKeepPrev:
      case PolicyKind::GradientKeepNext:
        fired = should_restart_gradient(g_y, x_next, st.x_curr);
        break;
      case PolicyKind::GiselssonBoyd:
        fired = have_y_prev && should_restart_gb(y_prev, st.x_curr, x_next);
        break;
      case PolicyKind::CoordinatewiseKeepNext:
        throw std::logic_error("run: coordinate-wise policy handled above");
    }

    rec.restarted = fired;
    if (fired && keep_prev) rec.discarded_x = x_next;
    trace.records.push_back(std::move(rec));
    if (fired) trace.restart_iterations.push_back(k);

    if (policy.kind == PolicyKind::GiselssonBoyd) {
      y_prev = st.y_curr;
      have_y_prev = true;
    }

    if (fired) {
      if (keep_prev) {
        apply_restart_keep_prev(st, x_next);
      } else if (policy.kind == PolicyKind::GiselssonBoyd && !policy.gb_resets_schedule) {
        // Kill the extrapolation direction but let the t sequence keep growing.
        st.x_prev = st.x_curr;
        st.x_curr = x_next;
        st.schedule.advance();
        st.y_curr = st.x_curr;
        st.steps_since_restart = 0;
        f_curr = f_next;
      } else {
        apply_restart_keep_next(st, x_next);
        f_curr = f_next;
      }
    } else {
      const double coef =
          (t_k - 1.0 + opts.momentum_numerator_bias) / st.schedule.advance();
      st.x_prev = st.x_curr;
      st.y_curr = x_next + coef * (x_next - st.x_prev);
      st.x_curr = x_next;
      st.steps_since_restart += 1;
      f_curr = f_next;
    }
    st.k = k + 1;
  }
  return trace;
}

}  // namespace restart_agd

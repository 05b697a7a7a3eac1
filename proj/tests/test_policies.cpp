#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "restart_agd/engine.hpp"
#include "restart_agd/objectives.hpp"
#include "restart_agd/prng.hpp"

using namespace restart_agd;

namespace {

Eigen::VectorXd vec1(double v) {
  Eigen::VectorXd x(1);
  x(0) = v;
  return x;
}

// Separable two-coordinate quadratic with mismatched curvatures (both below
// L, so neither coordinate's gradient step is exact), making the two
// coordinates cross their minimizers at different iterations.
class TwoScaleQuad final : public Objective {
 public:
  TwoScaleQuad() : Objective(2, 50.0, true) {
    set_minimizer(Eigen::VectorXd::Zero(2), false);
  }

 protected:
  double eval_impl(const Eigen::VectorXd& x) const override {
    return 0.5 * x(0) * x(0) + 5.0 * x(1) * x(1);
  }
  void grad_impl(const Eigen::VectorXd& x, Eigen::VectorXd& out) const override {
    out(0) = x(0);
    out(1) = 10.0 * x(1);
  }
};

}  // namespace

TEST_CASE("function-value rule is strict") {
  CHECK_FALSE(should_restart_function_value(1.0, 2.0));
  CHECK(should_restart_function_value(2.0, 1.0));
  CHECK_FALSE(should_restart_function_value(1.0, 1.0));
}

TEST_CASE("gradient rule: strict positivity of the inner product") {
  CHECK(should_restart_gradient(vec1(1.0), vec1(2.0), vec1(1.0)));
  CHECK_FALSE(should_restart_gradient(vec1(-1.0), vec1(2.0), vec1(1.0)));
  CHECK_FALSE(should_restart_gradient(vec1(0.0), vec1(2.0), vec1(1.0)));
  Eigen::VectorXd g(2), xn(2), xc(2);
  g << 1.0, -1.0;
  xn << 2.0, 1.0;
  xc << 1.0, 0.0;
  CHECK_FALSE(should_restart_gradient(g, xn, xc));  // product exactly zero
}

TEST_CASE("giselsson-boyd rule") {
  CHECK_FALSE(should_restart_gb(vec1(1.0), vec1(1.0), vec1(0.0)));  // y_prev = x_curr
  CHECK(should_restart_gb(vec1(0.0), vec1(1.0), vec1(0.0)));
  CHECK_FALSE(should_restart_gb(vec1(0.0), vec1(1.0), vec1(1.0)));
}

TEST_CASE("keep-prev restart discards the fresh iterate") {
  SolverState st = make_solver_state(vec1(1.0), ScheduleVariant::Linear);
  for (int i = 0; i < 7; ++i) st.schedule.advance();
  REQUIRE(st.schedule.index() == 7);
  st.steps_since_restart = 7;
  apply_restart_keep_prev(st, vec1(0.5));
  CHECK(st.x_curr(0) == 1.0);
  CHECK(st.y_curr(0) == 1.0);
  CHECK(st.schedule.index() == 0);
  CHECK(st.schedule.t() == 1.0);
  CHECK(st.steps_since_restart == 0);
}

TEST_CASE("keep-next restart anchors at the fresh iterate") {
  SolverState st = make_solver_state(vec1(1.0), ScheduleVariant::Linear);
  for (int i = 0; i < 3; ++i) st.schedule.advance();
  st.steps_since_restart = 3;
  apply_restart_keep_next(st, vec1(0.5));
  CHECK(st.x_prev(0) == 1.0);
  CHECK(st.x_curr(0) == 0.5);
  CHECK(st.y_curr(0) == 0.5);
  CHECK(st.schedule.t() == 1.0);
  CHECK(st.steps_since_restart == 0);
  // next gradient step from the restart anchor
  const auto f = ScalarProblem::scaled_quadratic(1.0, 10.0);
  CHECK(t_step(f, st.y_curr)(0) == doctest::Approx(0.45).epsilon(1e-15));
}

TEST_CASE("one-step descent after keep-next restarts on scalar runs") {
  const auto f = ScalarProblem::scaled_quadratic(1.0, 10.0);
  const RunTrace tr = run(f, vec1(1.0), RestartPolicy{PolicyKind::GradientKeepNext},
                          ScheduleVariant::Linear, 300, 0.0);
  REQUIRE_FALSE(tr.restart_iterations.empty());
  for (int r : tr.restart_iterations) {
    if (r + 2 > tr.last_k()) break;
    CHECK(tr.records[r + 2].f_value <= tr.records[r + 1].f_value + 1e-15);
  }
}

TEST_CASE("keep-prev and keep-next fire first at the same iteration") {
  const auto f = ScalarProblem::scaled_quadratic(1.0, 10.0);
  const RunTrace prev = run(f, vec1(1.0), RestartPolicy{PolicyKind::GradientKeepPrev},
                            ScheduleVariant::Linear, 100, 0.0);
  const RunTrace next = run(f, vec1(1.0), RestartPolicy{PolicyKind::GradientKeepNext},
                            ScheduleVariant::Linear, 100, 0.0);
  REQUIRE_FALSE(prev.restart_iterations.empty());
  REQUIRE_FALSE(next.restart_iterations.empty());
  CHECK(prev.restart_iterations.front() == next.restart_iterations.front());
}

TEST_CASE("keep-prev restart logs the discarded iterate") {
  const auto f = ScalarProblem::scaled_quadratic(1.0, 10.0);
  const RunTrace tr = run(f, vec1(1.0), RestartPolicy{PolicyKind::GradientKeepPrev},
                          ScheduleVariant::Linear, 100, 0.0);
  REQUIRE_FALSE(tr.restart_iterations.empty());
  const int r = tr.restart_iterations.front();
  REQUIRE(tr.records[r].restarted);
  CHECK(tr.records[r].discarded_x.has_value());
  // the kept iterate equals the pre-step point
  CHECK(tr.records[r + 1].x.value()(0) == tr.records[r].x.value()(0));
}

TEST_CASE("giselsson-boyd default never resets the schedule") {
  const auto f = ScalarProblem::scaled_quadratic(1.0, 10.0);
  RestartPolicy gb{PolicyKind::GiselssonBoyd, false};
  const RunTrace tr =
      run(f, vec1(1.0), gb, ScheduleVariant::Linear, 200, 0.0);
  // t_k = (k+2)/2 at every record exactly as if no restart ever happened
  for (const auto& rec : tr.records)
    CHECK(rec.t_value == doctest::Approx((rec.k + 2) / 2.0).epsilon(1e-15));

  RestartPolicy gb_reset{PolicyKind::GiselssonBoyd, true};
  const RunTrace tr2 =
      run(f, vec1(1.0), gb_reset, ScheduleVariant::Linear, 200, 0.0);
  if (!tr2.restart_iterations.empty()) {
    const int r = tr2.restart_iterations.front();
    if (r + 1 <= tr2.last_k()) CHECK(tr2.records[r + 1].t_value == 1.0);
  }
}

TEST_CASE("policy names round-trip") {
  const PolicyKind kinds[] = {PolicyKind::None,           PolicyKind::FunctionValue,
                              PolicyKind::GradientKeepPrev, PolicyKind::GradientKeepNext,
                              PolicyKind::GiselssonBoyd,  PolicyKind::CoordinatewiseKeepNext};
  const char* names[] = {"none", "fval", "grad-prev", "grad-next", "gb", "coord"};
  for (int i = 0; i < 6; ++i) {
    CHECK(policy_name(kinds[i]) == names[i]);
    CHECK(policy_from_name(names[i]) == kinds[i]);
  }
  CHECK_THROWS_AS(policy_from_name("bogus"), std::invalid_argument);
}

TEST_CASE("coordinate-wise run collapses to grad-next in one dimension") {
  const auto f = ScalarProblem::scaled_quadratic(1.0, 10.0);
  const RunTrace mono = run(f, vec1(1.0), RestartPolicy{PolicyKind::GradientKeepNext},
                            ScheduleVariant::Linear, 400, 0.0);
  const RunTrace coord = run_coordinatewise(f, vec1(1.0), 400, 0.0);
  REQUIRE(mono.records.size() == coord.records.size());
  for (std::size_t i = 0; i < mono.records.size(); ++i) {
    CHECK(mono.records[i].f_value == coord.records[i].f_value);
    CHECK(mono.records[i].x.value()(0) == coord.records[i].x.value()(0));
    CHECK(mono.records[i].restarted == coord.records[i].restarted);
    CHECK(mono.records[i].t_value == coord.records[i].t_value);
  }
  CHECK(mono.restart_iterations == coord.restart_iterations);
  CHECK(mono.n_feval == coord.n_feval);
  CHECK(mono.n_geval == coord.n_geval);
  REQUIRE(coord.coordinate_restarts.size() == 1);
  CHECK(coord.coordinate_restarts[0] == coord.restart_iterations);
}

TEST_CASE("mismatched curvatures desynchronize coordinate restarts") {
  const TwoScaleQuad f;
  const RunTrace tr = run_coordinatewise(f, Eigen::VectorXd::Ones(2), 300, 0.0);
  REQUIRE(tr.coordinate_restarts.size() == 2);
  CHECK_FALSE(tr.coordinate_restarts[0].empty());
  CHECK_FALSE(tr.coordinate_restarts[1].empty());
  CHECK(tr.coordinate_restarts[0] != tr.coordinate_restarts[1]);
  // union of per-coordinate events equals the recorded restart iterations
  std::vector<int> merged;
  for (const auto& lst : tr.coordinate_restarts)
    merged.insert(merged.end(), lst.begin(), lst.end());
  std::sort(merged.begin(), merged.end());
  merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
  CHECK(merged == tr.restart_iterations);
}

TEST_CASE("coordinate-wise beats monolithic grad-next on separable hinder-lubin") {
  const auto hl = make_hinder_lubin(100, 1e-4, 1e-4);
  const Eigen::VectorXd x0 = Eigen::VectorXd::Constant(100, -1.0);
  const RunTrace coord = run_coordinatewise(hl, x0, 4000, 0.0);
  const RunTrace mono = run(hl, x0, RestartPolicy{PolicyKind::GradientKeepNext},
                            ScheduleVariant::Linear, 4000, 0.0);
  const auto hit = [](const RunTrace& tr) {
    for (const auto& rec : tr.records)
      if (rec.gap && *rec.gap <= 1e-8) return rec.k;
    return 1 << 30;
  };
  CHECK(hit(coord) < hit(mono));
}

TEST_CASE("coordinate-wise rejects non-separable objectives unless opted in") {
  Prng prng(2);
  const auto quad = make_quadratic(2, prng);
  CHECK_THROWS_AS(run_coordinatewise(quad, Eigen::VectorXd::Ones(2), 10, 0.0),
                  std::invalid_argument);
  RunOptions opts;
  opts.allow_nonseparable_coordinatewise = true;
  const RunTrace tr = run_coordinatewise(quad, Eigen::VectorXd::Ones(2), 10, 0.0, opts);
  CHECK(tr.records.size() >= 2);
}

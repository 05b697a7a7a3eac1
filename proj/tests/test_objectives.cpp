#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include <Eigen/Dense>

#include "restart_agd/objectives.hpp"
#include "restart_agd/prng.hpp"

using namespace restart_agd;

namespace {

Eigen::VectorXd vec1(double v) {
  Eigen::VectorXd x(1);
  x(0) = v;
  return x;
}

}  // namespace

TEST_CASE("huber psi piecewise values and continuity") {
  CHECK(huber_psi(0.25, 0.5) == doctest::Approx(0.0625).epsilon(1e-15));
  CHECK(huber_psi(1.0, 0.5) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(huber_psi(-1.0, 0.5) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(huber_psi(0.5, 0.5) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(huber_psi(std::nextafter(0.5, 1.0), 0.5) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(huber_psi_prime(0.3, 0.5) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(huber_psi_prime(-2.0, 0.5) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(huber_psi_prime(2.0, 0.5) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("smoothed hinge h values, tangent branch, continuity") {
  CHECK(hinder_lubin_h(1.0, 1e-4) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(hinder_lubin_h(-1.0, 0.5) == doctest::Approx(0.375).epsilon(1e-15));
  CHECK(hinder_lubin_h_prime(1.0, 1e-4) == doctest::Approx(1.0).epsilon(1e-15));
  // tangent-line slope below the breakpoint: h'(z) = -delta
  CHECK(hinder_lubin_h_prime(-1.0, 1e-4) == doctest::Approx(-1e-4).epsilon(1e-15));
  const double d = 0.25;
  CHECK(hinder_lubin_h(-d, d) ==
        doctest::Approx(hinder_lubin_h(std::nextafter(-d, -1.0), d)).epsilon(1e-12));
  CHECK(hinder_lubin_h_prime(-d, d) ==
        doctest::Approx(hinder_lubin_h_prime(std::nextafter(-d, -1.0), d)).epsilon(1e-9));
}

TEST_CASE("hinder-lubin objective: minimizer, example value, smoothness constant") {
  const auto hl100 = make_hinder_lubin(100, 1e-4, 1e-4);
  CHECK(hl100.eval(Eigen::VectorXd::Zero(100)) == 0.0);
  CHECK(hl100.grad(Eigen::VectorXd::Zero(100)).norm() == 0.0);
  CHECK(hl100.lipschitz() == doctest::Approx(100.0 + 1e-4).epsilon(1e-15));
  CHECK(hl100.separable());
  CHECK(hl100.known_min_value().value() == 0.0);
  CHECK(hl100.known_minimizer().value().norm() == 0.0);

  const auto hl2 = make_hinder_lubin(2, 0.5, 0.0);
  Eigen::VectorXd x(2);
  x << -1.0, -1.0;
  CHECK(hl2.eval(x) == doctest::Approx(1.125).epsilon(1e-15));

  const auto hl3 = make_hinder_lubin(3, 1e-4, 1e-4);
  CHECK(hl3.eval(Eigen::VectorXd::Zero(3)) == 0.0);
  CHECK(hl3.grad(Eigen::VectorXd::Zero(3)).norm() == 0.0);
}

TEST_CASE("modified hinder-lubin: value at zero, modifier gradient, L") {
  Prng prng(5);
  const auto mhl = make_modified_hinder_lubin(100, 110, 1e-4, 1e-4, 1e-4, prng);
  CHECK_FALSE(mhl.separable());
  CHECK(mhl.eval(Eigen::VectorXd::Zero(100)) == doctest::Approx(0.011).epsilon(1e-12));
  REQUIRE(mhl.modifier().has_value());
  const auto& mod = *mhl.modifier();
  // phi'(0) = 1, so the gradient at zero is gamma * sum_i a_i
  const Eigen::VectorXd expected =
      mod.gamma * (mod.A.transpose() * Eigen::VectorXd::Ones(mod.A.rows()));
  const Eigen::VectorXd g0 = mhl.grad(Eigen::VectorXd::Zero(100));
  CHECK((g0 - expected).norm() <= 1e-12 * (1.0 + expected.norm()));
  CHECK(mhl.lipschitz() ==
        doctest::Approx(100.0 + 1e-4 + mod.gamma * mod.A.squaredNorm()).epsilon(1e-12));
}

TEST_CASE("make_quadratic structure at small sizes") {
  SUBCASE("n = 1 gives L in [50, 52]") {
    Prng prng(3);
    const auto p = make_quadratic(1, prng);
    CHECK(p.lipschitz() >= 50.0);
    CHECK(p.lipschitz() <= 52.0);
  }
  SUBCASE("n = 2 seed 42: symmetric, eigenvalues at least 48") {
    Prng prng(42);
    const auto p = make_quadratic(2, prng);
    CHECK(p.Q()(0, 1) == p.Q()(1, 0));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(p.Q());
    CHECK(es.eigenvalues().minCoeff() >= 48.0);
  }
}

TEST_CASE("make_quadratic n=2 seed=1 matches the frozen reference instance") {
  Prng prng(1);
  const auto p = make_quadratic(2, prng);
  CHECK(p.Q()(0, 0) == 51.133123150344559);
  CHECK(p.Q()(0, 1) == 1.7167845108494975);
  CHECK(p.Q()(1, 0) == 1.7167845108494975);
  CHECK(p.Q()(1, 1) == 50.888718434111546);
  CHECK(p.q()(0) == 0.10309095168573976);
  CHECK(p.q()(1) == -1.2696620408584178);
  CHECK(p.lipschitz() == doctest::Approx(52.732049048056126).epsilon(1e-12));
  // power iteration agrees with a dense eigensolver
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(p.Q());
  CHECK(p.lipschitz() == doctest::Approx(es.eigenvalues().maxCoeff()).epsilon(1e-10));
}

TEST_CASE("quadratic gradient and minimizer") {
  Prng prng(6);
  const auto p = make_quadratic(8, prng);
  Prng pt(60);
  Eigen::VectorXd x(8);
  pt.fill_normal(x.data(), 8);
  const Eigen::VectorXd g = p.grad(x);
  const Eigen::VectorXd expected = p.Q() * x - p.q();
  CHECK((g - expected).norm() <= 1e-12 * (1.0 + expected.norm()));
  const Eigen::VectorXd xs = p.known_minimizer().value();
  CHECK(p.grad(xs).norm() <= 1e-9 * (1.0 + p.q().norm()));
  CHECK(p.eval(xs) == doctest::Approx(p.known_min_value().value()).epsilon(1e-12));
}

TEST_CASE("make_quadratic n=500 seed=7 is positive definite") {
  Prng prng(7);
  const auto p = make_quadratic(500, prng);  // construction runs the factorization
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(p.Q());
  CHECK(es.eigenvalues().minCoeff() > 0.0);
  CHECK(p.lipschitz() == doctest::Approx(es.eigenvalues().maxCoeff()).epsilon(1e-10));
}

TEST_CASE("huber instance m=1 n=1: closed form") {
  Eigen::MatrixXd A(1, 1);
  A << 1.0;
  Eigen::VectorXd y(1);
  y << 0.0;
  const HuberProblem p(A, y, 0.5);
  CHECK(p.lipschitz() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p.eval(vec1(2.0)) == doctest::Approx(0.5 * huber_psi(2.0, 0.5)).epsilon(1e-15));
  CHECK(std::abs(p.known_minimizer().value()(0)) <= 1e-8);
  CHECK(p.minimizer_is_numerical());
}

TEST_CASE("huber m=300 n=50 seed=3: L matches the dense oracle and sanity window") {
  Prng prng(3);
  const auto p = make_huber(300, 50, 0.5, prng);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(p.A().transpose() * p.A());
  CHECK(p.lipschitz() == doctest::Approx(es.eigenvalues().maxCoeff()).epsilon(1e-10));
  const double lo = 50.0 * 0.5 * std::pow(std::sqrt(300.0) / std::sqrt(50.0) - 1.0, 2);
  CHECK(p.lipschitz() >= lo);
  CHECK(p.lipschitz() <= 4.0 * 300.0);
  // reference minimizer quality
  CHECK(p.grad(p.known_minimizer().value()).norm() <= 1e-10);
  CHECK(p.minimizer_is_numerical());
  CHECK(p.minimizer_grad_residual() <= 1e-10);
}

TEST_CASE("huber collapses to least squares for huge tau") {
  Prng prng(8);
  const auto p = make_huber(20, 5, 1e6, prng);
  Prng pt(80);
  Eigen::VectorXd x(5);
  pt.fill_normal(x.data(), 5);
  const Eigen::VectorXd r = p.A() * x - p.y();
  REQUIRE(r.lpNorm<Eigen::Infinity>() < 1e6);
  CHECK(p.eval(x) == doctest::Approx(0.5 * r.squaredNorm()).epsilon(1e-12));
}

TEST_CASE("scalar problems: values, minimizers, declared L validation") {
  const auto sq = ScalarProblem::scaled_quadratic(1.0, 10.0);
  CHECK(sq.eval(vec1(2.0)) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(sq.grad(vec1(2.0))(0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(sq.known_minimizer().value()(0) == 0.0);
  CHECK(sq.lipschitz() == 10.0);
  CHECK(sq.separable());
  CHECK_THROWS_AS(ScalarProblem::scaled_quadratic(2.0, 1.0), std::invalid_argument);

  const auto sh = ScalarProblem::scalar_huber(0.5, 0.3, 2.0);
  CHECK(sh.eval(vec1(0.3)) == 0.0);
  CHECK(sh.eval(vec1(0.55)) == doctest::Approx(0.5 * 0.0625).epsilon(1e-14));
  CHECK(sh.known_minimizer().value()(0) == 0.3);
  CHECK_THROWS_AS(ScalarProblem::scalar_huber(0.5, 0.0, 0.5), std::invalid_argument);

  const auto ap = ScalarProblem::asymmetric_piecewise(3.0, 0.7, -0.25, 5.0);
  CHECK(ap.eval(vec1(-0.25)) == 0.0);
  CHECK(ap.grad(vec1(-0.25))(0) == 0.0);
  CHECK(ap.eval(vec1(-1.25)) == doctest::Approx(1.5).epsilon(1e-14));   // left: (3/2)*1
  CHECK(ap.eval(vec1(0.75)) == doctest::Approx(0.35).epsilon(1e-14));   // right: (0.7/2)*1
  CHECK(ap.known_minimizer().value()(0) == -0.25);
  CHECK_THROWS_AS(ScalarProblem::asymmetric_piecewise(3.0, 0.7, 0.0, 2.0),
                  std::invalid_argument);
}

TEST_CASE("argument validation: dimension mismatch and non-finite input") {
  const auto sq = ScalarProblem::scaled_quadratic(1.0, 10.0);
  Eigen::VectorXd bad(2);
  bad << 1.0, 2.0;
  CHECK_THROWS_AS(sq.eval(bad), std::invalid_argument);
  CHECK_THROWS_AS(sq.grad(bad), std::invalid_argument);
  CHECK_THROWS_AS(sq.eval(vec1(std::numeric_limits<double>::quiet_NaN())),
                  std::invalid_argument);
  CHECK_THROWS_AS(sq.eval(vec1(std::numeric_limits<double>::infinity())),
                  std::invalid_argument);
}

TEST_CASE("grad_check accuracy per problem family") {
  SUBCASE("quadratic n=5 seed=1") {
    Prng prng(1);
    const auto p = make_quadratic(5, prng);
    Prng pt(10);
    Eigen::VectorXd x(5);
    pt.fill_normal(x.data(), 5);
    CHECK(grad_check(p, x) <= 1e-6);
  }
  SUBCASE("hinder-lubin in the smooth region") {
    const auto p = make_hinder_lubin(6, 1e-4, 1e-4);
    Eigen::VectorXd x = Eigen::VectorXd::Ones(6) * 0.7;
    CHECK(grad_check(p, x) <= 1e-6);
  }
  SUBCASE("scalar quadratic is exact to rounding") {
    const auto p = ScalarProblem::scaled_quadratic(1.0, 10.0);
    CHECK(grad_check(p, vec1(1.7)) <= 1e-9);
  }
}

TEST_CASE("gradient Lipschitz validity over random pairs") {
  Prng gen(21);
  const auto quad = make_quadratic(30, gen);
  const auto hl = make_hinder_lubin(20, 1e-2, 1e-2);
  Prng ph(22);
  const auto hub = make_huber(40, 10, 0.5, ph);
  Prng pm(23);
  const auto mhl = make_modified_hinder_lubin(10, 12, 1e-3, 1e-3, 1e-3, pm);
  const Objective* objs[] = {&quad, &hl, &hub, &mhl};
  Prng pts(24);
  for (const Objective* obj : objs) {
    const int n = obj->dim();
    Eigen::VectorXd x(n), y(n);
    for (int s = 0; s < 1000; ++s) {
      pts.fill_normal(x.data(), static_cast<std::size_t>(n));
      pts.fill_normal(y.data(), static_cast<std::size_t>(n));
      const double lhs = (obj->grad(x) - obj->grad(y)).norm();
      const double rhs = obj->lipschitz() * (x - y).norm() * (1.0 + 1e-10);
      CHECK(lhs <= rhs);
      if (lhs > rhs) return;  // don't spam a million failures
    }
  }
}

TEST_CASE("separable gradients are coordinatewise") {
  const auto hl = make_hinder_lubin(7, 1e-3, 1e-3);
  Prng pt(31);
  Eigen::VectorXd x(7);
  pt.fill_normal(x.data(), 7);
  const Eigen::VectorXd g = hl.grad(x);
  for (int j = 0; j < 7; ++j) {
    Eigen::VectorXd xp = x;
    xp(j) += 0.37;
    const Eigen::VectorXd gp = hl.grad(xp);
    for (int i = 0; i < 7; ++i) {
      if (i == j) continue;
      CHECK(gp(i) == g(i));
    }
  }
}

TEST_CASE("known minimizer is optimal against random probes") {
  Prng gen(33);
  const auto quad = make_quadratic(12, gen);
  Prng ph(34);
  const auto hub = make_huber(25, 6, 0.5, ph);
  const auto hl = make_hinder_lubin(9, 1e-3, 1e-3);
  const Objective* objs[] = {&quad, &hub, &hl};
  Prng pts(35);
  for (const Objective* obj : objs) {
    const double fstar = obj->known_min_value().value();
    Eigen::VectorXd x(obj->dim());
    for (int s = 0; s < 100; ++s) {
      pts.fill_normal(x.data(), static_cast<std::size_t>(obj->dim()));
      CHECK(obj->eval(x) >= fstar - 1e-9 * (1.0 + std::abs(fstar)));
    }
  }
}

TEST_CASE("convexity spot-check: first-order lower bound") {
  Prng ph(41);
  const auto hub = make_huber(30, 8, 0.5, ph);
  Prng pts(42);
  Eigen::VectorXd x(8), y(8);
  for (int s = 0; s < 200; ++s) {
    pts.fill_normal(x.data(), 8);
    pts.fill_normal(y.data(), 8);
    const double lhs = hub.eval(y);
    const double rhs = hub.eval(x) + hub.grad(x).dot(y - x);
    CHECK(lhs >= rhs - 1e-9 * (1.0 + std::abs(lhs)));
  }
}

#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <stdexcept>

#include "restart_agd/prng.hpp"

namespace restart_agd {

/// Random problem generation produced an unusable instance (e.g. a Cholesky
/// breakdown while solving for the reference minimizer).
struct GenerationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An evaluation produced a non-finite value mid-solve.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Convex L-smooth objective with an optional reference minimizer.
///
/// Instances are immutable after construction, so a single objective may be
/// shared by concurrent solver runs without synchronization.
class Objective {
 public:
  virtual ~Objective() = default;

  /// f(x); throws NumericError if the result is not finite.
  double eval(const Eigen::VectorXd& x) const;

  /// Gradient of f at x; throws NumericError on non-finite entries.
  Eigen::VectorXd grad(const Eigen::VectorXd& x) const;
  void grad_into(const Eigen::VectorXd& x, Eigen::VectorXd& out) const;

  int dim() const { return dim_; }

  /// Smoothness constant used as the solver step size 1/L.
  double lipschitz() const { return lipschitz_; }

  /// Whether f is a sum of per-coordinate terms (coordinate-wise restarts
  /// are exact only in that case).
  bool separable() const { return separable_; }

  const std::optional<Eigen::VectorXd>& known_minimizer() const { return minimizer_; }
  std::optional<double> known_min_value() const { return min_value_; }

  /// True when the minimizer came from a numerical reference solve rather
  /// than a closed form; certification widens tolerances by the residual.
  bool minimizer_is_numerical() const { return minimizer_numerical_; }

  /// Gradient norm at the stored minimizer (0 for closed forms).
  double minimizer_grad_residual() const { return minimizer_residual_; }

 protected:
  Objective(int dim, double lipschitz, bool separable);

  /// Records the reference minimizer; validates grad residual <= 1e-8*(1+L).
  void set_minimizer(Eigen::VectorXd xstar, bool numerical);

  virtual double eval_impl(const Eigen::VectorXd& x) const = 0;
  virtual void grad_impl(const Eigen::VectorXd& x, Eigen::VectorXd& out) const = 0;

 private:
  void check_dim(const Eigen::VectorXd& x) const;

  int dim_;
  double lipschitz_;
  bool separable_;
  std::optional<Eigen::VectorXd> minimizer_;
  std::optional<double> min_value_;
  bool minimizer_numerical_ = false;
  double minimizer_residual_ = 0.0;
};

/// Largest eigenvalue of a symmetric PSD matrix by power iteration, started
/// from the normalized all-ones vector. Converges when consecutive Rayleigh
/// quotients agree to rel_tol (after at least three iterations).
double max_eigenvalue_power_iteration(const Eigen::MatrixXd& M,
                                      double rel_tol = 1e-14,
                                      int max_iters = 100000);

/// Dense convex quadratic f(x) = 0.5 x'Qx - q'x with Q symmetric positive
/// definite. L is the largest eigenvalue of Q; the minimizer solves Qx = q.
class QuadraticProblem final : public Objective {
 public:
  QuadraticProblem(Eigen::MatrixXd Q, Eigen::VectorXd q);

  const Eigen::MatrixXd& Q() const { return Q_; }
  const Eigen::VectorXd& q() const { return q_; }

 protected:
  double eval_impl(const Eigen::VectorXd& x) const override;
  void grad_impl(const Eigen::VectorXd& x, Eigen::VectorXd& out) const override;

 private:
  Eigen::MatrixXd Q_;
  Eigen::VectorXd q_;
};

/// Random instance: Q0 has U[0,1) entries (row-major fill), then
/// Q = Q0 + Q0' + 50 I and q is standard normal (drawn after Q0).
QuadraticProblem make_quadratic(int n, Prng& prng);

/// Scalar Huber penalty: z^2 on |z| <= tau, linear continuation outside.
double huber_psi(double z, double tau);
double huber_psi_prime(double z, double tau);

/// Huber regression f(x) = 0.5 * sum_i psi_tau(a_i'x - y_i).
class HuberProblem final : public Objective {
 public:
  HuberProblem(Eigen::MatrixXd A, Eigen::VectorXd y, double tau);

  const Eigen::MatrixXd& A() const { return A_; }
  const Eigen::VectorXd& y() const { return y_; }
  double tau() const { return tau_; }

 protected:
  double eval_impl(const Eigen::VectorXd& x) const override;
  void grad_impl(const Eigen::VectorXd& x, Eigen::VectorXd& out) const override;

 private:
  void solve_reference_minimizer();

  Eigen::MatrixXd A_;
  Eigen::VectorXd y_;
  double tau_;
};

/// Random instance: A (m x n, row-major fill) and y (length m) standard
/// normal, in that order. L = lambda_max(A'A).
HuberProblem make_huber(int m, int n, double tau, Prng& prng);

/// One-sided smoothed hinge: z^2/2 for z >= -delta, tangent line below.
double hinder_lubin_h(double z, double delta);
double hinder_lubin_h_prime(double z, double delta);

/// Optional non-separable coupling term for HinderLubinProblem:
/// gamma * sum_i phi(a_i'x) with phi(s) = s + sqrt(s^2 + 1).
struct HinderLubinModifier {
  Eigen::MatrixXd A;
  double gamma = 0.0;
};

/// Weighted smoothed-hinge objective
///   f(x) = sum_i i * h_delta(x_i) + (alpha/2) ||x||^2  (+ optional coupling).
/// Separable without the modifier; the unmodified problem has minimizer 0.
class HinderLubinProblem final : public Objective {
 public:
  HinderLubinProblem(int n, double delta, double alpha,
                     std::optional<HinderLubinModifier> modifier = std::nullopt);

  double delta() const { return delta_; }
  double alpha() const { return alpha_; }
  bool modified() const { return modifier_.has_value(); }
  const std::optional<HinderLubinModifier>& modifier() const { return modifier_; }

 protected:
  double eval_impl(const Eigen::VectorXd& x) const override;
  void grad_impl(const Eigen::VectorXd& x, Eigen::VectorXd& out) const override;

 private:
  void solve_reference_minimizer();

  double delta_;
  double alpha_;
  std::optional<HinderLubinModifier> modifier_;
};

HinderLubinProblem make_hinder_lubin(int n, double delta, double alpha);

/// Modified instance with coupling matrix A (m x n, row-major standard
/// normal fill) and weight gamma; L = n + alpha + gamma * sum_i ||a_i||^2.
HinderLubinProblem make_modified_hinder_lubin(int n, int m, double delta,
                                              double alpha, double gamma,
                                              Prng& prng);

/// One-dimensional convex test objectives with closed-form minimizers and a
/// declared L at least as large as the true curvature bound.
class ScalarProblem final : public Objective {
 public:
  enum class Kind { ScaledQuadratic, ScalarHuber, AsymmetricPiecewise };

  /// f(x) = (c/2) x^2 run with declared constant L >= c.
  static ScalarProblem scaled_quadratic(double curvature, double declared_L);

  /// f(x) = 0.5 * psi_tau(x - center); curvature 1 inside the band.
  static ScalarProblem scalar_huber(double tau, double center, double declared_L);

  /// Piecewise quadratic, curvature c_left below the breakpoint b and
  /// c_right above; the branches meet at b with zero slope, so the
  /// minimizer is exactly b.
  static ScalarProblem asymmetric_piecewise(double curv_left, double curv_right,
                                            double breakpoint, double declared_L);

  Kind kind() const { return kind_; }

 protected:
  double eval_impl(const Eigen::VectorXd& x) const override;
  void grad_impl(const Eigen::VectorXd& x, Eigen::VectorXd& out) const override;

 private:
  ScalarProblem(Kind kind, double p1, double p2, double p3, double declared_L);

  Kind kind_;
  double p1_, p2_, p3_;
};

/// Max relative error between analytic and central-difference gradients over
/// the coordinates of x, with per-coordinate step h * (1 + |x_i|).
double grad_check(const Objective& obj, const Eigen::VectorXd& x, double h = 1e-6);

}  // namespace restart_agd

#include "restart_agd/objectives.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace restart_agd {

Objective::Objective(int dim, double lipschitz, bool separable)
    : dim_(dim), lipschitz_(lipschitz), separable_(separable) {
  if (dim < 1) throw std::invalid_argument("Objective: dim must be positive");
  if (!std::isfinite(lipschitz) || lipschitz <= 0.0)
    throw std::invalid_argument("Objective: lipschitz must be positive and finite");
}

void Objective::check_dim(const Eigen::VectorXd& x) const {
  if (x.size() != dim_)
    throw std::invalid_argument("Objective: expected dimension " + std::to_string(dim_) +
                                ", got " + std::to_string(x.size()));
  if (!x.allFinite()) throw std::invalid_argument("Objective: non-finite input");
}

double Objective::eval(const Eigen::VectorXd& x) const {
  check_dim(x);
  const double v = eval_impl(x);
  if (!std::isfinite(v)) throw NumericError("eval produced a non-finite value");
  return v;
}

Eigen::VectorXd Objective::grad(const Eigen::VectorXd& x) const {
  Eigen::VectorXd g(dim_);
  grad_into(x, g);
  return g;
}

void Objective::grad_into(const Eigen::VectorXd& x, Eigen::VectorXd& out) const {
  check_dim(x);
  out.resize(dim_);
  grad_impl(x, out);
  if (!out.allFinite()) throw NumericError("grad produced a non-finite value");
}

void Objective::set_minimizer(Eigen::VectorXd xstar, bool numerical) {
  const double res = grad(xstar).norm();
  if (!(res <= 1e-8 * (1.0 + lipschitz_)))
    throw GenerationError("reference minimizer residual too large: " + std::to_string(res));
  minimizer_residual_ = res;
  minimizer_numerical_ = numerical;
  min_value_ = eval(xstar);
  minimizer_ = std::move(xstar);
}

double max_eigenvalue_power_iteration(const Eigen::MatrixXd& M, double rel_tol,
                                      int max_iters) {
  if (M.rows() != M.cols() || M.rows() < 1)
    throw std::invalid_argument("power iteration: matrix must be square and nonempty");
  const Eigen::Index n = M.rows();
  Eigen::VectorXd v =
      Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  Eigen::VectorXd w(n);
  double lam_prev = 0.0;
  double lam = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    w.noalias() = M * v;
    lam = v.dot(w);
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    v = w / nw;
    if (it >= 2 && std::abs(lam - lam_prev) <= rel_tol * std::max(1.0, std::abs(lam)))
      return lam;
    lam_prev = lam;
  }
  return lam_prev;
}

namespace {

int quadratic_dim(const Eigen::MatrixXd& Q, const Eigen::VectorXd& q) {
  if (Q.rows() != Q.cols())
    throw std::invalid_argument("QuadraticProblem: Q must be square");
  if (Q.rows() != q.size())
    throw std::invalid_argument("QuadraticProblem: Q and q dimensions disagree");
  if (Q.rows() < 1) throw std::invalid_argument("QuadraticProblem: empty matrix");
  const double scale = std::max(1.0, Q.cwiseAbs().maxCoeff());
  if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("QuadraticProblem: Q must be symmetric");
  return static_cast<int>(Q.rows());
}

}  // namespace

QuadraticProblem::QuadraticProblem(Eigen::MatrixXd Q, Eigen::VectorXd q)
    : Objective(quadratic_dim(Q, q), max_eigenvalue_power_iteration(Q), false),
      Q_(std::move(Q)),
      q_(std::move(q)) {
  Eigen::LLT<Eigen::MatrixXd> llt(Q_);
  if (llt.info() != Eigen::Success)
    throw GenerationError("QuadraticProblem: Q is not positive definite");
  set_minimizer(llt.solve(q_), false);
}

double QuadraticProblem::eval_impl(const Eigen::VectorXd& x) const {
  return 0.5 * x.dot(Q_ * x) - q_.dot(x);
}

void QuadraticProblem::grad_impl(const Eigen::VectorXd& x, Eigen::VectorXd& out) const {
  out.noalias() = Q_ * x;
  out -= q_;
}

QuadraticProblem make_quadratic(int n, Prng& prng) {
  if (n < 1) throw std::invalid_argument("make_quadratic: n must be positive");
  Eigen::MatrixXd Q0(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) Q0(i, j) = prng.uniform01();
  Eigen::MatrixXd Q = Q0 + Q0.transpose();
  Q.diagonal().array() += 50.0;
  Eigen::VectorXd q(n);
  prng.fill_normal(q.data(), static_cast<std::size_t>(n));
  return QuadraticProblem(std::move(Q), std::move(q));
}

double huber_psi(double z, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("huber_psi: tau must be positive");
  if (std::abs(z) <= tau) return z * z;
  return z > 0.0 ? 2.0 * tau * z - tau * tau : -2.0 * tau * z - tau * tau;
}

double huber_psi_prime(double z, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("huber_psi_prime: tau must be positive");
  if (std::abs(z) <= tau) return 2.0 * z;
  return z > 0.0 ? 2.0 * tau : -2.0 * tau;
}

namespace {

int huber_dim(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, double tau) {
  if (A.cols() < 1 || A.rows() < 1)
    throw std::invalid_argument("HuberProblem: A must be nonempty");
  if (A.rows() != y.size())
    throw std::invalid_argument("HuberProblem: A and y dimensions disagree");
  if (!(tau > 0.0)) throw std::invalid_argument("HuberProblem: tau must be positive");
  return static_cast<int>(A.cols());
}

}  // namespace

HuberProblem::HuberProblem(Eigen::MatrixXd A, Eigen::VectorXd y, double tau)
    : Objective(huber_dim(A, y, tau),
                max_eigenvalue_power_iteration(A.transpose() * A), false),
      A_(std::move(A)),
      y_(std::move(y)),
      tau_(tau) {
  solve_reference_minimizer();
}

double HuberProblem::eval_impl(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd r = A_ * x - y_;
  double s = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) s += huber_psi(r(i), tau_);
  return 0.5 * s;
}

void HuberProblem::grad_impl(const Eigen::VectorXd& x, Eigen::VectorXd& out) const {
  Eigen::VectorXd r = A_ * x - y_;
  for (Eigen::Index i = 0; i < r.size(); ++i) r(i) = huber_psi_prime(r(i), tau_);
  out.noalias() = 0.5 * (A_.transpose() * r);
}

void HuberProblem::solve_reference_minimizer() {
  const int n = dim();
  const double L = lipschitz();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);

  // Accelerated phase with a gradient-based restart; this only needs to land
  // in the Newton basin, so the variant details are unimportant here.
  {
    Eigen::VectorXd y = x, g(n), xn(n);
    double t = 1.0;
    for (int k = 0; k < 200000; ++k) {
      grad_into(y, g);
      xn = y - g / L;
      if (g.dot(xn - x) > 0.0) {
        t = 1.0;
        y = xn;
      } else {
        const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        y = xn + ((t - 1.0) / tn) * (xn - x);
        t = tn;
      }
      x = xn;
      grad_into(x, g);
      if (g.norm() <= 1e-9 * (1.0 + L)) break;
    }
  }

  // Active-set Newton polish: on the rows with |residual| < tau the objective
  // is locally quadratic with Hessian sum a_i a_i'.
  Eigen::VectorXd g(n), xt(n);
  Eigen::VectorXd best_x = x;
  double best_res = grad(x).norm();
  for (int it = 0; it < 100; ++it) {
    grad_into(x, g);
    const double res = g.norm();
    if (res < best_res) {
      best_res = res;
      best_x = x;
    }
    if (res <= 1e-12) break;
    const Eigen::VectorXd r = A_ * x - y_;
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < r.size(); ++i)
      if (std::abs(r(i)) < tau_) H.noalias() += A_.row(i).transpose() * A_.row(i);
    H.diagonal().array() += 1e-10;
    Eigen::LLT<Eigen::MatrixXd> llt(H);
    if (llt.info() != Eigen::Success) {
      H.diagonal().array() += 1e-4;
      llt.compute(H);
      if (llt.info() != Eigen::Success) break;
    }
    const Eigen::VectorXd d = -llt.solve(g);
    // Near the optimum f-differences sink below evaluation noise, so accept
    // on gradient-norm progress as well as on f-decrease.
    const double f0 = eval(x);
    double step = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 50; ++ls) {
      xt = x + step * d;
      if (eval(xt) <= f0 || grad(xt).norm() < res) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    x = xt;
  }
  if (grad(x).norm() > best_res) x = best_x;
  set_minimizer(std::move(x), true);
}

HuberProblem make_huber(int m, int n, double tau, Prng& prng) {
  if (m < 1 || n < 1) throw std::invalid_argument("make_huber: m, n must be positive");
  if (!(tau > 0.0)) throw std::invalid_argument("make_huber: tau must be positive");
  Eigen::MatrixXd A(m, n);
  {
    std::vector<double> buf(static_cast<std::size_t>(m) * n);
    prng.fill_normal(buf.data(), buf.size());
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) A(i, j) = buf[static_cast<std::size_t>(i) * n + j];
  }
  Eigen::VectorXd y(m);
  prng.fill_normal(y.data(), static_cast<std::size_t>(m));
  return HuberProblem(std::move(A), std::move(y), tau);
}

double hinder_lubin_h(double z, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("hinder_lubin_h: delta must be positive");
  if (z >= -delta) return 0.5 * z * z;
  return -delta * z - 0.5 * delta * delta;
}

double hinder_lubin_h_prime(double z, double delta) {
  if (!(delta > 0.0))
    throw std::invalid_argument("hinder_lubin_h_prime: delta must be positive");
  return z >= -delta ? z : -delta;
}

namespace {

double hl_lipschitz(int n, double delta, double alpha,
                    const std::optional<HinderLubinModifier>& mod) {
  if (n < 1) throw std::invalid_argument("HinderLubinProblem: n must be positive");
  if (!(delta > 0.0)) throw std::invalid_argument("HinderLubinProblem: delta must be positive");
  if (!(alpha >= 0.0) || !std::isfinite(alpha))
    throw std::invalid_argument("HinderLubinProblem: alpha must be nonnegative");
  double L = static_cast<double>(n) + alpha;
  if (mod) {
    if (mod->A.cols() != n)
      throw std::invalid_argument("HinderLubinProblem: modifier A must have n columns");
    if (!(mod->gamma > 0.0))
      throw std::invalid_argument("HinderLubinProblem: modifier gamma must be positive");
    L += mod->gamma * mod->A.rowwise().squaredNorm().sum();
  }
  return L;
}

}  // namespace

HinderLubinProblem::HinderLubinProblem(int n, double delta, double alpha,
                                       std::optional<HinderLubinModifier> modifier)
    : Objective(n, hl_lipschitz(n, delta, alpha, modifier), !modifier.has_value()),
      delta_(delta),
      alpha_(alpha),
      modifier_(std::move(modifier)) {
  if (!modifier_) {
    set_minimizer(Eigen::VectorXd::Zero(n), false);
  } else {
    solve_reference_minimizer();
  }
}

double HinderLubinProblem::eval_impl(const Eigen::VectorXd& x) const {
  double s = 0.0;
  for (int i = 0; i < dim(); ++i)
    s += static_cast<double>(i + 1) * hinder_lubin_h(x(i), delta_);
  s += 0.5 * alpha_ * x.squaredNorm();
  if (modifier_) {
    const Eigen::VectorXd t = modifier_->A * x;
    double c = 0.0;
    for (Eigen::Index i = 0; i < t.size(); ++i)
      c += t(i) + std::sqrt(t(i) * t(i) + 1.0);
    s += modifier_->gamma * c;
  }
  return s;
}

void HinderLubinProblem::grad_impl(const Eigen::VectorXd& x, Eigen::VectorXd& out) const {
  for (int i = 0; i < dim(); ++i)
    out(i) = static_cast<double>(i + 1) * hinder_lubin_h_prime(x(i), delta_) +
             alpha_ * x(i);
  if (modifier_) {
    Eigen::VectorXd t = modifier_->A * x;
    for (Eigen::Index i = 0; i < t.size(); ++i)
      t(i) = 1.0 + t(i) / std::sqrt(t(i) * t(i) + 1.0);
    out.noalias() += modifier_->gamma * (modifier_->A.transpose() * t);
  }
}

void HinderLubinProblem::solve_reference_minimizer() {
  const int n = dim();
  const double L = lipschitz();
  const Eigen::MatrixXd& A = modifier_->A;
  const double gamma = modifier_->gamma;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);

  {
    Eigen::VectorXd y = x, g(n), xn(n);
    double t = 1.0;
    for (int k = 0; k < 400000; ++k) {
      grad_into(y, g);
      xn = y - g / L;
      if (g.dot(xn - x) > 0.0) {
        t = 1.0;
        y = xn;
      } else {
        const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        y = xn + ((t - 1.0) / tn) * (xn - x);
        t = tn;
      }
      x = xn;
      grad_into(x, g);
      if (g.norm() <= 1e-8 * (1.0 + L)) break;
    }
  }

  // Semismooth Newton: diagonal part from the hinge terms plus the coupling
  // Hessian gamma * sum phi''(a_i'x) a_i a_i'.
  Eigen::VectorXd g(n), xt(n);
  Eigen::VectorXd best_x = x;
  double best_res = grad(x).norm();
  for (int it = 0; it < 100; ++it) {
    grad_into(x, g);
    const double res = g.norm();
    if (res < best_res) {
      best_res = res;
      best_x = x;
    }
    if (res <= 1e-12) break;
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
      H(i, i) = (x(i) >= -delta_ ? static_cast<double>(i + 1) : 0.0) + alpha_;
    const Eigen::VectorXd s = A * x;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      const double w = gamma / std::pow(s(i) * s(i) + 1.0, 1.5);
      H.noalias() += w * (A.row(i).transpose() * A.row(i));
    }
    H.diagonal().array() += 1e-12;
    Eigen::LLT<Eigen::MatrixXd> llt(H);
    if (llt.info() != Eigen::Success) {
      H.diagonal().array() += 1e-6;
      llt.compute(H);
      if (llt.info() != Eigen::Success) break;
    }
    const Eigen::VectorXd d = -llt.solve(g);
    const double f0 = eval(x);
    double step = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      xt = x + step * d;
      if (eval(xt) <= f0) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    x = xt;
  }
  if (grad(x).norm() > best_res) x = best_x;
  set_minimizer(std::move(x), true);
}

HinderLubinProblem make_hinder_lubin(int n, double delta, double alpha) {
  return HinderLubinProblem(n, delta, alpha);
}

HinderLubinProblem make_modified_hinder_lubin(int n, int m, double delta, double alpha,
                                              double gamma, Prng& prng) {
  if (m < 1) throw std::invalid_argument("make_modified_hinder_lubin: m must be positive");
  if (n < 1) throw std::invalid_argument("make_modified_hinder_lubin: n must be positive");
  Eigen::MatrixXd A(m, n);
  std::vector<double> buf(static_cast<std::size_t>(m) * n);
  prng.fill_normal(buf.data(), buf.size());
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = buf[static_cast<std::size_t>(i) * n + j];
  return HinderLubinProblem(n, delta, alpha, HinderLubinModifier{std::move(A), gamma});
}

ScalarProblem::ScalarProblem(Kind kind, double p1, double p2, double p3,
                             double declared_L)
    : Objective(1, declared_L, true), kind_(kind), p1_(p1), p2_(p2), p3_(p3) {}

ScalarProblem ScalarProblem::scaled_quadratic(double curvature, double declared_L) {
  if (!(curvature > 0.0))
    throw std::invalid_argument("scaled_quadratic: curvature must be positive");
  if (!(declared_L >= curvature))
    throw std::invalid_argument("scaled_quadratic: declared L must be >= curvature");
  ScalarProblem p(Kind::ScaledQuadratic, curvature, 0.0, 0.0, declared_L);
  p.set_minimizer(Eigen::VectorXd::Zero(1), false);
  return p;
}

ScalarProblem ScalarProblem::scalar_huber(double tau, double center, double declared_L) {
  if (!(tau > 0.0)) throw std::invalid_argument("scalar_huber: tau must be positive");
  if (!(declared_L >= 1.0))
    throw std::invalid_argument("scalar_huber: declared L must be >= 1");
  ScalarProblem p(Kind::ScalarHuber, tau, center, 0.0, declared_L);
  p.set_minimizer(Eigen::VectorXd::Constant(1, center), false);
  return p;
}

ScalarProblem ScalarProblem::asymmetric_piecewise(double curv_left, double curv_right,
                                                  double breakpoint, double declared_L) {
  if (!(curv_left > 0.0) || !(curv_right > 0.0))
    throw std::invalid_argument("asymmetric_piecewise: curvatures must be positive");
  if (!(declared_L >= std::max(curv_left, curv_right)))
    throw std::invalid_argument("asymmetric_piecewise: declared L must cover both curvatures");
  ScalarProblem p(Kind::AsymmetricPiecewise, curv_left, curv_right, breakpoint, declared_L);
  p.set_minimizer(Eigen::VectorXd::Constant(1, breakpoint), false);
  return p;
}

double ScalarProblem::eval_impl(const Eigen::VectorXd& x) const {
  const double v = x(0);
  switch (kind_) {
    case Kind::ScaledQuadratic:
      return 0.5 * p1_ * v * v;
    case Kind::ScalarHuber:
      return 0.5 * huber_psi(v - p2_, p1_);
    case Kind::AsymmetricPiecewise: {
      const double z = v - p3_;
      return 0.5 * (z <= 0.0 ? p1_ : p2_) * z * z;
    }
  }
  throw std::logic_error("ScalarProblem: unreachable");
}

void ScalarProblem::grad_impl(const Eigen::VectorXd& x, Eigen::VectorXd& out) const {
  const double v = x(0);
  switch (kind_) {
    case Kind::ScaledQuadratic:
      out(0) = p1_ * v;
      return;
    case Kind::ScalarHuber:
      out(0) = 0.5 * huber_psi_prime(v - p2_, p1_);
      return;
    case Kind::AsymmetricPiecewise: {
      const double z = v - p3_;
      out(0) = (z <= 0.0 ? p1_ : p2_) * z;
      return;
    }
  }
  throw std::logic_error("ScalarProblem: unreachable");
}

double grad_check(const Objective& obj, const Eigen::VectorXd& x, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("grad_check: h must be positive");
  const Eigen::VectorXd g = obj.grad(x);
  Eigen::VectorXd xp = x;
  double worst = 0.0;
  for (int i = 0; i < obj.dim(); ++i) {
    const double hi = h * (1.0 + std::abs(x(i)));
    xp(i) = x(i) + hi;
    const double fp = obj.eval(xp);
    xp(i) = x(i) - hi;
    const double fm = obj.eval(xp);
    xp(i) = x(i);
    const double fd = (fp - fm) / (2.0 * hi);
    const double scale = std::max({1.0, std::abs(g(i)), std::abs(fd)});
    worst = std::max(worst, std::abs(fd - g(i)) / scale);
  }
  return worst;
}

}  // namespace restart_agd

#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "restart_agd/engine.hpp"
#include "restart_agd/objectives.hpp"
#include "restart_agd/prng.hpp"

namespace restart_agd {

/// Classical AGD guarantee 2 L d0^2 / (k+1)^2.
double classical_bound(double L, double d0, int k);

/// Single-restart guarantee 8 L d0^2 / ((k-r)(r+2))^2, valid for k >= r+3
/// (and r >= 2, which the restart mechanics force). Equals the classical
/// bound exactly when r (k - r - 2) = 2.
double single_restart_bound(double L, double d0, int r, int k);

/// Multi-restart guarantee
///   (2^{p+1} / ((k-r_p)(r_p-r_{p-1}+2)...(r_2-r_1+2)(r_1+2)))^2 (L/2) d0^2
/// for p >= 2 restarts and k >= r_p + 2. At k = r_p + 2 the value collapses
/// exactly (in floating point) onto the (p-1)-restart chain.
double multi_restart_bound(double L, double d0, const std::vector<int>& restarts, int k);

struct BoundPoint {
  int k = 0;
  double classical = 0.0;
  std::optional<double> restart_aware;  // defined on post-restart windows
};

/// Per-iteration bound series for a certified trace (classical everywhere,
/// restart-aware on the post-restart windows).
std::vector<BoundPoint> bound_series(const RunTrace& trace, const Objective& obj);

struct CheckResult {
  std::string name;
  bool pass = true;
  double worst_margin = std::numeric_limits<double>::infinity();
  int worst_iteration = -1;
};

struct CertificateReport {
  std::vector<CheckResult> checks;
  bool overall_pass = true;

  void add(CheckResult c) {
    overall_pass = overall_pass && c.pass;
    checks.push_back(std::move(c));
  }
  void add_all(const std::vector<CheckResult>& cs) {
    for (const auto& c : cs) add(c);
  }
};

/// Verifies the gap sequence against the classical bound at every recorded
/// iteration and against the restart-aware bounds on each post-restart window,
/// plus the one-step descent f(x_{r+2}) <= f(x_{r+1}) after every restart.
/// Accepts traces from policy none (any schedule) or from the 1-D keep-next
/// gradient policies with the linear schedule. Entries: "classical_bound",
/// and when restarts occurred "restart_aware_bounds" and
/// "post_restart_descent".
std::vector<CheckResult> check_bounds(const RunTrace& trace, const Objective& obj);

/// Verifies the potential t_{k-1}^2 d_k + (L/2)|z_k - x*|^2 is nonincreasing
/// at every iteration strictly inside an inter-restart segment (1-D traces
/// with snapshots). Entry: "potential_monotonicity".
CheckResult check_potential_monotonicity(const RunTrace& trace, const Objective& obj);

/// The three 1-D structural checks for keep-next gradient-restart traces:
/// "bracketing" (restart iff consecutive iterates straddle x*, with a
/// dead-band of 1e-12 (1+|x*|) around x*), "ordering" (monotone iterates
/// between restarts), and "z_bound" (|z_{r+1} - x*| >= t_r |x_{r+1} - x*|
/// - 1e-10 at every restart).
std::vector<CheckResult> check_bracketing_ordering_zbound(const RunTrace& trace,
                                                          const Objective& obj);

/// Samples pairs (x, y) with standard-normal entries scaled by 10 and checks
/// f(x) - f(T(y)) >= (L/2)||x - T(y)||^2 - (L/2)||x - y||^2 within
/// 1e-9 (1+|f(x)|). Entry: "descent_lemma".
CheckResult check_descent_lemma(const Objective& obj, Prng& prng, int samples);

/// For restarted runs in dimension > 1 with snapshots: the fraction of
/// restarts where t_r ||x_{r+1} - x*|| <= ||z_{r+1} - x*|| held. Reported
/// only; pass is always true. Entry: "z_bound_fraction_diagnostic".
std::optional<CheckResult> diagnostic_z_fraction(const RunTrace& trace,
                                                 const Objective& obj);

/// Assembles every check applicable to the given trace into one report:
/// asserted bound checks where the theory covers the run, the 1-D structural
/// checks for gradient-restart scalar traces, and diagnostics (never
/// asserted) for restarted runs in higher dimension.
CertificateReport certify_trace(const RunTrace& trace, const Objective& obj);

}  // namespace restart_agd

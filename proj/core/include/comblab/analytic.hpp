#pragma once

// Closed-form and series quantities for Brownian motion in rectangles and
// strips. Every series here is alternating with decreasing terms or
// exponentially convergent, so the first omitted term bounds the error.

namespace comblab {

struct SeriesParams {
  int truncation_terms = 1'000'000;  // hard cap on summed terms
  double abs_tolerance = 1e-12;
  /// Also required relative to the partial sum, so tiny values keep their digits.
  double rel_tolerance = 1e-12;
};

struct SeriesValue {
  double value = 0.0;
  double remainder_bound = 0.0;
  int terms = 0;
};

/// Probability that Brownian motion from the center of
/// (-a, a) x (-b, b) leaves through one of the two horizontal sides.
SeriesValue rect_exit_tb_prob(double halfwidth, double halfheight, const SeriesParams& params = {});

struct Theta0Result {
  double ell = 0.0;
  double p_top_bottom = 0.0;  // P_0(|Im Z| = ell at exit of (-1,1) x (-ell,ell))
  double theta0 = 0.0;        // 1 - p_top_bottom / 2
  double remainder_bound = 0.0;

  /// 1 - theta0 without cancellation.
  double complement() const noexcept { return 0.5 * p_top_bottom; }
};

/// Per-passage survival factor for slit aspect ratio ell.
Theta0Result theta0(double ell, const SeriesParams& params = {});

/// P_0(tau_(-1,1) > t) for one-dimensional Brownian motion.
SeriesValue strip_survival(double t, const SeriesParams& params = {});

struct MomentValue {
  double value = 0.0;
  double error_estimate = 0.0;
  bool exact_recursion = false;  // true when the integer-p recursion was used
};

/// E_0[tau_(-1,1)^p]. Integer p goes through the exact polynomial recursion
/// (1/2) m_k'' = -k m_{k-1}, m_k(+-1) = 0; other p through quadrature of
/// p t^(p-1) P(tau > t).
MomentValue strip_moment(double p, const SeriesParams& params = {});

/// Quadrature route only; exposed so the two routes can be compared.
MomentValue strip_moment_quadrature(double p, const SeriesParams& params = {});

/// Upper bound max(a_left, a_right)^(2p) * E_0[tau_(-1,1)^p] on the p-th
/// moment of the exit time from (-a_left, a_right) started at 0. This is a
/// bound, not the exact asymmetric moment.
double scaled_strip_moment(double a_left, double a_right, double p, const SeriesParams& params = {});

}  // namespace comblab

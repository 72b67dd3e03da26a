#pragma once

// Moment, survival and tail-index estimates from exit-time samples.
//
// Censored samples carry tau = time_cap. Moments of min(tau, cap) are then
// lower bounds for the true moments; the tail estimators treat them as
// right-censored observations.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "comblab/engine.hpp"

namespace comblab {

struct MomentEstimate {
  double p = 0.0;
  double point_estimate = 0.0;  // mean of min(tau, cap)^p
  double standard_error = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  /// point_estimate^(1/p) and its delta-method standard error.
  double root = 0.0;
  double root_standard_error = 0.0;
  double censored_fraction = 0.0;
  bool lower_bound_only = false;
  std::size_t n = 0;
};

MomentEstimate estimate_moment(const SampleSet& samples, double p);

struct SurvivalPoint {
  double t = 0.0;
  double fraction = 0.0;  // share of samples with tau > t
  double standard_error = 0.0;
};

/// Requires an increasing grid in [0, time_cap).
std::vector<SurvivalPoint> survival_curve(const SampleSet& samples, std::span<const double> t_grid);

/// Pointwise differences of two empirical survival curves with a joint
/// (Bonferroni) band: the curves agree when every |diff| / se stays below
/// the critical value for the requested joint confidence.
struct SurvivalComparison {
  std::vector<double> t;
  std::vector<double> fraction_a;
  std::vector<double> fraction_b;
  std::vector<double> diff;  // a - b
  std::vector<double> se;
  double critical = 0.0;
  double max_abs_z = 0.0;
  bool agree = true;
};

SurvivalComparison compare_survival(const SampleSet& a, const SampleSet& b,
                                    std::span<const double> t_grid, double confidence = 0.99);

enum class TailMethod { Hill, LogLogFit };

std::string to_string(TailMethod method);
TailMethod parse_tail_method(const std::string& name);

struct TailOptions {
  TailMethod method = TailMethod::Hill;
  std::size_t k = 0;  // Hill order statistics; 0 picks min(n^(2/3), n/10)
  double quantile_lo = 0.80;
  double quantile_hi = 0.99;
};

/// Estimated exponent H of P(tau > t) ~ c t^(-H).
struct TailDiagnostic {
  double H_hat = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  TailMethod method = TailMethod::Hill;
  std::size_t k = 0;
  double quantile_lo = 0.0;
  double quantile_hi = 0.0;
  std::size_t n_effective = 0;  // uncensored observations used
  std::size_t censored_in_tail = 0;
};

inline constexpr std::size_t kMinTailSamples = 1000;

/// Hill: log-excesses of the top k order statistics over the (k+1)-th,
/// divided by the uncensored share of the top k (right-censoring
/// correction). LogLogFit: least-squares slope of log S(t) against log t
/// over the given quantile range. Throws ValidationError on fewer than
/// kMinTailSamples samples or when censoring leaves too little tail.
TailDiagnostic tail_index(const SampleSet& samples, const TailOptions& options = {});

enum class MomentVerdict { FiniteLikely, InfiniteLikely, Uncertain };

std::string to_string(MomentVerdict verdict);

/// FiniteLikely if p < ci_lo, InfiniteLikely if p > ci_hi, else Uncertain.
MomentVerdict moment_verdict(const TailDiagnostic& tail, double p);
MomentVerdict moment_verdict(const SampleSet& samples, double p);

}  // namespace comblab

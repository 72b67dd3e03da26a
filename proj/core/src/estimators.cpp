#include "comblab/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <boost/math/distributions/normal.hpp>

#include "comblab/error.hpp"

namespace comblab {

namespace {

constexpr double kZ95 = 1.959963984540054;

}  // namespace

MomentEstimate estimate_moment(const SampleSet& samples, double p) {
  if (!(p > 0.0)) throw ValidationError("estimate_moment: p must be positive");
  if (samples.samples.empty()) throw ValidationError("estimate_moment: empty sample set");
  const double cap = samples.params.time_cap;
  const std::size_t n = samples.size();

  // Welford accumulation.
  double mean = 0.0;
  double m2 = 0.0;
  std::size_t count = 0;
  std::size_t censored = 0;
  for (const ExitSample& s : samples.samples) {
    const double x = std::pow(std::min(s.tau, cap), p);
    ++count;
    const double d = x - mean;
    mean += d / static_cast<double>(count);
    m2 += d * (x - mean);
    if (s.censored) ++censored;
  }

  MomentEstimate e;
  e.p = p;
  e.n = n;
  e.point_estimate = mean;
  e.standard_error = n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
  e.ci_lo = mean - kZ95 * e.standard_error;
  e.ci_hi = mean + kZ95 * e.standard_error;
  e.root = std::pow(mean, 1.0 / p);
  e.root_standard_error = mean > 0.0 ? e.root / (p * mean) * e.standard_error : 0.0;
  e.censored_fraction = static_cast<double>(censored) / static_cast<double>(n);
  e.lower_bound_only = censored > 0;
  return e;
}

std::vector<SurvivalPoint> survival_curve(const SampleSet& samples, std::span<const double> t_grid) {
  if (samples.samples.empty()) throw ValidationError("survival_curve: empty sample set");
  const double cap = samples.params.time_cap;
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] >= 0.0)) throw ValidationError("survival_curve: negative grid time");
    if (i > 0 && !(t_grid[i] > t_grid[i - 1])) throw ValidationError("survival_curve: grid not increasing");
    if (!(t_grid[i] < cap)) {
      throw ValidationError("survival_curve: grid time " + std::to_string(t_grid[i]) +
                            " reaches the time cap " + std::to_string(cap));
    }
  }
  std::vector<double> taus;
  taus.reserve(samples.size());
  for (const ExitSample& s : samples.samples) taus.push_back(s.tau);
  std::sort(taus.begin(), taus.end());
  const double n = static_cast<double>(taus.size());

  std::vector<SurvivalPoint> out;
  out.reserve(t_grid.size());
  for (const double t : t_grid) {
    const auto above = taus.end() - std::upper_bound(taus.begin(), taus.end(), t);
    const double f = static_cast<double>(above) / n;
    out.push_back({t, f, std::sqrt(f * (1.0 - f) / n)});
  }
  return out;
}

SurvivalComparison compare_survival(const SampleSet& a, const SampleSet& b,
                                    std::span<const double> t_grid, double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw ValidationError("compare_survival: confidence must lie in (0, 1)");
  }
  if (t_grid.empty()) throw ValidationError("compare_survival: empty grid");
  const auto ca = survival_curve(a, t_grid);
  const auto cb = survival_curve(b, t_grid);
  SurvivalComparison c;
  const double alpha = (1.0 - confidence) / static_cast<double>(t_grid.size());
  c.critical = boost::math::quantile(boost::math::complement(boost::math::normal(), alpha / 2.0));
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const double d = ca[i].fraction - cb[i].fraction;
    const double se = std::hypot(ca[i].standard_error, cb[i].standard_error);
    c.t.push_back(t_grid[i]);
    c.fraction_a.push_back(ca[i].fraction);
    c.fraction_b.push_back(cb[i].fraction);
    c.diff.push_back(d);
    c.se.push_back(se);
    const double z = se > 0.0 ? std::abs(d) / se : (d == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    c.max_abs_z = std::max(c.max_abs_z, z);
  }
  c.agree = c.max_abs_z <= c.critical;
  return c;
}

std::string to_string(TailMethod method) {
  return method == TailMethod::Hill ? "hill" : "loglog_fit";
}

TailMethod parse_tail_method(const std::string& name) {
  if (name == "hill" || name == "Hill") return TailMethod::Hill;
  if (name == "loglog" || name == "loglog_fit" || name == "LogLogFit") return TailMethod::LogLogFit;
  throw ValidationError("unknown tail method '" + name + "' (expected hill or loglog_fit)");
}

TailDiagnostic tail_index(const SampleSet& samples, const TailOptions& options) {
  const std::size_t n = samples.size();
  if (n < kMinTailSamples) {
    throw ValidationError("tail_index: insufficient tail data (" + std::to_string(n) + " samples, need " +
                          std::to_string(kMinTailSamples) + ")");
  }
  std::vector<std::pair<double, bool>> obs;
  obs.reserve(n);
  for (const ExitSample& s : samples.samples) obs.emplace_back(s.tau, s.censored);

  TailDiagnostic d;
  d.method = options.method;

  if (options.method == TailMethod::Hill) {
    std::size_t k = options.k;
    if (k == 0) k = std::min<std::size_t>(static_cast<std::size_t>(std::pow(static_cast<double>(n), 2.0 / 3.0)), n / 10);
    if (k < 2 || k > n / 10) {
      throw ValidationError("tail_index: Hill k=" + std::to_string(k) + " must lie in [2, n/10]");
    }
    std::nth_element(obs.begin(), obs.begin() + static_cast<std::ptrdiff_t>(k), obs.end(),
                     std::greater<>());
    const double threshold = obs[k].first;
    if (!(threshold > 0.0)) throw ValidationError("tail_index: threshold order statistic is zero");
    double sum = 0.0;
    std::size_t uncensored = 0;
    for (std::size_t i = 0; i < k; ++i) {
      sum += std::log(obs[i].first / threshold);
      if (!obs[i].second) ++uncensored;
    }
    if (uncensored < 10) {
      throw ValidationError("tail_index: insufficient tail data: " + std::to_string(k - uncensored) +
                            " of the top " + std::to_string(k) + " samples are censored");
    }
    if (!(sum > 0.0)) throw ValidationError("tail_index: degenerate tail (all top values tied)");
    const double share = static_cast<double>(uncensored) / static_cast<double>(k);
    const double gamma = sum / static_cast<double>(k) / share;
    d.H_hat = 1.0 / gamma;
    const double half = kZ95 * d.H_hat / std::sqrt(static_cast<double>(k) * share);
    d.ci_lo = std::max(d.H_hat - half, 0.0);
    d.ci_hi = d.H_hat + half;
    d.k = k;
    d.n_effective = uncensored;
    d.censored_in_tail = k - uncensored;
    return d;
  }

  const double qlo = options.quantile_lo;
  const double qhi = options.quantile_hi;
  if (!(qlo > 0.0 && qlo < qhi && qhi < 1.0)) {
    throw ValidationError("tail_index: quantile range must satisfy 0 < lo < hi < 1");
  }
  const std::size_t censored = samples.censored_count();
  if (static_cast<double>(n - censored) <= qhi * static_cast<double>(n)) {
    throw ValidationError("tail_index: insufficient tail data: censoring reaches below quantile " +
                          std::to_string(qhi));
  }
  std::sort(obs.begin(), obs.end());
  const auto i0 = static_cast<std::size_t>(std::ceil(qlo * static_cast<double>(n)));
  const auto i1 = static_cast<std::size_t>(std::floor(qhi * static_cast<double>(n)));
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
  std::size_t m = 0;
  for (std::size_t i = std::max<std::size_t>(i0, 1); i <= i1; ++i) {
    const double t = obs[i - 1].first;
    if (!(t > 0.0)) continue;
    const double x = std::log(t);
    const double y = std::log(1.0 - static_cast<double>(i) / static_cast<double>(n));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
    ++m;
  }
  if (m < 10) throw ValidationError("tail_index: insufficient tail data in the quantile range");
  const double mm = static_cast<double>(m);
  const double vx = sxx - sx * sx / mm;
  if (!(vx > 0.0)) throw ValidationError("tail_index: degenerate tail (tied quantiles)");
  const double slope = (sxy - sx * sy / mm) / vx;
  const double resid = std::max(0.0, (syy - sy * sy / mm) - slope * slope * vx);
  const double se = std::sqrt(resid / (mm - 2.0) / vx);
  d.H_hat = -slope;
  if (!(d.H_hat > 0.0)) throw ValidationError("tail_index: nonpositive fitted tail exponent");
  d.ci_lo = std::max(d.H_hat - kZ95 * se, 0.0);
  d.ci_hi = d.H_hat + kZ95 * se;
  d.quantile_lo = qlo;
  d.quantile_hi = qhi;
  d.n_effective = m;
  return d;
}

std::string to_string(MomentVerdict verdict) {
  switch (verdict) {
    case MomentVerdict::FiniteLikely:
      return "FiniteLikely";
    case MomentVerdict::InfiniteLikely:
      return "InfiniteLikely";
    case MomentVerdict::Uncertain:
      break;
  }
  return "Uncertain";
}

MomentVerdict moment_verdict(const TailDiagnostic& tail, double p) {
  if (!(p > 0.0)) throw ValidationError("moment_verdict: p must be positive");
  if (p < tail.ci_lo) return MomentVerdict::FiniteLikely;
  if (p > tail.ci_hi) return MomentVerdict::InfiniteLikely;
  return MomentVerdict::Uncertain;
}

MomentVerdict moment_verdict(const SampleSet& samples, double p) {
  return moment_verdict(tail_index(samples), p);
}

}  // namespace comblab

#include "comblab/analytic.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include "comblab/error.hpp"

namespace comblab {

namespace {

constexpr double kPi = std::numbers::pi;

void check_params(const SeriesParams& params) {
  if (params.truncation_terms < 1) throw ValidationError("truncation_terms must be >= 1");
  if (!(params.abs_tolerance > 0.0)) throw ValidationError("abs_tolerance must be positive");
  if (!(params.rel_tolerance > 0.0)) throw ValidationError("rel_tolerance must be positive");
}

double sech(double x) {
  const double e = std::exp(-x);
  return 2.0 * e / (1.0 + e * e);
}

// Sums scale * sum_k (-1)^k term(k) for a positive decreasing term(k),
// stopping once scale * term(k) drops below both the absolute tolerance and
// the relative tolerance times the partial sum.
template <class Term>
SeriesValue alternating_sum(double scale, Term term, const SeriesParams& params) {
  double sum = 0.0;
  for (int k = 0; k < params.truncation_terms; ++k) {
    const double t = term(k);
    if (scale * t < params.abs_tolerance && t <= params.rel_tolerance * std::abs(sum)) {
      return {scale * sum, scale * t, k};
    }
    sum += (k % 2 == 0) ? t : -t;
  }
  const double next = scale * term(params.truncation_terms);
  if (next >= params.abs_tolerance || next > params.rel_tolerance * scale * std::abs(sum)) {
    std::ostringstream os;
    os << "series did not reach tolerance " << params.abs_tolerance << " within "
       << params.truncation_terms << " terms (remainder " << next << ")";
    throw ValidationError(os.str());
  }
  return {scale * sum, next, params.truncation_terms};
}

// S(r) = (4/pi) sum (-1)^k/(2k+1) sech((2k+1) pi r / 2): the probability of
// leaving (-a,a)x(-b,b) through the vertical sides when r = a/b.
SeriesValue side_series(double r, const SeriesParams& params) {
  return alternating_sum(
      4.0 / kPi,
      [r](int k) {
        const double m = 2.0 * k + 1.0;
        return sech(m * kPi * r / 2.0) / m;
      },
      params);
}

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

// Even polynomial coefficients (in x^2) of m_k with m_k(+-1) = 0.
std::vector<long double> moment_polynomial(int k) {
  std::vector<long double> m{1.0L};  // m_0 = 1
  for (int order = 1; order <= k; ++order) {
    std::vector<long double> next(m.size() + 1, 0.0L);
    long double at_one = 0.0L;
    for (std::size_t i = 0; i < m.size(); ++i) {
      const long double c = -2.0L * order * m[i] / ((2.0L * i + 1.0L) * (2.0L * i + 2.0L));
      next[i + 1] = c;
      at_one += c;
    }
    next[0] = -at_one;
    m = std::move(next);
  }
  return m;
}

constexpr double kSurvivalCrossover = 0.5;

}  // namespace

SeriesValue rect_exit_tb_prob(double halfwidth, double halfheight, const SeriesParams& params) {
  check_params(params);
  if (!(halfwidth > 0.0) || !(halfheight > 0.0)) {
    throw ValidationError("rectangle dimensions must be positive");
  }
  // Pick the orientation whose series decays fastest (ratio >= 1).
  if (halfwidth >= halfheight) {
    SeriesValue side = side_series(halfwidth / halfheight, params);
    return {clamp01(1.0 - side.value), side.remainder_bound, side.terms};
  }
  SeriesValue tb = side_series(halfheight / halfwidth, params);
  return {clamp01(tb.value), tb.remainder_bound, tb.terms};
}

Theta0Result theta0(double ell, const SeriesParams& params) {
  if (!(ell > 0.0) || !std::isfinite(ell)) throw ValidationError("ell must be positive and finite");
  const SeriesValue p = rect_exit_tb_prob(1.0, ell, params);
  return {ell, p.value, 1.0 - 0.5 * p.value, 0.5 * p.remainder_bound};
}

SeriesValue strip_survival(double t, const SeriesParams& params) {
  check_params(params);
  if (!(t >= 0.0)) throw ValidationError("strip_survival: t must be nonnegative");
  if (t == 0.0) return {1.0, 0.0, 0};
  if (t >= kSurvivalCrossover) {
    const double rate = kPi * kPi * t / 8.0;
    SeriesValue s = alternating_sum(
        4.0 / kPi,
        [rate](int k) {
          const double m = 2.0 * k + 1.0;
          return std::exp(-m * m * rate) / m;
        },
        params);
    s.value = clamp01(s.value);
    return s;
  }
  // Image-charge form: P(tau <= t) = 2 sum (-1)^k erfc((2k+1)/sqrt(2t)).
  const double inv = 1.0 / std::sqrt(2.0 * t);
  SeriesValue hit = alternating_sum(
      2.0, [inv](int k) { return std::erfc((2.0 * k + 1.0) * inv); }, params);
  return {clamp01(1.0 - hit.value), hit.remainder_bound, hit.terms};
}

MomentValue strip_moment_quadrature(double p, const SeriesParams& params) {
  check_params(params);
  if (!(p > 0.0) || !std::isfinite(p)) throw ValidationError("strip_moment: p must be positive");
  // E[tau^p] = int_0^inf P(tau > s^(1/p)) ds after t = s^(1/p).
  const double inv_p = 1.0 / p;
  auto integrand = [&](double s) { return strip_survival(std::pow(s, inv_p), params).value; };
  double error = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      integrand, 0.0, std::numeric_limits<double>::infinity(), 20, 1e-13, &error);
  return {value, std::max(error, params.abs_tolerance), false};
}

MomentValue strip_moment(double p, const SeriesParams& params) {
  check_params(params);
  if (!(p > 0.0) || !std::isfinite(p)) throw ValidationError("strip_moment: p must be positive");
  if (p == std::round(p) && p <= 40.0) {
    const auto m = moment_polynomial(static_cast<int>(p));
    return {static_cast<double>(m[0]), 0.0, true};
  }
  return strip_moment_quadrature(p, params);
}

double scaled_strip_moment(double a_left, double a_right, double p, const SeriesParams& params) {
  if (!(a_left > 0.0) || !(a_right > 0.0)) throw ValidationError("strip widths must be positive");
  const double d = std::max(a_left, a_right);
  return std::pow(d, 2.0 * p) * strip_moment(p, params).value;
}

}  // namespace comblab

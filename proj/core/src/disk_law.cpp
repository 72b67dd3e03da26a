#include "comblab/disk_law.hpp"

#include <algorithm>
#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "comblab/error.hpp"

namespace comblab {

namespace {

constexpr int kZeros = 256;
// Below this time the survival function equals 1 to ~1e-10.
constexpr double kTableStart = 0.015;
// Beyond this time the second eigenmode is below 1e-13 relative to the first.
constexpr double kTailStart = 2.5;

}  // namespace

DiskExitLaw::DiskExitLaw(std::size_t knots) {
  if (knots < 16) throw ValidationError("disk law table needs at least 16 knots");
  zeros_.reserve(kZeros);
  weights_.reserve(kZeros);
  for (int k = 1; k <= kZeros; ++k) {
    const double j = boost::math::cyl_bessel_j_zero(0.0, k);
    zeros_.push_back(j);
    weights_.push_back(2.0 / (j * boost::math::cyl_bessel_j(1, j)));
  }
  rate_ = 0.5 * zeros_[0] * zeros_[0];
  tail_start_ = kTailStart;
  tail_weight_ = weights_[0];

  times_.reserve(knots + 1);
  survival_.reserve(knots + 1);
  times_.push_back(0.0);
  survival_.push_back(1.0);
  const double dt = (kTailStart - kTableStart) / static_cast<double>(knots - 1);
  for (std::size_t i = 0; i < knots; ++i) {
    const double t = kTableStart + dt * static_cast<double>(i);
    times_.push_back(t);
    survival_.push_back(std::min(survival_.back(), std::clamp(survival(t), 0.0, 1.0)));
  }

  // Moments of the tabulated law: trapezoid on the piecewise-linear part,
  // closed form on the exponential tail.
  double m1 = 0.0;
  double m2 = 0.0;
  for (std::size_t i = 1; i < times_.size(); ++i) {
    const double h = times_[i] - times_[i - 1];
    m1 += 0.5 * h * (survival_[i] + survival_[i - 1]);
    m2 += h * (times_[i] * survival_[i] + times_[i - 1] * survival_[i - 1]);
  }
  const double tail = tail_weight_ * std::exp(-rate_ * tail_start_);
  m1 += tail / rate_;
  m2 += 2.0 * tail * (tail_start_ / rate_ + 1.0 / (rate_ * rate_));
  mean_ = m1;
  second_moment_ = m2;

  if (std::abs(mean_ - 0.5) > 1e-6 || std::abs(second_moment_ - 0.375) > 1e-6) {
    std::ostringstream os;
    os << "disk exit-time table failed moment validation: mean " << mean_ << ", second moment "
       << second_moment_;
    throw std::logic_error(os.str());
  }
}

const DiskExitLaw& DiskExitLaw::standard() {
  static const DiskExitLaw law;
  return law;
}

double DiskExitLaw::survival(double t) const {
  if (t <= 0.0) return 1.0;
  if (t < kTableStart) return 1.0;
  double s = 0.0;
  for (std::size_t k = 0; k < zeros_.size(); ++k) {
    const double e = std::exp(-0.5 * zeros_[k] * zeros_[k] * t);
    if (e == 0.0) break;
    s += weights_[k] * e;
  }
  return s;
}

double DiskExitLaw::time_at_survival(double level) const {
  if (level <= survival_.back()) {
    return tail_start_ + std::log(tail_weight_ * std::exp(-rate_ * tail_start_) / level) / rate_;
  }
  // survival_ is decreasing: first knot with survival < level
  const auto it = std::upper_bound(survival_.begin(), survival_.end(), level, std::greater<>());
  const std::size_t i = static_cast<std::size_t>(it - survival_.begin());
  if (i == 0) return 0.0;
  const double s0 = survival_[i - 1];
  const double s1 = survival_[i];
  const double w = s0 > s1 ? (s0 - level) / (s0 - s1) : 0.0;
  return times_[i - 1] + w * (times_[i] - times_[i - 1]);
}

DiskExit sample_disk_exit(double radius, RandomStream& rng) {
  if (!(radius > 0.0)) throw ValidationError("disk radius must be positive");
  const double angle = 2.0 * std::numbers::pi * rng.uniform();
  const double t = DiskExitLaw::standard().time_at_survival(rng.uniform_open_zero());
  return {angle, radius * radius * t};
}

}  // namespace comblab

#pragma once

// Exit-time law of planar Brownian motion started at the center of a disk.
//
// For the unit disk, P(tau > t) = sum_k 2 / (j_k J_1(j_k)) exp(-j_k^2 t / 2)
// with j_k the zeros of J_0. Samples come from a tabulated inverse CDF with
// an exact single-exponential tail; radius r rescales time by r^2.

#include <cstddef>
#include <vector>

#include "comblab/rng.hpp"

namespace comblab {

class DiskExitLaw {
 public:
  explicit DiskExitLaw(std::size_t knots = 8192);

  /// Shared table, built once on first use.
  static const DiskExitLaw& standard();

  /// Bessel-series survival function of the unit-disk exit time.
  double survival(double t) const;

  /// Inverse of the tabulated survival function; `level` in (0, 1].
  double time_at_survival(double level) const;

  double table_mean() const noexcept { return mean_; }
  double table_second_moment() const noexcept { return second_moment_; }
  std::size_t knots() const noexcept { return times_.size(); }
  double leading_rate() const noexcept { return rate_; }

 private:
  std::vector<double> zeros_;
  std::vector<double> weights_;
  std::vector<double> times_;     // increasing
  std::vector<double> survival_;  // decreasing, survival_[0] == 1
  double tail_start_ = 0.0;
  double tail_weight_ = 0.0;
  double rate_ = 0.0;
  double mean_ = 0.0;
  double second_moment_ = 0.0;
};

struct DiskExit {
  double angle = 0.0;
  double time = 0.0;
};

/// Exit angle (uniform on [0, 2*pi)) and exit time from a centered disk.
DiskExit sample_disk_exit(double radius, RandomStream& rng);

}  // namespace comblab

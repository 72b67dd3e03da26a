#pragma once

// Fixtures and statistical helpers shared by the test binaries.

#include <cmath>
#include <numbers>

#include "comblab/comb.hpp"
#include "comblab/domain.hpp"
#include "comblab/engine.hpp"

namespace comblab::testing {

inline CombDomain uniform_comb(double spacing = 1.0, double height = 1.0, int radius = 40) {
  return build_comb(CombSpec{UniformGenerator{spacing, height}, radius, false});
}

inline CombDomain explicit_comb(std::vector<std::pair<double, double>> slits, bool one_sided = false) {
  return build_comb(CombSpec{ExplicitSlits{std::move(slits)}, 1, one_sided});
}

inline SimParams euler(std::uint64_t seed = 1, double time_cap = 1e6) {
  SimParams p;
  p.engine = EngineKind::EulerBridge;
  p.master_seed = seed;
  p.time_cap = time_cap;
  return p;
}

inline SimParams wos(std::uint64_t seed = 1, double time_cap = 1e6) {
  SimParams p = euler(seed, time_cap);
  p.engine = EngineKind::WosTime;
  return p;
}

/// Start on the bisector of a wedge, at unit distance from the apex.
inline Point wedge_start(double angle) {
  return {std::cos(angle / 2.0), std::sin(angle / 2.0)};
}

/// |x - target| in units of `se`; zero when both are exact.
inline double z_score(double x, double target, double se) {
  if (se == 0.0) return x == target ? 0.0 : INFINITY;
  return std::abs(x - target) / se;
}

}  // namespace comblab::testing

#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <numbers>

#include "comblab/analytic.hpp"
#include "comblab/engine.hpp"
#include "comblab/error.hpp"
#include "support.hpp"

namespace comblab {
namespace {

using testing::euler;
using testing::wos;
using testing::z_score;

struct Mean {
  double mean = 0.0;
  double se = 0.0;
};

Mean mean_tau(const SampleSet& set) {
  double s = 0.0, s2 = 0.0;
  for (const ExitSample& e : set.samples) {
    s += e.tau;
    s2 += e.tau * e.tau;
  }
  const double n = static_cast<double>(set.size());
  const double m = s / n;
  return {m, std::sqrt((s2 / n - m * m) / (n - 1.0))};
}

// Share of samples satisfying pred, with its binomial standard error.
template <class Pred>
Mean fraction(const SampleSet& set, Pred pred) {
  double k = 0.0;
  for (const ExitSample& e : set.samples) k += pred(e) ? 1.0 : 0.0;
  const double n = static_cast<double>(set.size());
  const double f = k / n;
  return {f, std::sqrt(f * (1.0 - f) / n)};
}

bool bit_equal(const ExitSample& a, const ExitSample& b) {
  return std::bit_cast<std::uint64_t>(a.tau) == std::bit_cast<std::uint64_t>(b.tau) &&
         std::bit_cast<std::uint64_t>(a.exit_point.u) == std::bit_cast<std::uint64_t>(b.exit_point.u) &&
         std::bit_cast<std::uint64_t>(a.exit_point.v) == std::bit_cast<std::uint64_t>(b.exit_point.v) &&
         a.censored == b.censored && a.passages == b.passages && a.steps == b.steps;
}

TEST(Engine, StripMeanBothEngines) {
  const VerticalStrip strip{-1.0, 1.0};
  for (const SimParams& p : {euler(101), wos(102)}) {
    const Mean m = mean_tau(run_batch(strip, {0.0, 0.0}, 100'000, p));
    EXPECT_LE(z_score(m.mean, strip_moment(1.0).value, m.se), 3.0) << to_string(p.engine) << " " << m.mean;
  }
}

TEST(Engine, RectangleHorizontalExitsHalf) {
  const Rectangle r{1.0, 1.0};
  for (const SimParams& p : {euler(201), wos(202)}) {
    const SampleSet set = run_batch(r, {0.0, 0.0}, 100'000, p);
    const Mean f = fraction(set, [](const ExitSample& e) {
      return 1.0 - std::abs(e.exit_point.v) < 1.0 - std::abs(e.exit_point.u);
    });
    EXPECT_LE(z_score(f.mean, 0.5, f.se), 3.0) << to_string(p.engine) << " " << f.mean;
  }
}

TEST(Engine, StripHarmonicMeasure) {
  // P_0(|Im Z_tau| >= 1) on the strip |Re z| < 1 is 1 - (4/pi) atan(tanh(pi/4)).
  const double exact = 1.0 - 4.0 / std::numbers::pi * std::atan(std::tanh(std::numbers::pi / 4.0));
  for (const SimParams& p : {euler(301), wos(302)}) {
    const SampleSet set = run_batch(VerticalStrip{-1.0, 1.0}, {0.0, 0.0}, 100'000, p);
    const Mean f = fraction(set, [](const ExitSample& e) { return std::abs(e.exit_point.v) >= 1.0; });
    EXPECT_LE(z_score(f.mean, exact, f.se), 3.0) << to_string(p.engine) << " " << f.mean;
  }
}

TEST(Engine, CombExitsLieOnSlits) {
  const CombDomain c = testing::uniform_comb();
  for (const SimParams& p : {euler(401, 1e4), wos(402, 1e4)}) {
    const SampleSet set = run_batch(c, {0.5, 0.0}, 20'000, p);
    const double tol = p.engine == EngineKind::EulerBridge ? 1e-9 : 2.0 * set.params.shell_eps;
    for (const ExitSample& e : set.samples) {
      ASSERT_FALSE(e.censored);
      const double n = std::round(e.exit_point.u);
      EXPECT_LE(std::abs(e.exit_point.u - n), tol);
      EXPECT_GE(std::abs(e.exit_point.v), 1.0 - tol);
    }
  }
}

TEST(Engine, UniformCombUncensoredAtModerateCap) {
  const SampleSet set = run_batch(testing::uniform_comb(), {0.5, 0.0}, 100'000, euler(501, 1e4));
  EXPECT_EQ(set.censored_count(), 0u);
}

TEST(Engine, WorkerCountDoesNotChangeSamples) {
  const CombDomain c = testing::uniform_comb();
  for (SimParams p : {euler(601, 1e4), wos(602, 1e4)}) {
    p.workers = 1;
    const SampleSet one = run_batch(c, {0.5, 0.3}, 3000, p);
    p.workers = 8;
    const SampleSet eight = run_batch(c, {0.5, 0.3}, 3000, p);
    ASSERT_EQ(one.size(), eight.size());
    for (std::size_t i = 0; i < one.size(); ++i) ASSERT_TRUE(bit_equal(one.samples[i], eight.samples[i])) << i;
    EXPECT_EQ(one.domain_fingerprint, eight.domain_fingerprint);
  }
}

TEST(Engine, RangeMatchesBatch) {
  const VerticalStrip strip{-1.0, 1.0};
  const SimParams p = euler(701);
  const SampleSet all = run_batch(strip, {0.2, 0.0}, 50, p);
  const auto tail = run_range(strip, {0.2, 0.0}, 30, 20, resolve_params(strip, p));
  for (std::size_t i = 0; i < tail.size(); ++i) EXPECT_TRUE(bit_equal(tail[i], all.samples[30 + i]));
}

TEST(Engine, InputErrors) {
  const Rectangle r{1.0, 1.0};
  EXPECT_THROW(run_batch(r, {0.0, 0.0}, 0, euler()), ValidationError);
  EXPECT_THROW(run_batch(r, {2.0, 0.0}, 10, euler()), ValidationError);
  EXPECT_THROW(run_batch(r, {1.0, 0.0}, 10, wos()), ValidationError);
  SimParams big_step = euler();
  big_step.step_h = 2.0;  // scale 2, so the limit is 1
  EXPECT_THROW(run_batch(r, {0.0, 0.0}, 10, big_step), ValidationError);
  SimParams no_cap = euler();
  no_cap.time_cap = 0.0;
  EXPECT_THROW(run_batch(r, {0.0, 0.0}, 10, no_cap), ValidationError);
  SimParams thick_shell = wos();
  thick_shell.shell_eps = 0.5;
  EXPECT_THROW(run_batch(r, {0.0, 0.0}, 10, thick_shell), ValidationError);
  EXPECT_THROW(parse_engine("leapfrog"), ValidationError);
}

TEST(Engine, ResolvedDefaults) {
  const SimParams p = resolve_params(VerticalStrip{-1.0, 1.0}, SimParams{});
  EXPECT_DOUBLE_EQ(p.step_h, 4.0 / 25.0);
  EXPECT_DOUBLE_EQ(p.shell_eps, 2e-4);
}

TEST(Engine, WindowEscapeNamesLargerRadius) {
  const CombDomain small = testing::uniform_comb(1.0, 1.0, 2);
  try {
    run_batch(small, {0.5, 0.0}, 5000, euler(801, 1e6));
    FAIL() << "expected WindowEscape";
  } catch (const WindowEscape& e) {
    EXPECT_GT(e.required_radius(), 2);
  }
}

TEST(Engine, CensoringMatchesStripSurvival) {
  const double cap = 0.3;
  const SampleSet set = run_batch(VerticalStrip{-1.0, 1.0}, {0.0, 0.0}, 100'000, euler(901, cap));
  const Mean f = fraction(set, [](const ExitSample& e) { return e.censored; });
  EXPECT_LE(z_score(f.mean, strip_survival(cap).value, f.se), 3.0) << f.mean;
  for (const ExitSample& e : set.samples) {
    EXPECT_LE(e.tau, cap);
    if (e.censored) EXPECT_EQ(e.tau, cap);
  }
}

TEST(Engine, StepLimitCensors) {
  SimParams p = euler(1001);
  p.max_steps = 1;
  p.step_h = 1e-4;  // one step cannot reach the walls
  const SampleSet set = run_batch(VerticalStrip{-10.0, 10.0}, {0.0, 0.0}, 200, p);
  EXPECT_EQ(set.censored_count(), set.size());
}

TEST(Engine, HalfPlaneCensoringMatchesHittingLaw) {
  // From distance 1, P(tau > t) = erf(1 / sqrt(2 t)).
  const double cap = 1000.0;
  const SampleSet set = run_batch(HalfPlane{}, {1.0, 0.0}, 20'000, euler(1101, cap));
  const Mean f = fraction(set, [](const ExitSample& e) { return e.censored; });
  EXPECT_LE(z_score(f.mean, std::erf(1.0 / std::sqrt(2.0 * cap)), f.se), 3.0) << f.mean;
  for (const ExitSample& e : set.samples) {
    if (!e.censored) EXPECT_LE(std::abs(e.exit_point.u), 1e-12);
  }
}

TEST(Engine, WedgeExitsOnRays) {
  const double angle = std::numbers::pi / 3.0;
  const SampleSet set = run_batch(Wedge{angle}, testing::wedge_start(angle), 5000, euler(1201, 1e3));
  for (const ExitSample& e : set.samples) {
    if (e.censored) continue;
    const double r = std::hypot(e.exit_point.u, e.exit_point.v);
    const double on_lower = std::abs(e.exit_point.v);
    const double on_upper = std::abs(std::sin(angle) * e.exit_point.u - std::cos(angle) * e.exit_point.v);
    EXPECT_LE(std::min(on_lower, on_upper), 1e-9 * std::max(1.0, r));
  }
}

TEST(Property, TallerSlitsLengthenExitTimes) {
  const SampleSet low = run_batch(testing::uniform_comb(1.0, 1.0), {0.5, 0.0}, 20'000, euler(1301, 1e4));
  const SampleSet high = run_batch(testing::uniform_comb(1.0, 2.0), {0.5, 0.0}, 20'000, euler(1301, 1e4));
  const Mean a = mean_tau(low);
  const Mean b = mean_tau(high);
  EXPECT_GE(b.mean - a.mean, -3.0 * std::hypot(a.se, b.se)) << a.mean << " vs " << b.mean;
}

TEST(Property, StripScalingLaw) {
  for (double d : {1.0, 2.0, 3.0}) {
    const Mean m = mean_tau(run_batch(VerticalStrip{-d, d}, {0.0, 0.0}, 40'000, euler(1400 + static_cast<int>(d))));
    EXPECT_LE(z_score(m.mean, d * d, m.se), 3.0) << "d=" << d << " mean " << m.mean;
  }
}

TEST(Property, PassageCountBound) {
  const SampleSet set = run_batch(testing::uniform_comb(), {0.5, 0.0}, 100'000, euler(1501, 1e4));
  const double theta = theta0(1.0).theta0;
  for (int j = 1; j <= 10; ++j) {
    const Mean f = fraction(set, [j](const ExitSample& e) { return e.passages > j; });
    EXPECT_LE(f.mean, std::pow(theta, j) + 3.0 * f.se) << "j=" << j;
  }
}

TEST(Property, ExitProbabilityMinimalOnAxis) {
  // Two full lines at 0 and 2: the strip between them as a degenerate comb.
  const CombDomain strip = testing::explicit_comb({{0.0, 0.0}, {2.0, 0.0}});
  const double beta = 1.0;
  std::vector<Mean> probs;
  for (double y : {0.0, 0.5 * beta, 0.9 * beta}) {
    const SampleSet set = run_batch(strip, {1.0, y}, 100'000, euler(1601));
    probs.push_back(fraction(set, [&](const ExitSample& e) { return std::abs(e.exit_point.v) >= beta; }));
  }
  for (std::size_t i = 1; i < probs.size(); ++i) {
    EXPECT_GE(probs[i].mean - probs[i - 1].mean, -3.0 * std::hypot(probs[i].se, probs[i - 1].se));
  }
}

TEST(Property, StripExitDominatesHalfRectangle) {
  for (double beta : {0.5, 1.0, 2.0}) {
    const SampleSet set = run_batch(VerticalStrip{-1.0, 1.0}, {0.0, 0.0}, 100'000, wos(1700));
    const Mean f = fraction(set, [&](const ExitSample& e) { return std::abs(e.exit_point.v) >= beta; });
    EXPECT_GE(f.mean + 3.0 * f.se, 0.5 * rect_exit_tb_prob(1.0, beta).value) << beta;
  }
}

}  // namespace
}  // namespace comblab

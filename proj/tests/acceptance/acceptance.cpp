// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "comblab/adversarial.hpp"
#include "comblab/analytic.hpp"
#include "comblab/checker.hpp"
#include "comblab/error.hpp"
#include "comblab/estimators.hpp"
#include "comblab/io.hpp"
#include "support.hpp"

#ifdef COMBLAB_ACCEPTANCE_CLI
#include "cli.hpp"
#endif

namespace comblab::acceptance {
namespace {

using testing::euler;
using testing::wos;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int workers() {
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

SimParams with_workers(SimParams p) {
  p.workers = workers();
  return p;
}

std::string fmt(double x, int digits = 6) {
  std::ostringstream os;
  os.precision(digits);
  os << x;
  return os.str();
}

struct Stat {
  double value = 0.0;
  double se = 0.0;
};

template <class Pred>
Stat fraction(const SampleSet& set, Pred pred) {
  double k = 0.0;
  for (const ExitSample& e : set.samples) k += pred(e) ? 1.0 : 0.0;
  const double n = static_cast<double>(set.size());
  return {k / n, std::sqrt((k / n) * (1.0 - k / n) / n)};
}

Stat mean_tau(const SampleSet& set) {
  const MomentEstimate m = estimate_moment(set, 1.0);
  return {m.point_estimate, m.standard_error};
}

bool top_or_bottom(const ExitSample& e, const Rectangle& r) {
  return r.halfheight - std::abs(e.exit_point.v) < r.halfwidth - std::abs(e.exit_point.u);
}

// 1. theta0(1) through the command-line entry point, and its runtime.
Outcome theta0_exactness() {
  Outcome o;
  double value = 0.0;
  std::vector<double> micros;
  for (int rep = 0; rep < 21; ++rep) {
    const auto t0 = std::chrono::steady_clock::now();
#ifdef COMBLAB_ACCEPTANCE_CLI
    const char* argv[] = {"comblab", "theta0", "--ell", "1"};
    std::ostringstream out, err;
    if (cli::run_command(4, argv, out, err) != cli::kOk) return {false, "theta0 command failed: " + err.str()};
    value = json::parse(out.str())["theta0"].get<double>();
#else
    value = theta0(1.0).theta0;
#endif
    micros.push_back(std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - t0).count());
  }
  std::sort(micros.begin(), micros.end());
  const double median = micros[micros.size() / 2];
  const double err = std::abs(value - 0.75);
  o.pass = err <= 1e-12 && median < 1000.0;
  o.detail = "theta0(1)=" + fmt(value, 17) + " |err|=" + fmt(err, 3) + " median runtime " + fmt(median, 3) +
             " us (max " + fmt(micros.back(), 3) + " us)";
  return o;
}

// 2. Strip moments: analytic recursion and 10^6 Monte Carlo samples.
Outcome strip_moments() {
  const double exact[] = {1.0, 5.0 / 3.0, 61.0 / 15.0};
  bool pass = true;
  std::ostringstream d;
  for (int p = 1; p <= 3; ++p) {
    const double v = strip_moment(p).value;
    pass = pass && std::abs(v - exact[p - 1]) <= 1e-10;
    d << "m" << p << "=" << fmt(v, 15) << " ";
  }
  const SampleSet set = run_batch(VerticalStrip{-1.0, 1.0}, {0.0, 0.0}, 1'000'000, with_workers(euler(2002)));
  for (int p = 1; p <= 3; ++p) {
    const MomentEstimate m = estimate_moment(set, p);
    const double z = std::abs(m.point_estimate - exact[p - 1]) / m.standard_error;
    pass = pass && z <= 3.0;
    d << "| MC p=" << p << " " << fmt(m.point_estimate) << "+-" << fmt(m.standard_error, 2) << " z=" << fmt(z, 3)
      << " ";
  }
  return {pass, d.str() + "(euler_bridge, 1e6 samples)"};
}

// 3. Rectangle harmonic measure.
Outcome rectangle_measure() {
  const double half = rect_exit_tb_prob(1.0, 1.0).value;
  bool pass = std::abs(half - 0.5) <= 1e-12;
  std::ostringstream d;
  d << "series(1,1)=" << fmt(half, 17);
  int seed = 3000;
  for (const Rectangle r : {Rectangle{1.0, 1.0}, Rectangle{2.0, 1.0}, Rectangle{1.0, 2.0}}) {
    const double target = rect_exit_tb_prob(r.halfwidth, r.halfheight).value;
    const SampleSet set = run_batch(r, {0.0, 0.0}, 1'000'000, with_workers(wos(++seed)));
    const Stat f = fraction(set, [&](const ExitSample& e) { return top_or_bottom(e, r); });
    const double z = std::abs(f.value - target) / f.se;
    pass = pass && z <= 3.0;
    d << " | (" << r.halfwidth << "," << r.halfheight << ") series " << fmt(target) << " MC " << fmt(f.value)
      << " z=" << fmt(z, 3);
  }
  return {pass, d.str() + " (wos_time, 1e6 samples each)"};
}

// 4. Scaling of the strip exit time.
Outcome scaling_law() {
  bool pass = true;
  std::ostringstream d;
  for (double dd : {1.0, 2.0, 3.0}) {
    const SampleSet set =
        run_batch(VerticalStrip{-dd, dd}, {0.0, 0.0}, 100'000, with_workers(euler(4000 + static_cast<int>(dd))));
    const Stat m = mean_tau(set);
    const double z = std::abs(m.value - dd * dd) / m.se;
    pass = pass && z <= 3.0;
    d << "d=" << dd << " mean " << fmt(m.value) << " (d^2=" << dd * dd << ") z=" << fmt(z, 3) << "  ";
  }
  return {pass, d.str()};
}

// Shared sample set for criteria 5 and 6.
const SampleSet& uniform_comb_samples() {
  static const SampleSet set =
      run_batch(testing::uniform_comb(1.0, 1.0, 60), {0.0, 0.0}, 100'000, with_workers(euler(5005, 1e4)));
  return set;
}

// 5. Passage-count bound.
Outcome passage_bound() {
  const SampleSet& set = uniform_comb_samples();
  const double theta = theta0(1.0).theta0;
  bool pass = true;
  std::ostringstream d;
  for (int j = 1; j <= 10; ++j) {
    const Stat f = fraction(set, [j](const ExitSample& e) { return e.passages > j; });
    const bool ok = f.value <= std::pow(theta, j) + 3.0 * f.se;
    pass = pass && ok;
    d << "j=" << j << ":" << fmt(f.value, 3) << "<=" << fmt(std::pow(theta, j), 3) << (ok ? "" : "(!)") << " ";
  }
  return {pass, d.str() + "(1e5 trajectories)"};
}

// 6. Empirical moment roots against the certified bound.
Outcome bound_consistency() {
  const SampleSet& set = uniform_comb_samples();
  const CombDomain comb = testing::uniform_comb(1.0, 1.0, 60);
  bool pass = true;
  std::ostringstream d;
  for (double p : {1.0, 2.0}) {
    const Verdict v = check_theorem1(comb, p);
    const MomentEstimate m = estimate_moment(set, p);
    const bool ok = v.status == VerdictStatus::FiniteCertified &&
                    m.root - 3.0 * m.root_standard_error <= v.bound_on_moment_root;
    pass = pass && ok;
    d << "p=" << p << " empirical root " << fmt(m.root) << "+-" << fmt(m.root_standard_error, 2) << " <= bound "
      << fmt(v.bound_on_moment_root) << " (with strip factor " << fmt(v.bound_with_strip_factor) << ")  ";
  }
  return {pass, d.str()};
}

CombDomain geometric(double r) { return build_comb(CombSpec{GeometricGenerator{r, 1.0, 1.0}, 30, false}); }

// 7. Geometric threshold.
Outcome geometric_threshold_match() {
  const bool certified = check_theorem1(geometric(1.1), 1.0).status == VerdictStatus::FiniteCertified;
  const bool declined = check_theorem1(geometric(1.2), 1.0).status == VerdictStatus::Inconclusive;
  bool sweep = true;
  int cases = 0;
  for (double p : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    const double rc = std::pow(4.0 / 3.0, 1.0 / (2.0 * p));
    for (double f : {0.9, 0.99, 0.9999, 1.0001, 1.01, 1.1}) {
      const double r = rc * f;
      if (r <= 1.0) continue;
      const bool expect = r < rc;
      const bool refined = check_refined_unit(geometric(r), p).status == VerdictStatus::FiniteCertified;
      const bool theorem = check_theorem1(geometric(r), p).status == VerdictStatus::FiniteCertified;
      sweep = sweep && refined == expect && theorem == expect;
      ++cases;
    }
  }
  return {certified && declined && sweep,
          std::string("r=1.1 ") + (certified ? "certified" : "NOT certified") + ", r=1.2 " +
              (declined ? "declined" : "NOT declined") + "; threshold (4/3)^(1/(2p)) reproduced on " +
              std::to_string(cases) + " (r,p) cases: " + (sweep ? "yes" : "no")};
}

// 8. Tail calibration on wedges, half-plane and a single slit.
Outcome tail_calibration() {
  struct Case {
    std::string name;
    SimDomain domain;
    Point start;
    double target;
    double tol;
  };
  const double q = std::numbers::pi / 4.0;
  const std::vector<Case> cases{
      {"wedge(pi/2)", Wedge{2.0 * q}, testing::wedge_start(2.0 * q), 1.0, 0.15},
      {"wedge(pi/4)", Wedge{q}, testing::wedge_start(q), 2.0, 0.3},
      {"single slit", testing::explicit_comb({{0.0, 1.0}}), {-1.0, 0.0}, 0.5, 0.1},
      {"half-plane", HalfPlane{}, {1.0, 0.0}, 0.5, 0.1},
  };
  bool pass = true;
  std::ostringstream d;
  int seed = 8000;
  for (const Case& c : cases) {
    const SampleSet set = run_batch(c.domain, c.start, 1'000'000, with_workers(wos(++seed, 1e12)));
    const TailDiagnostic hill = tail_index(set);
    TailOptions lo;
    lo.method = TailMethod::LogLogFit;
    const TailDiagnostic fit = tail_index(set, lo);
    const bool ok = std::abs(hill.H_hat - c.target) <= c.tol;
    pass = pass && ok;
    d << c.name << " H=" << fmt(hill.H_hat, 4) << " [" << fmt(hill.ci_lo, 4) << "," << fmt(hill.ci_hi, 4)
      << "] target " << c.target << "+-" << c.tol << " (loglog " << fmt(fit.H_hat, 4) << ")  ";
  }
  return {pass, d.str() + "(Hill, 1e6 wos_time samples each)"};
}

// 9. Coupling properties.
Outcome coupling_properties() {
  std::ostringstream d;
  // Exit height grows with |y|: strip between two full lines, start (x1, y).
  const CombDomain strip = testing::explicit_comb({{0.0, 0.0}, {2.0, 0.0}});
  bool monotone = true;
  Stat previous{-1.0, 0.0};
  for (double beta : {0.5, 1.0, 2.0}) {
    previous = {-1.0, 0.0};
    d << "beta=" << beta << ":";
    for (double y : {0.0, 0.5 * beta, 0.9 * beta}) {
      const SampleSet set = run_batch(strip, {1.0, y}, 100'000, with_workers(euler(9001)));
      const Stat f = fraction(set, [&](const ExitSample& e) { return std::abs(e.exit_point.v) >= beta; });
      if (previous.value >= 0.0) monotone = monotone && f.value - previous.value >= -3.0 * std::hypot(f.se, previous.se);
      d << " " << fmt(f.value, 4);
      previous = f;
    }
    d << "; ";
  }
  // P_center(|Im| >= beta) >= rect_exit_tb_prob(1, beta) / 2.
  bool rect_bound = true;
  for (double beta : {0.5, 1.0, 2.0}) {
    const SampleSet set = run_batch(VerticalStrip{-1.0, 1.0}, {0.0, 0.0}, 100'000, with_workers(euler(9100)));
    const Stat f = fraction(set, [&](const ExitSample& e) { return std::abs(e.exit_point.v) >= beta; });
    const double half_rect = 0.5 * rect_exit_tb_prob(1.0, beta).value;
    rect_bound = rect_bound && f.value + 3.0 * f.se >= half_rect;
    d << "rect bound beta=" << beta << " " << fmt(f.value, 4) << ">=" << fmt(half_rect, 4) << " ";
  }
  return {monotone && rect_bound, std::string("monotone in |y| ") + (monotone ? "ok" : "violated") + ", rectangle lower bound " +
                                (rect_bound ? "ok" : "violated") + " | " + d.str()};
}

// 10. Engine cross-validation and discretization refinement.
Outcome engine_crossval() {
  struct Fixture {
    std::string name;
    SimDomain domain;
    std::vector<double> grid;
  };
  const std::vector<Fixture> fixtures{
      {"strip", VerticalStrip{-1.0, 1.0}, {0.05, 0.1, 0.2, 0.4, 0.7, 1.0, 1.5, 2.0, 3.0}},
      {"rectangle", Rectangle{1.0, 1.0}, {0.05, 0.1, 0.2, 0.3, 0.5, 0.8, 1.2, 2.0}},
  };
  bool pass = true;
  std::ostringstream d;
  for (const Fixture& f : fixtures) {
    const SampleSet a = run_batch(f.domain, {0.0, 0.0}, 200'000, with_workers(euler(10001)));
    const SampleSet b = run_batch(f.domain, {0.0, 0.0}, 200'000, with_workers(wos(10002)));
    const SurvivalComparison c = compare_survival(a, b, f.grid, 0.99);
    pass = pass && c.agree;
    d << f.name << " band max|z|=" << fmt(c.max_abs_z, 3) << " crit " << fmt(c.critical, 3)
      << (c.agree ? " agree" : " DISAGREE") << "; gaps:";

    // Coarse-to-fine ladder: both discretizations refined together.
    const double scale = domain_scale(f.domain);
    std::vector<Stat> gaps;
    for (int level = 0; level < 4; ++level) {
      SimParams eb = euler(10100 + level);
      eb.step_h = scale * scale / 4.0 / std::pow(2.0, level);
      SimParams ws = wos(10200 + level);
      ws.shell_eps = 0.08 * scale / std::pow(2.0, level);
      const Stat ma = mean_tau(run_batch(f.domain, {0.0, 0.0}, 200'000, with_workers(eb)));
      const Stat mb = mean_tau(run_batch(f.domain, {0.0, 0.0}, 200'000, with_workers(ws)));
      gaps.push_back({std::abs(ma.value - mb.value), std::hypot(ma.se, mb.se)});
      d << " " << fmt(gaps.back().value, 3);
    }
    for (std::size_t i = 1; i < gaps.size(); ++i) {
      const bool closer = gaps[i].value <= gaps[i - 1].value + 2.0 * gaps[i].se;
      pass = pass && closer;
    }
    d << "; ";
  }
  return {pass, d.str() + "(2e5 samples per engine and level)"};
}

std::string trace_text(const std::vector<AdversarialTrace>& trace) {
  std::ostringstream os;
  for (const AdversarialTrace& t : trace) {
    os << "[stage " << t.stage << " x=" << t.abscissa << " lower " << fmt(t.lower_bound, 4) << " > " << t.threshold
       << "] ";
  }
  return os.str();
}

bool same_trace(const std::vector<AdversarialTrace>& a, const std::vector<AdversarialTrace>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::bit_cast<std::uint64_t>(a[i].mean) != std::bit_cast<std::uint64_t>(b[i].mean) ||
        std::bit_cast<std::uint64_t>(a[i].standard_error) != std::bit_cast<std::uint64_t>(b[i].standard_error) ||
        a[i].abscissa != b[i].abscissa || a[i].samples_used != b[i].samples_used) {
      return false;
    }
  }
  return true;
}

// 11. Adversarial construction with N = 3.
Outcome adversarial() {
  AdversarialOptions opt;
  opt.stages = 3;
  opt.params.master_seed = 11011;
  opt.params.workers = workers();
  auto attempt = [&](std::vector<AdversarialTrace>& trace, std::string& why) {
    try {
      trace = build_adversarial(opt).trace;
      return true;
    } catch (const BudgetExhausted& e) {
      trace = e.partial_trace();
      why = e.what();
      return false;
    }
  };
  std::vector<AdversarialTrace> first, second;
  std::string why_first, why_second;
  const bool done = attempt(first, why_first);
  attempt(second, why_second);
  const bool identical = same_trace(first, second) && why_first == why_second;
  bool exceeded = done && first.size() == 3;
  for (const AdversarialTrace& t : first) exceeded = exceeded && t.lower_bound > t.threshold;
  std::string d = "trace " + trace_text(first) + "; rerun " + (identical ? "bit-identical" : "DIFFERS");
  if (!done) d += "; " + why_first;
  return {exceeded && identical, d};
}

// 12. Determinism across worker counts.
Outcome determinism() {
  struct Case {
    SimDomain domain;
    Point start;
    SimParams params;
  };
  const std::vector<Case> cases{
      {testing::uniform_comb(), {0.5, 0.2}, euler(12001, 1e4)},
      {Wedge{1.0}, testing::wedge_start(1.0), wos(12002, 1e12)},
      {Rectangle{2.0, 1.0}, {0.3, -0.1}, euler(12003)},
      {testing::explicit_comb({{0.0, 1.0}, {2.0, 1.0}}), {1.0, 0.0}, wos(12004, 1e8)},
  };
  bool pass = true;
  int compared = 0;
  for (const Case& c : cases) {
    std::string reference;
    for (int w : {1, 2, 3, 8}) {
      SimParams p = c.params;
      p.workers = w;
      const std::string csv = samples_to_csv(run_batch(c.domain, c.start, 4000, p));
      if (reference.empty()) {
        reference = csv;
      } else {
        pass = pass && csv == reference;
        ++compared;
      }
    }
  }
  return {pass, std::to_string(compared) + " reruns with workers in {2,3,8} compared byte-for-byte to workers=1"};
}

}  // namespace
}  // namespace comblab::acceptance

int main() {
  using namespace comblab::acceptance;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"theta0 exactness", theta0_exactness},
      {"strip moment oracles", strip_moments},
      {"rectangle harmonic measure", rectangle_measure},
      {"scaling law", scaling_law},
      {"passage-count bound", passage_bound},
      {"theorem bound consistency", bound_consistency},
      {"geometric threshold", geometric_threshold_match},
      {"tail calibration", tail_calibration},
      {"coupling properties", coupling_properties},
      {"engine cross-validation", engine_crossval},
      {"adversarial construction", adversarial},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failed;
    std::printf("%s %2zu %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%zu of %zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}

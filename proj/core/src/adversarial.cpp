#include "comblab/adversarial.hpp"

#include <cmath>
#include <sstream>

#include "comblab/error.hpp"
#include "comblab/estimators.hpp"

namespace comblab {

CombDomain adversarial_stage_domain(const std::vector<double>& inner, double outer) {
  ExplicitSlits slits;
  slits.slits.emplace_back(0.0, 0.0);
  for (double x : inner) slits.slits.emplace_back(x, 1.0);
  slits.slits.emplace_back(outer, 0.0);
  return build_comb(CombSpec{slits, 1, false});
}

CombDomain adversarial_comb(const std::vector<double>& abscissas) {
  ExplicitSlits slits;
  slits.slits.emplace_back(0.0, 1.0);
  for (double x : abscissas) slits.slits.emplace_back(x, 1.0);
  return build_comb(CombSpec{slits, 1, true});
}

AdversarialTrace estimate_stage(const CombDomain& domain, int stage, const AdversarialOptions& options) {
  const SampleSet set =
      run_batch(domain, Point{options.start_u, 0.0}, options.samples_per_candidate, options.params);
  const MomentEstimate m = estimate_moment(set, 0.5);
  AdversarialTrace t;
  t.stage = stage;
  t.abscissa = domain.xs().back();
  t.threshold = stage;
  t.mean = m.point_estimate;
  t.standard_error = m.standard_error;
  t.lower_bound = m.point_estimate - 3.0 * m.standard_error;
  t.samples_used = set.size();
  return t;
}

AdversarialResult build_adversarial(const AdversarialOptions& options) {
  if (options.stages < 1) throw ValidationError("build_adversarial: stages must be >= 1");
  if (options.samples_per_candidate < 2) {
    throw ValidationError("build_adversarial: samples_per_candidate must be >= 2");
  }
  if (!(options.start_u > 0.0)) throw ValidationError("build_adversarial: start must lie right of the wall");
  if (std::sqrt(options.params.time_cap) <= options.stages) {
    std::ostringstream os;
    os << "build_adversarial: time_cap=" << options.params.time_cap
       << " is too small; sqrt(time_cap) must exceed the final threshold " << options.stages;
    throw ValidationError(os.str());
  }

  std::vector<double> accepted;
  std::vector<AdversarialTrace> trace;
  std::size_t used = 0;
  for (int n = 1; n <= options.stages; ++n) {
    const double base = std::max(accepted.empty() ? 0.0 : accepted.back(), options.start_u);
    double increment = 1.0;
    bool done = false;
    for (int it = 1; it <= options.max_iterations_per_stage; ++it, increment *= 2.0) {
      if (used + options.samples_per_candidate > options.sample_budget) {
        std::ostringstream os;
        os << "build_adversarial: sample budget " << options.sample_budget << " exhausted at stage " << n
           << " after " << it - 1 << " candidates";
        throw BudgetExhausted(os.str(), trace);
      }
      const CombDomain domain = adversarial_stage_domain(accepted, base + increment);
      AdversarialTrace t = estimate_stage(domain, n, options);
      used += t.samples_used;
      if (t.lower_bound > n) {
        t.search_iterations = it;
        accepted.push_back(t.abscissa);
        trace.push_back(t);
        done = true;
        break;
      }
    }
    if (!done) {
      std::ostringstream os;
      os << "build_adversarial: stage " << n << " threshold not reached within "
         << options.max_iterations_per_stage << " doubling steps";
      throw BudgetExhausted(os.str(), trace);
    }
  }
  return {adversarial_comb(accepted), std::move(trace)};
}

}  // namespace comblab

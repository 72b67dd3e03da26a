#pragma once

// Stagewise construction of a one-sided comb whose exit time from 1 has an
// unbounded square-root moment.
//
// Stage n works in U_n: the strip 0 < u < x_n (walls at 0 and x_n) minus
// unit slits at x_1, ..., x_{n-1}. A candidate x_n is accepted once
//   mean(min(tau, cap)^(1/2)) - 3 * stderr > n
// for walks started at (1, 0). Censoring only lowers the estimate, so an
// accepted stage is a conservative statistical certificate. Candidates are
// x_{n-1} + 1, + 2, + 4, ... and all reuse the same master seed.

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "comblab/comb.hpp"
#include "comblab/engine.hpp"

namespace comblab {

struct AdversarialTrace {
  int stage = 0;
  double abscissa = 0.0;        // accepted x_n
  double threshold = 0.0;       // n
  double mean = 0.0;            // mean of min(tau, cap)^(1/2)
  double standard_error = 0.0;
  double lower_bound = 0.0;     // mean - 3 * standard_error
  std::size_t samples_used = 0;
  int search_iterations = 0;
};

struct AdversarialOptions {
  int stages = 3;
  std::size_t samples_per_candidate = 4000;
  std::size_t sample_budget = 2'000'000;  // over all stages and candidates
  int max_iterations_per_stage = 40;
  double start_u = 1.0;
  SimParams params = default_adversarial_params();

  static SimParams default_adversarial_params() {
    SimParams p;
    p.engine = EngineKind::WosTime;
    p.shell_eps = 1e-4;
    p.time_cap = 1e12;
    return p;
  }
};

/// Stage-n domain: walls at 0 and `outer`, unit slits at `inner`.
CombDomain adversarial_stage_domain(const std::vector<double>& inner, double outer);

/// The emitted comb: wall at 0 (one-sided origin) and unit slits at every
/// accepted abscissa.
CombDomain adversarial_comb(const std::vector<double>& abscissas);

struct AdversarialResult {
  CombDomain comb;
  std::vector<AdversarialTrace> trace;
};

class BudgetExhausted : public std::runtime_error {
 public:
  BudgetExhausted(const std::string& what, std::vector<AdversarialTrace> partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const std::vector<AdversarialTrace>& partial_trace() const noexcept { return partial_; }

 private:
  std::vector<AdversarialTrace> partial_;
};

/// Throws BudgetExhausted (with the completed stages) when the sample budget
/// or the per-stage iteration limit runs out, and ValidationError when the
/// time cap makes a threshold unreachable.
AdversarialResult build_adversarial(const AdversarialOptions& options);

/// Lower-bound estimate for one candidate domain, as used by the search.
AdversarialTrace estimate_stage(const CombDomain& domain, int stage, const AdversarialOptions& options);

}  // namespace comblab

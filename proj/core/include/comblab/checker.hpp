#pragma once

// Sufficient-condition checker for finiteness of E[tau^p] on comb domains.
//
// With q = theta0^(1/p) the moment root obeys
//   E[tau^p]^(1/p) <= sum_{j>=0} q^j M_{j+1},
// and the convergence condition is that sum_{j>=1} M_j q^j is finite. The
// two sums differ by an index shift and one factor of q, so they converge
// together; the bound uses the first form, the test the second.
//
// The checker never reports an infinite moment: the condition is only
// sufficient.

#include <optional>
#include <string>

#include "comblab/analytic.hpp"
#include "comblab/comb.hpp"

namespace comblab {

enum class VerdictStatus { FiniteCertified, Inconclusive };

std::string to_string(VerdictStatus status);

/// Which growth model to use for M_j. Auto takes the generator's class;
/// Table forces the windowed ratio test.
enum class GrowthChoice { Auto, Bounded, Polynomial, Geometric, Table };

GrowthChoice parse_growth_choice(const std::string& name);

struct CheckOptions {
  GrowthChoice growth = GrowthChoice::Auto;
  int ratio_start = 0;       // J0 of the table ratio test; 0 picks max(1, J/2)
  double safety_margin = 0.05;
  SeriesParams series;
};

struct Verdict {
  VerdictStatus status = VerdictStatus::Inconclusive;
  double p = 0.0;
  double ell = 0.0;
  double theta0_used = 0.0;
  double ratio = 0.0;                 // q = theta0^(1/p)
  double bound_on_moment_root = 0.0;  // +inf unless certified
  /// E_0[tau_(-1,1)^p]^(1/p); the strip-moment factor carried by each summand.
  double strip_factor = 0.0;
  /// strip_factor * bound_on_moment_root.
  double bound_with_strip_factor = 0.0;
  std::string growth_class_used;
  std::string reason;
  int terms_summed = 0;
};

Verdict check_theorem1(const CombDomain& comb, double p, const CheckOptions& options = {});

/// Variant for unit heights and gaps >= 1, where theta0 is replaced by 3/4.
/// Throws ValidationError when those preconditions fail.
Verdict check_refined_unit(const CombDomain& comb, double p, const CheckOptions& options = {});

/// (1/theta)^(1/(2p)): the largest geometric gap ratio certifiable at p.
double geometric_threshold(double p, double theta);

}  // namespace comblab

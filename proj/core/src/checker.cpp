#include "comblab/checker.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "comblab/error.hpp"

namespace comblab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

const char* kSlitRemovalHint =
    " Removing slits from the complement can only increase moments, so a sub-comb with "
    "finite ell satisfying the condition would still certify.";

// Resolves the requested growth model against the comb's generator.
GrowthClass resolve_growth(const CombDomain& comb, GrowthChoice choice) {
  const GrowthClass& native = comb.growth();
  if (choice == GrowthChoice::Auto) return native;
  if (choice == GrowthChoice::Table) return TableGrowth{};
  const bool ok = std::visit(
      overloaded{
          [&](const BoundedGrowth&) {
            return choice == GrowthChoice::Bounded || choice == GrowthChoice::Polynomial;
          },
          [&](const PolynomialGrowth& g) {
            return choice == GrowthChoice::Polynomial ||
                   (choice == GrowthChoice::Bounded && g.degree == 0);
          },
          [&](const GeometricGrowth&) { return choice == GrowthChoice::Geometric; },
          [&](const TableGrowth&) { return false; },
      },
      native);
  if (!ok) {
    throw ValidationError("declared growth class '" + std::string(growth_tag(native)) +
                          "' of the comb cannot be replaced by the requested class");
  }
  if (choice == GrowthChoice::Polynomial) {
    if (const auto* b = std::get_if<BoundedGrowth>(&native)) {
      return PolynomialGrowth{std::sqrt(b->sup), 0};
    }
  }
  if (choice == GrowthChoice::Bounded) {
    if (const auto* g = std::get_if<PolynomialGrowth>(&native)) {
      return BoundedGrowth{g->coefficient * g->coefficient};
    }
  }
  return native;
}

struct SeriesCheck {
  bool converges = false;
  double bound = kInf;
  int terms = 0;
  std::string reason;
};

// sum_{j>=0} q^j M(j+1) for a closed-form M, with a geometric tail bound
// once sup_{j>=K} M(j+2)/M(j+1) * q < 1.
SeriesCheck sum_closed_form(const GrowthClass& growth, double q, double log_q) {
  SeriesCheck out;
  auto tail_ratio = overloaded{
      [](const BoundedGrowth&, int) { return 1.0; },
      [](const PolynomialGrowth& g, int K) {
        return std::pow((K + 2.0) / (K + 1.0), 2.0 * g.degree);
      },
      [](const GeometricGrowth& g, int) { return g.ratio * g.ratio; },
      [](const TableGrowth&, int) { return kInf; },
  };

  if (const auto* g = std::get_if<GeometricGrowth>(&growth)) {
    const double r2q = g->ratio * g->ratio * q;
    if (!(r2q < 1.0)) {
      std::ostringstream os;
      os << "geometric gap ratio r=" << g->ratio << " gives r^2 * theta0^(1/p) = " << r2q
         << " >= 1; the series is not shown to converge.";
      out.reason = os.str();
      return out;
    }
  }

  double sum = 0.0;
  double q_pow = 1.0;
  constexpr int kMaxTerms = 1'000'000;
  for (int K = 0; K < kMaxTerms; ++K) {
    const double rho = std::visit([&](const auto& g) { return tail_ratio(g, K); }, growth);
    if (rho * q < 1.0 && K > 0) {
      // remainder sum_{j>=K} q^j M(j+1) <= q^K M(K+1) / (1 - rho q)
      const double head = q_pow * growth_prefix_max(growth, K + 1);
      out.converges = true;
      out.bound = sum + head / (1.0 - rho * q);
      out.terms = K;
      return out;
    }
    sum += q_pow * growth_prefix_max(growth, K + 1);
    q_pow = std::exp(log_q * (K + 1));
  }
  out.reason = "partial sums did not reach a certifiable tail within the term budget.";
  return out;
}

SeriesCheck sum_table(const CombDomain& comb, double q, const CheckOptions& options) {
  SeriesCheck out;
  const auto M = comb.prefix_maxes();
  const int J = static_cast<int>(M.size());
  if (J < 2) {
    out.reason = "window too small for the eventual-ratio test (need J >= 2).";
    return out;
  }
  const int j0 = options.ratio_start > 0 ? options.ratio_start : std::max(1, J / 2);
  if (j0 >= J) {
    out.reason = "ratio_start must be below the window radius.";
    return out;
  }
  double rho = 0.0;
  for (int j = j0; j < J; ++j) rho = std::max(rho, M[j] / M[j - 1]);  // M_{j+1}/M_j
  if (!(rho * q <= 1.0 - options.safety_margin)) {
    std::ostringstream os;
    os << "windowed ratio bound rho=" << rho << " over j>=" << j0
       << " gives rho * theta0^(1/p) = " << rho * q << " > 1 - delta = "
       << 1.0 - options.safety_margin << "; gaps grow too fast to certify.";
    out.reason = os.str();
    return out;
  }
  double sum = 0.0;
  double q_pow = 1.0;
  for (int j = 0; j < J; ++j) {
    sum += q_pow * M[j];
    q_pow *= q;
  }
  // Extrapolate M_{j+1} <= M_J rho^(j+1-J) beyond the window.
  out.converges = true;
  out.bound = sum + q_pow * M[J - 1] * rho / (1.0 - rho * q);
  out.terms = J;
  return out;
}

Verdict run_check(const CombDomain& comb, double p, double theta, double log_theta,
                  const CheckOptions& options) {
  Verdict v;
  v.p = p;
  v.ell = comb.ell();
  v.theta0_used = theta;
  v.strip_factor = std::pow(strip_moment(p, options.series).value, 1.0 / p);
  v.bound_on_moment_root = kInf;
  v.bound_with_strip_factor = kInf;

  const GrowthClass growth = resolve_growth(comb, options.growth);
  v.growth_class_used = growth_tag(growth);

  const double log_q = log_theta / p;
  const double q = std::exp(log_q);
  v.ratio = q;
  if (!(q < 1.0)) {
    v.reason = "theta0^(1/p) rounds to 1 in double precision; nothing can be certified.";
    return v;
  }

  const SeriesCheck s = std::holds_alternative<TableGrowth>(growth)
                            ? sum_table(comb, q, options)
                            : sum_closed_form(growth, q, log_q);
  v.terms_summed = s.terms;
  if (!s.converges) {
    v.reason = s.reason + kSlitRemovalHint;
    return v;
  }
  v.status = VerdictStatus::FiniteCertified;
  v.bound_on_moment_root = s.bound;
  v.bound_with_strip_factor = s.bound * v.strip_factor;
  std::ostringstream os;
  os << "sum of M_j theta0^(j/p) converges under " << v.growth_class_used
     << " growth (theta0^(1/p) = " << q << ")";
  if (std::holds_alternative<TableGrowth>(growth)) {
    os << "; tail extrapolated from the windowed ratio test";
  }
  os << ".";
  v.reason = os.str();
  return v;
}

void check_common(const CombDomain& comb, double p) {
  if (!(p > 0.0) || !std::isfinite(p)) throw ValidationError("p must be positive");
  if (comb.prefix_maxes().empty()) throw ValidationError("empty window: comb has no gaps");
}

}  // namespace

std::string to_string(VerdictStatus status) {
  return status == VerdictStatus::FiniteCertified ? "FiniteCertified" : "Inconclusive";
}

GrowthChoice parse_growth_choice(const std::string& name) {
  if (name == "auto") return GrowthChoice::Auto;
  if (name == "bounded") return GrowthChoice::Bounded;
  if (name == "polynomial") return GrowthChoice::Polynomial;
  if (name == "geometric") return GrowthChoice::Geometric;
  if (name == "table") return GrowthChoice::Table;
  throw ValidationError("unknown growth class '" + name + "'");
}

Verdict check_theorem1(const CombDomain& comb, double p, const CheckOptions& options) {
  check_common(comb, p);

  Verdict inconclusive;
  inconclusive.p = p;
  inconclusive.ell = comb.ell();
  inconclusive.bound_on_moment_root = kInf;
  inconclusive.bound_with_strip_factor = kInf;
  inconclusive.growth_class_used = growth_tag(resolve_growth(comb, options.growth));
  inconclusive.strip_factor = std::pow(strip_moment(p, options.series).value, 1.0 / p);

  if (!comb.truncated() && !comb.enclosed()) {
    inconclusive.reason =
        "explicit finite slit family without walls at both ends contains a half-plane; "
        "the sufficient condition applies to infinite slit sequences.";
    return inconclusive;
  }
  if (!std::isfinite(comb.ell())) {
    inconclusive.reason = std::string("ell infinite.") + kSlitRemovalHint;
    return inconclusive;
  }
  if (comb.ell() == 0.0) {
    inconclusive.reason = "ell is zero (all neighbouring heights vanish); the hypothesis degenerates.";
    return inconclusive;
  }
  const Theta0Result t = theta0(comb.ell(), options.series);
  // log theta0 = log1p(-(1 - theta0)) keeps precision when theta0 is near 1
  return run_check(comb, p, t.theta0, std::log1p(-t.complement()), options);
}

Verdict check_refined_unit(const CombDomain& comb, double p, const CheckOptions& options) {
  check_common(comb, p);
  for (double b : comb.heights()) {
    if (b != 1.0) throw ValidationError("refined proposition inapplicable: heights must all be 1");
  }
  if (!(comb.min_gap() >= 1.0)) {
    throw ValidationError("refined proposition inapplicable: gaps must be >= 1");
  }
  if (!comb.truncated()) {
    Verdict v;
    v.p = p;
    v.ell = comb.ell();
    v.theta0_used = 0.75;
    v.bound_on_moment_root = kInf;
    v.bound_with_strip_factor = kInf;
    v.strip_factor = std::pow(strip_moment(p, options.series).value, 1.0 / p);
    v.growth_class_used = growth_tag(resolve_growth(comb, options.growth));
    v.reason =
        "explicit finite slit family contains a half-plane; the refined condition applies to "
        "infinite slit sequences.";
    return v;
  }
  return run_check(comb, p, 0.75, std::log(0.75), options);
}

double geometric_threshold(double p, double theta) {
  if (!(p > 0.0)) throw ValidationError("geometric_threshold: p must be positive");
  if (!(theta > 0.0 && theta < 1.0)) {
    throw ValidationError("geometric_threshold: theta must lie in (0, 1)");
  }
  return std::pow(1.0 / theta, 1.0 / (2.0 * p));
}

}  // namespace comblab

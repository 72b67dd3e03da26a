#include "comblab/comb.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "comblab/error.hpp"

namespace comblab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

void require_height(double b) {
  require(std::isfinite(b), "non-finite height");
  require(b >= 0.0, "negative height");
}

double extend(const std::vector<double>& table, std::size_t i, Extension rule) {
  if (i < table.size()) return table[i];
  if (rule == Extension::Periodic) return table[i % table.size()];
  return table.back();
}

struct Materialized {
  std::vector<double> xs;
  std::vector<double> bs;
  std::size_t origin = 0;
  bool truncated = true;
  GrowthClass growth = TableGrowth{};
  double closed_form_ell = std::numeric_limits<double>::quiet_NaN();
};

// Mirror gaps g(1..J) and heights h(0..J) around the origin.
Materialized mirror(int radius, bool one_sided, auto gap_of, auto height_of) {
  Materialized m;
  std::vector<double> right{0.0};
  for (int n = 1; n <= radius; ++n) right.push_back(right.back() + gap_of(n));
  if (!one_sided) {
    for (int n = radius; n >= 1; --n) {
      m.xs.push_back(-right[n]);
      m.bs.push_back(height_of(n));
    }
  }
  m.origin = m.xs.size();
  for (int n = 0; n <= radius; ++n) {
    m.xs.push_back(right[n]);
    m.bs.push_back(height_of(n));
  }
  return m;
}

Materialized materialize(const CombSpec& spec) {
  const int J = spec.window_radius;
  return std::visit(
      overloaded{
          [&](const ExplicitSlits& g) {
            require(!g.slits.empty(), "empty window");
            Materialized m;
            m.truncated = false;
            bool has_origin = false;
            for (std::size_t i = 0; i < g.slits.size(); ++i) {
              const auto [x, b] = g.slits[i];
              require(std::isfinite(x), "non-finite abscissa");
              require_height(b);
              if (i > 0) {
                require(x != g.slits[i - 1].first, "zero gap");
                require(x > g.slits[i - 1].first, "non-increasing abscissas");
              }
              if (x == 0.0) {
                has_origin = true;
                m.origin = i;
              }
              m.xs.push_back(x);
              m.bs.push_back(b);
            }
            require(has_origin, "explicit slits must include x0 = 0");
            require(!spec.one_sided || m.origin == 0,
                    "one-sided explicit comb must not have negative abscissas");
            return m;
          },
          [&](const UniformGenerator& g) {
            require(g.spacing > 0.0 && std::isfinite(g.spacing), "spacing must be positive");
            require_height(g.height);
            Materialized m = mirror(J, spec.one_sided, [&](int) { return g.spacing; },
                                    [&](int) { return g.height; });
            m.growth = BoundedGrowth{g.spacing * g.spacing};
            m.closed_form_ell = g.height / g.spacing;
            return m;
          },
          [&](const PolynomialGenerator& g) {
            require(g.degree >= 0, "polynomial degree must be >= 0");
            require(g.coefficient > 0.0 && std::isfinite(g.coefficient),
                    "polynomial coefficient must be positive");
            require_height(g.height);
            Materialized m = mirror(
                J, spec.one_sided,
                [&](int n) { return g.coefficient * std::pow(static_cast<double>(n), g.degree); },
                [&](int) { return g.height; });
            m.growth = PolynomialGrowth{g.coefficient, g.degree};
            // gaps are nondecreasing in |n|, so min(a_n, a_{n+1}) is smallest at a_1
            m.closed_form_ell = g.height / g.coefficient;
            return m;
          },
          [&](const GeometricGenerator& g) {
            require(g.ratio > 1.0 && std::isfinite(g.ratio), "geometric ratio must be > 1");
            require(g.scale > 0.0 && std::isfinite(g.scale), "geometric scale must be positive");
            require_height(g.height);
            Materialized m = mirror(
                J, spec.one_sided, [&](int n) { return g.scale * std::pow(g.ratio, n - 1); },
                [&](int) { return g.height; });
            m.growth = GeometricGrowth{g.ratio, g.scale};
            m.closed_form_ell = g.height / g.scale;
            return m;
          },
          [&](const CustomGenerator& g) {
            require(!g.gaps.empty(), "custom generator needs at least one gap");
            require(!g.heights.empty(), "custom generator needs at least one height");
            for (double a : g.gaps) {
              require(std::isfinite(a), "non-finite gap");
              require(a != 0.0, "zero gap");
              require(a > 0.0, "non-increasing abscissas");
            }
            for (double b : g.heights) require_height(b);
            return mirror(
                J, spec.one_sided,
                [&](int n) { return extend(g.gaps, static_cast<std::size_t>(n - 1), g.extension); },
                [&](int n) { return extend(g.heights, static_cast<std::size_t>(n), g.extension); });
          },
      },
      spec.generator);
}

// Definitional sup of max(b_{n-1}, b_{n+1}) / min(a_n, a_{n+1}) over the
// indices whose neighbours are materialized.
double window_ell(const std::vector<double>& xs, const std::vector<double>& bs) {
  double ell = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < xs.size(); ++i) {
    const double num = std::max(bs[i - 1], bs[i + 1]);
    const double den = std::min(xs[i] - xs[i - 1], xs[i + 1] - xs[i]);
    ell = std::max(ell, num / den);
  }
  return ell;
}

}  // namespace

std::string growth_tag(const GrowthClass& growth) {
  return std::visit(overloaded{
                        [](const BoundedGrowth&) { return std::string("bounded"); },
                        [](const PolynomialGrowth&) { return std::string("polynomial"); },
                        [](const GeometricGrowth&) { return std::string("geometric"); },
                        [](const TableGrowth&) { return std::string("table"); },
                    },
                    growth);
}

double growth_prefix_max(const GrowthClass& growth, int j) {
  if (j < 1) throw ValidationError("prefix index must be >= 1");
  return std::visit(
      overloaded{
          [](const BoundedGrowth& g) { return g.sup; },
          [j](const PolynomialGrowth& g) {
            const double a = g.coefficient * std::pow(static_cast<double>(j), g.degree);
            return a * a;
          },
          [j](const GeometricGrowth& g) {
            const double a = g.first_gap * std::pow(g.ratio, j - 1);
            return a * a;
          },
          [](const TableGrowth&) -> double {
            throw ValidationError("table growth has no closed-form prefix maximum");
          },
      },
      growth);
}

std::size_t CombDomain::slot(int n) const {
  const long s = static_cast<long>(data_->origin) + n;
  if (s < 0 || s >= static_cast<long>(data_->xs.size())) {
    std::ostringstream os;
    os << "slit index " << n << " outside materialized window [" << first_index() << ", "
       << last_index() << "]";
    throw ValidationError(os.str());
  }
  return static_cast<std::size_t>(s);
}

double CombDomain::gap(int n) const {
  const std::size_t s = slot(n);
  if (s == 0) throw ValidationError("gap index below materialized window");
  return data_->xs[s] - data_->xs[s - 1];
}

double CombDomain::beta(int n) const { return std::max(height(n - 1), height(n + 1)); }

double CombDomain::prefix_max(int j) const {
  if (j < 1 || j > static_cast<int>(data_->prefix_max.size())) {
    std::ostringstream os;
    os << "window index j=" << j << " out of range [1, " << data_->prefix_max.size() << "]";
    throw ValidationError(os.str());
  }
  return data_->prefix_max[static_cast<std::size_t>(j - 1)];
}

bool CombDomain::enclosed() const noexcept {
  return data_->bs.front() == 0.0 && data_->bs.back() == 0.0 &&
         (data_->xs.size() > 1 || one_sided());
}

CombDomain build_comb(const CombSpec& spec) {
  if (!std::holds_alternative<ExplicitSlits>(spec.generator) && spec.window_radius < 1) {
    throw ValidationError("empty window: window_radius must be >= 1");
  }
  Materialized m = materialize(spec);

  auto d = std::make_shared<CombDomain::Data>();
  d->spec = spec;
  d->origin = m.origin;
  d->truncated = m.truncated;
  d->growth = m.growth;

  d->min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < m.xs.size(); ++i) {
    const double a = m.xs[i] - m.xs[i - 1];
    if (!(a > 0.0)) throw ValidationError("zero gap");
    d->min_gap = std::min(d->min_gap, a);
  }

  const int J = static_cast<int>(std::max(m.origin, m.xs.size() - 1 - m.origin));
  double running = 0.0;
  for (int j = 1; j <= J; ++j) {
    // gaps with both endpoints in x_{-j..j}
    const long lo = std::max(0L, static_cast<long>(m.origin) - j);
    const long hi = std::min(static_cast<long>(m.xs.size()) - 1, static_cast<long>(m.origin) + j);
    for (long i = lo + 1; i <= hi; ++i) {
      const double a = m.xs[i] - m.xs[i - 1];
      running = std::max(running, a * a);
    }
    d->prefix_max.push_back(running);
  }

  const double literal = window_ell(m.xs, m.bs);
  if (std::isfinite(m.closed_form_ell)) {
    d->ell = m.closed_form_ell;
  } else if (literal == -std::numeric_limits<double>::infinity()) {
    d->ell = std::numeric_limits<double>::infinity();
    d->notes.push_back("window has fewer than three abscissas; ell cannot be evaluated");
  } else {
    d->ell = literal;
    if (std::holds_alternative<CustomGenerator>(spec.generator)) {
      d->notes.push_back("ell computed over the materialized window only");
    }
  }
  if (d->ell == 0.0) {
    d->notes.push_back("ell is zero: every neighbouring height pair is zero");
  }

  d->xs = std::move(m.xs);
  d->bs = std::move(m.bs);
  return CombDomain(std::move(d));
}

CombDomain symmetrize(const CombDomain& one_sided) {
  if (!one_sided.one_sided()) throw ValidationError("symmetrize: input is already two-sided");
  CombSpec spec = one_sided.spec();
  spec.one_sided = false;
  if (auto* e = std::get_if<ExplicitSlits>(&spec.generator)) {
    std::vector<std::pair<double, double>> both;
    for (auto it = e->slits.rbegin(); it != e->slits.rend(); ++it) {
      if (it->first > 0.0) both.emplace_back(-it->first, it->second);
    }
    both.insert(both.end(), e->slits.begin(), e->slits.end());
    e->slits = std::move(both);
  }
  return build_comb(spec);
}

CombDomain restrict_one_sided(const CombDomain& two_sided) {
  if (two_sided.one_sided()) throw ValidationError("restrict_one_sided: input is already one-sided");
  CombSpec spec = two_sided.spec();
  spec.one_sided = true;
  if (auto* e = std::get_if<ExplicitSlits>(&spec.generator)) {
    std::erase_if(e->slits, [](const auto& s) { return s.first < 0.0; });
  }
  return build_comb(spec);
}

SlitWindow slit_window(const CombDomain& comb, int j) {
  SlitWindow w;
  w.max_gap_sq = comb.prefix_max(j);
  for (int n = std::max(-j, comb.first_index()); n <= std::min(j, comb.last_index()); ++n) {
    w.abscissas.push_back(comb.x(n));
  }
  for (std::size_t i = 1; i < w.abscissas.size(); ++i) {
    w.gaps.push_back(w.abscissas[i] - w.abscissas[i - 1]);
  }
  return w;
}

}  // namespace comblab

#pragma once

// Comb domains: the plane minus vertical slits {x_n} x ((-inf,-b_n] u [b_n,inf)).
//
// A comb is described by a CombSpec (a generator rule plus a window radius)
// and materialized into an immutable CombDomain holding the abscissas, the
// heights and the derived quantities used throughout the library: gaps
// a_n = x_n - x_{n-1}, the aspect ratio ell, and the prefix maxima
// M_j = max a_n^2 over the gaps inside x_{-j..j}.
//
// Indexing is relative to the slit at the origin: x(0) == 0 always.

#include <algorithm>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace comblab {

struct Point {
  double u = 0.0;
  double v = 0.0;
};

/// A literal finite family of slits given as (x, b) pairs. Heights of zero
/// encode full vertical lines (walls). The domain is exactly the plane minus
/// these slits; nothing is extrapolated beyond the outermost pair.
struct ExplicitSlits {
  std::vector<std::pair<double, double>> slits;
};

/// x_n = n * spacing, b_n = height.
struct UniformGenerator {
  double spacing = 1.0;
  double height = 1.0;
};

/// Gaps a_n = coefficient * |n|^degree for n >= 1, mirrored for n <= 0.
struct PolynomialGenerator {
  int degree = 1;
  double coefficient = 1.0;
  double height = 1.0;
};

/// Gaps a_n = scale * ratio^(n-1) for n >= 1, mirrored, so that
/// x_n = sign(n) * scale * (ratio^|n| - 1) / (ratio - 1).
struct GeometricGenerator {
  double ratio = 2.0;
  double height = 1.0;
  double scale = 1.0;
};

enum class Extension { RepeatLast, Periodic };

/// Tabulated gaps g_1..g_m (for n >= 1, mirrored) and heights h_0..h_k,
/// extended beyond the table by `extension`.
struct CustomGenerator {
  std::vector<double> gaps;
  std::vector<double> heights;
  Extension extension = Extension::RepeatLast;
};

using CombGenerator = std::variant<ExplicitSlits, UniformGenerator, PolynomialGenerator,
                                   GeometricGenerator, CustomGenerator>;

struct CombSpec {
  CombGenerator generator = UniformGenerator{};
  int window_radius = 1;
  bool one_sided = false;
};

// Growth of the prefix maxima M_j, declared by the generator. Closed forms
// are what let a finite window stand in for the infinite sequence.
struct BoundedGrowth {
  double sup = 0.0;  // sup_j M_j
};
struct PolynomialGrowth {
  double coefficient = 1.0;  // M_j = (coefficient * j^degree)^2
  int degree = 0;
};
struct GeometricGrowth {
  double ratio = 2.0;  // M_j = (first_gap * ratio^(j-1))^2
  double first_gap = 1.0;
};
struct TableGrowth {};

using GrowthClass = std::variant<BoundedGrowth, PolynomialGrowth, GeometricGrowth, TableGrowth>;

std::string growth_tag(const GrowthClass& growth);

/// Closed-form M_j for the non-table classes. TableGrowth throws.
double growth_prefix_max(const GrowthClass& growth, int j);

struct SlitWindow {
  std::vector<double> abscissas;  // x_{-j..j}, clipped to the materialized range
  std::vector<double> gaps;       // consecutive differences of `abscissas`
  double max_gap_sq = 0.0;        // M_j
};

class CombDomain {
 public:
  const CombSpec& spec() const noexcept { return data_->spec; }

  std::span<const double> xs() const noexcept { return data_->xs; }
  std::span<const double> heights() const noexcept { return data_->bs; }

  int first_index() const noexcept { return -static_cast<int>(data_->origin); }
  int last_index() const noexcept {
    return static_cast<int>(data_->xs.size()) - 1 - static_cast<int>(data_->origin);
  }
  /// Window radius J: largest |n| materialized.
  int radius() const noexcept { return std::max(-first_index(), last_index()); }
  std::size_t size() const noexcept { return data_->xs.size(); }

  double x(int n) const { return data_->xs.at(slot(n)); }
  double height(int n) const { return data_->bs.at(slot(n)); }
  /// a_n = x_n - x_{n-1}.
  double gap(int n) const;
  /// beta_n = max(b_{n-1}, b_{n+1}).
  double beta(int n) const;

  double ell() const noexcept { return data_->ell; }
  double min_gap() const noexcept { return data_->min_gap; }

  /// M_j for 1 <= j <= radius().
  double prefix_max(int j) const;
  std::span<const double> prefix_maxes() const noexcept { return data_->prefix_max; }

  bool one_sided() const noexcept { return data_->spec.one_sided; }
  /// True when the abscissas are a finite window of an infinite generated
  /// sequence (every generator except ExplicitSlits).
  bool truncated() const noexcept { return data_->truncated; }
  /// True when both outermost abscissas are walls (b == 0). Only meaningful
  /// for explicit combs.
  bool enclosed() const noexcept;

  const GrowthClass& growth() const noexcept { return data_->growth; }
  const std::vector<std::string>& notes() const noexcept { return data_->notes; }

  /// Height seen by a simulation: the origin of a one-sided comb is a wall.
  double effective_height(std::size_t slot_index) const noexcept {
    return (data_->spec.one_sided && slot_index == 0) ? 0.0 : data_->bs[slot_index];
  }

  friend bool operator==(const CombDomain& a, const CombDomain& b) noexcept {
    return a.data_->xs == b.data_->xs && a.data_->bs == b.data_->bs &&
           a.data_->origin == b.data_->origin && a.one_sided() == b.one_sided() &&
           a.truncated() == b.truncated();
  }

 private:
  struct Data {
    CombSpec spec;
    std::vector<double> xs;
    std::vector<double> bs;
    std::size_t origin = 0;
    double ell = 0.0;
    double min_gap = 0.0;
    std::vector<double> prefix_max;  // prefix_max[j-1] == M_j
    bool truncated = false;
    GrowthClass growth = TableGrowth{};
    std::vector<std::string> notes;
  };

  explicit CombDomain(std::shared_ptr<const Data> data) : data_(std::move(data)) {}
  std::size_t slot(int n) const;

  std::shared_ptr<const Data> data_;

  friend CombDomain build_comb(const CombSpec& spec);
};

/// Materializes a spec. Throws ValidationError on non-increasing abscissas,
/// negative heights, zero gaps or an empty window.
CombDomain build_comb(const CombSpec& spec);

/// Two-sided extension of a one-sided comb by x_{-n} = -x_n, b_{-n} = b_n.
CombDomain symmetrize(const CombDomain& one_sided);

/// The n >= 0 half of a two-sided comb, as a one-sided comb.
CombDomain restrict_one_sided(const CombDomain& two_sided);

SlitWindow slit_window(const CombDomain& comb, int j);

}  // namespace comblab

#include "comblab/domain.hpp"

#include <cmath>
#include <limits>
#include <numbers>
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

[[noreturn]] void escape(const CombDomain& comb, Point p) {
  std::ostringstream os;
  os << "window escape at (" << p.u << ", " << p.v << "): comb materialized on ["
     << comb.xs().front() << ", " << comb.xs().back() << "] with radius " << comb.radius()
     << "; rerun with window_radius >= " << 2 * comb.radius();
  throw WindowEscape(os.str(), 2 * comb.radius());
}

// Nearest point on slit {x} x ((-inf,-b] u [b,inf)).
BoundaryHit slit_hit(double x, double b, Point p) {
  const double dv = std::max(0.0, b - std::abs(p.v));
  const double v = dv > 0.0 ? std::copysign(b, p.v == 0.0 ? 1.0 : p.v) : p.v;
  return {std::hypot(p.u - x, dv), {x, v}};
}

BoundaryHit comb_hit(const CombDomain& comb, Point p) {
  const auto xs = comb.xs();
  const std::size_t n = xs.size();
  BoundaryHit best{std::numeric_limits<double>::infinity(), {}};

  const auto it = std::lower_bound(xs.begin(), xs.end(), p.u);
  const std::size_t mid = static_cast<std::size_t>(it - xs.begin());

  // Scan outward; a slit at horizontal offset >= best cannot be closer.
  bool right_exhausted = true;
  for (std::size_t i = mid; i < n; ++i) {
    if (xs[i] - p.u >= best.distance) {
      right_exhausted = false;
      break;
    }
    const BoundaryHit h = slit_hit(xs[i], comb.effective_height(i), p);
    if (h.distance < best.distance) best = h;
  }
  bool left_exhausted = true;
  for (std::size_t i = mid; i-- > 0;) {
    if (p.u - xs[i] >= best.distance) {
      left_exhausted = false;
      break;
    }
    const BoundaryHit h = slit_hit(xs[i], comb.effective_height(i), p);
    if (h.distance < best.distance) best = h;
  }

  if (comb.truncated()) {
    // Unmaterialized slits lie strictly beyond the outermost abscissas.
    if (right_exhausted && p.u + best.distance > xs.back()) escape(comb, p);
    if (!comb.one_sided() && left_exhausted && p.u - best.distance < xs.front()) {
      escape(comb, p);
    }
  }
  return best;
}

double ray_distance(Point p, double cx, double cy, Point& nearest) {
  const double t = p.u * cx + p.v * cy;
  if (t <= 0.0) {
    nearest = {0.0, 0.0};
    return std::hypot(p.u, p.v);
  }
  nearest = {t * cx, t * cy};
  return std::hypot(p.u - nearest.u, p.v - nearest.v);
}

}  // namespace

void validate(const SimDomain& domain) {
  std::visit(overloaded{
                 [](const CombDomain&) {},
                 [](const Rectangle& r) {
                   if (!(r.halfwidth > 0.0) || !(r.halfheight > 0.0) ||
                       !std::isfinite(r.halfwidth) || !std::isfinite(r.halfheight)) {
                     throw ValidationError("rectangle dimensions must be positive");
                   }
                 },
                 [](const VerticalStrip& s) {
                   if (!(s.left < s.right) || !std::isfinite(s.left) || !std::isfinite(s.right)) {
                     throw ValidationError("vertical strip requires left < right");
                   }
                 },
                 [](const Wedge& w) {
                   if (!(w.angle > 0.0 && w.angle < 2.0 * std::numbers::pi)) {
                     throw ValidationError("wedge angle must lie in (0, 2*pi)");
                   }
                 },
                 [](const HalfPlane&) {},
             },
             domain);
}

std::string domain_kind(const SimDomain& domain) {
  return std::visit(overloaded{
                        [](const CombDomain&) { return std::string("comb"); },
                        [](const Rectangle&) { return std::string("rectangle"); },
                        [](const VerticalStrip&) { return std::string("vertical_strip"); },
                        [](const Wedge&) { return std::string("wedge"); },
                        [](const HalfPlane&) { return std::string("half_plane"); },
                    },
                    domain);
}

double domain_scale(const SimDomain& domain) {
  return std::visit(overloaded{
                        [](const CombDomain& c) {
                          return std::isfinite(c.min_gap()) ? c.min_gap() : 1.0;
                        },
                        [](const Rectangle& r) { return 2.0 * std::min(r.halfwidth, r.halfheight); },
                        [](const VerticalStrip& s) { return s.right - s.left; },
                        [](const Wedge&) { return 1.0; },
                        [](const HalfPlane&) { return 1.0; },
                    },
                    domain);
}

BoundaryHit nearest_boundary(const SimDomain& domain, Point p) {
  return std::visit(
      overloaded{
          [p](const CombDomain& c) { return comb_hit(c, p); },
          [p](const Rectangle& r) {
            const double du = r.halfwidth - std::abs(p.u);
            const double dv = r.halfheight - std::abs(p.v);
            if (du <= dv) return BoundaryHit{du, {std::copysign(r.halfwidth, p.u), p.v}};
            return BoundaryHit{dv, {p.u, std::copysign(r.halfheight, p.v)}};
          },
          [p](const VerticalStrip& s) {
            const double dl = p.u - s.left;
            const double dr = s.right - p.u;
            if (dl <= dr) return BoundaryHit{dl, {s.left, p.v}};
            return BoundaryHit{dr, {s.right, p.v}};
          },
          [p](const Wedge& w) {
            Point n0, n1;
            const double d0 = ray_distance(p, 1.0, 0.0, n0);
            const double d1 = ray_distance(p, std::cos(w.angle), std::sin(w.angle), n1);
            return d0 <= d1 ? BoundaryHit{d0, n0} : BoundaryHit{d1, n1};
          },
          [p](const HalfPlane&) { return BoundaryHit{p.u, {0.0, p.v}}; },
      },
      domain);
}

bool contains(const SimDomain& domain, Point p) {
  if (!std::isfinite(p.u) || !std::isfinite(p.v)) return false;
  return std::visit(
      overloaded{
          [p](const CombDomain& c) {
            const auto xs = c.xs();
            if (c.one_sided() && p.u <= 0.0) return false;
            if (c.truncated() && (p.u > xs.back() || (!c.one_sided() && p.u < xs.front()))) {
              escape(c, p);
            }
            const auto it = std::lower_bound(xs.begin(), xs.end(), p.u);
            if (it != xs.end() && *it == p.u) {
              const auto i = static_cast<std::size_t>(it - xs.begin());
              return std::abs(p.v) < c.effective_height(i);
            }
            return true;
          },
          [p](const Rectangle& r) {
            return std::abs(p.u) < r.halfwidth && std::abs(p.v) < r.halfheight;
          },
          [p](const VerticalStrip& s) { return s.left < p.u && p.u < s.right; },
          [p](const Wedge& w) {
            if (p.u == 0.0 && p.v == 0.0) return false;
            double phi = std::atan2(p.v, p.u);
            if (phi < 0.0) phi += 2.0 * std::numbers::pi;
            return phi > 0.0 && phi < w.angle;
          },
          [p](const HalfPlane&) { return p.u > 0.0; },
      },
      domain);
}

double distance_to_domain_boundary(const SimDomain& domain, Point p) {
  validate(domain);
  if (!contains(domain, p)) {
    std::ostringstream os;
    os << "point (" << p.u << ", " << p.v << ") is not inside the " << domain_kind(domain);
    throw ValidationError(os.str());
  }
  return nearest_boundary(domain, p).distance;
}

}  // namespace comblab

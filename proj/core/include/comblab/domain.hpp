#pragma once

// Simulatable planar domains and their boundary geometry.

#include <string>
#include <variant>

#include "comblab/comb.hpp"

namespace comblab {

/// (-halfwidth, halfwidth) x (-halfheight, halfheight), centered at the origin.
struct Rectangle {
  double halfwidth = 1.0;
  double halfheight = 1.0;
};

/// {left < Re z < right}.
struct VerticalStrip {
  double left = -1.0;
  double right = 1.0;
};

/// {0 < arg z < angle}, angle in (0, 2*pi).
struct Wedge {
  double angle = 1.5707963267948966;
};

/// {Re z > 0}.
struct HalfPlane {};

using SimDomain = std::variant<CombDomain, Rectangle, VerticalStrip, Wedge, HalfPlane>;

/// Throws ValidationError when parameters are out of range.
void validate(const SimDomain& domain);

std::string domain_kind(const SimDomain& domain);

/// Characteristic length: smallest gap of a comb, strip width, shorter side
/// of a rectangle, 1 for the scale-free wedge and half-plane.
double domain_scale(const SimDomain& domain);

struct BoundaryHit {
  double distance = 0.0;
  Point nearest;
};

/// Nearest boundary point, without the inside check. On a truncated comb
/// throws WindowEscape when slits outside the materialized window could be
/// closer than the best materialized candidate.
BoundaryHit nearest_boundary(const SimDomain& domain, Point p);

/// True for points in the open domain. Throws WindowEscape for points of a
/// truncated comb beyond its materialized window.
bool contains(const SimDomain& domain, Point p);

/// Euclidean distance from an interior point to the complement. Throws
/// ValidationError for points not inside the domain.
double distance_to_domain_boundary(const SimDomain& domain, Point p);

}  // namespace comblab

#pragma once

#include <stdexcept>
#include <string>

namespace comblab {

/// Input rejected before any work was done: a malformed spec, a parameter
/// outside its documented range, or a violated precondition.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A trajectory left the materialized slit window of a truncated comb.
/// The run is invalid; retry with at least `required_radius()`.
class WindowEscape : public std::runtime_error {
 public:
  WindowEscape(const std::string& what, int required_radius)
      : std::runtime_error(what), required_radius_(required_radius) {}

  int required_radius() const noexcept { return required_radius_; }

 private:
  int required_radius_;
};

}  // namespace comblab

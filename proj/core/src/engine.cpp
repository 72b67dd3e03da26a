#include "comblab/engine.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <thread>

#include "comblab/disk_law.hpp"
#include "comblab/error.hpp"
#include "comblab/io.hpp"
#include "comblab/rng.hpp"

namespace comblab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Bridge crossings farther than this many step deviations are ignored;
// their probability is below exp(-72).
constexpr double kReach = 6.0;

// Straight boundary {p : n.p = offset}. The point with tangential
// coordinate s is on the boundary for walls always, for rays when s >= 0.
struct Line {
  double nx, ny, offset;
  double tx, ty;
  bool ray;
};

struct Geometry {
  const CombDomain* comb = nullptr;
  std::vector<Line> lines;
};

Geometry make_geometry(const SimDomain& domain) {
  Geometry g;
  std::visit(overloaded{
                 [&](const CombDomain& c) { g.comb = &c; },
                 [&](const Rectangle& r) {
                   g.lines = {{-1.0, 0.0, -r.halfwidth, 0.0, 1.0, false},
                              {1.0, 0.0, -r.halfwidth, 0.0, 1.0, false},
                              {0.0, -1.0, -r.halfheight, 1.0, 0.0, false},
                              {0.0, 1.0, -r.halfheight, 1.0, 0.0, false}};
                 },
                 [&](const VerticalStrip& s) {
                   g.lines = {{1.0, 0.0, s.left, 0.0, 1.0, false},
                              {-1.0, 0.0, -s.right, 0.0, 1.0, false}};
                 },
                 [&](const Wedge& w) {
                   const double c = std::cos(w.angle);
                   const double s = std::sin(w.angle);
                   g.lines = {{0.0, 1.0, 0.0, 1.0, 0.0, true}, {s, -c, 0.0, c, s, true}};
                 },
                 [&](const HalfPlane&) { g.lines = {{1.0, 0.0, 0.0, 0.0, 1.0, false}}; },
             },
             domain);
  return g;
}

// Michael-Schucany-Haas inverse Gaussian draw, written without the
// cancellation of the textbook form.
double inverse_gaussian(double mean, double shape, RandomStream& rng) {
  const double n = rng.normal();
  const double w = mean * n * n / (2.0 * shape);
  const double x = mean / (1.0 + w + std::sqrt(w * w + 2.0 * w));
  return rng.uniform() <= mean / (mean + x) ? x : mean * mean / x;
}

// First time in [0, h] at which a 1-D Brownian bridge from distance a >= 0
// to signed end distance c (c > 0: same side) reaches zero, if it does.
//
// Under u = s / (h (h - s)) the bridge hits zero exactly when a Brownian
// motion with drift -c reaches level a / h, so u is inverse Gaussian
// (drift flipped when conditioning a same-side bridge on hitting).
std::optional<double> bridge_hit_time(double a, double c, double h, RandomStream& rng) {
  if (a <= 0.0) return 0.0;
  if (c > 0.0) {
    if (rng.uniform() >= std::exp(-2.0 * a * c / h)) return std::nullopt;
  }
  const double level = a / h;
  const double drift = std::abs(c);
  double u;
  if (drift * 1e12 < level) {
    const double n = rng.normal();
    u = level * level / (n * n);  // driftless: Levy law
  } else {
    u = inverse_gaussian(level / drift, level * level, rng);
  }
  const double uh = u * h;
  if (!std::isfinite(uh)) return h;
  return h * uh / (1.0 + uh);
}

struct Crossing {
  double time;
  std::size_t index;  // comb slot or line index
  bool comb;
};

[[noreturn]] void window_escape(const CombDomain& comb, Point p) {
  std::ostringstream os;
  os << "window escape: trajectory reached u=" << p.u << " beyond the materialized window ["
     << comb.xs().front() << ", " << comb.xs().back() << "] (radius " << comb.radius()
     << "); rerun with window_radius >= " << 2 * comb.radius();
  throw WindowEscape(os.str(), 2 * comb.radius());
}

ExitSample censored_sample(double tau, Point p, std::int64_t passages, std::int64_t steps,
                           EngineKind engine) {
  return {tau, p, true, passages, steps, engine};
}

ExitSample euler_bridge(const Geometry& geom, Point start, const SimParams& P,
                        RandomStream& rng) {
  const double h = P.step_h;
  const double sd = std::sqrt(h);
  const double reach = kReach * sd;
  const CombDomain* comb = geom.comb;

  std::span<const double> xs;
  std::int64_t passages = -1;
  std::size_t last_slot = std::numeric_limits<std::size_t>::max();
  if (comb != nullptr) {
    xs = comb->xs();
    passages = 0;
    const auto it = std::lower_bound(xs.begin(), xs.end(), start.u);
    if (it != xs.end() && *it == start.u) last_slot = static_cast<std::size_t>(it - xs.begin());
  }

  Point p = start;
  double t = 0.0;
  std::vector<Crossing> crossings;
  crossings.reserve(8);

  for (std::int64_t steps = 0;; ++steps) {
    if (steps >= P.max_steps) return censored_sample(t, p, passages, steps, EngineKind::EulerBridge);

    const Point q{p.u + sd * rng.normal(), p.v + sd * rng.normal()};
    crossings.clear();

    if (comb != nullptr) {
      const double lo = std::min(p.u, q.u) - reach;
      const double hi = std::max(p.u, q.u) + reach;
      auto first = std::lower_bound(xs.begin(), xs.end(), lo);
      for (auto it = first; it != xs.end() && *it <= hi; ++it) {
        const double d0 = p.u - *it;
        const double d1 = q.u - *it;
        const double c = (d0 * d1 > 0.0) ? std::abs(d1) : -std::abs(d1);
        if (auto s = bridge_hit_time(std::abs(d0), c, h, rng)) {
          crossings.push_back({*s, static_cast<std::size_t>(it - xs.begin()), true});
        }
      }
    }
    for (std::size_t i = 0; i < geom.lines.size(); ++i) {
      const Line& L = geom.lines[i];
      const double d0 = L.nx * p.u + L.ny * p.v - L.offset;
      const double d1 = L.nx * q.u + L.ny * q.v - L.offset;
      if (d0 * d1 > 0.0 && std::min(std::abs(d0), std::abs(d1)) > reach) continue;
      const double c = (d0 * d1 > 0.0) ? std::abs(d1) : -std::abs(d1);
      if (auto s = bridge_hit_time(std::abs(d0), c, h, rng)) crossings.push_back({*s, i, false});
    }

    if (!crossings.empty()) {
      std::sort(crossings.begin(), crossings.end(),
                [](const Crossing& a, const Crossing& b) { return a.time < b.time; });
      Point anchor = p;
      double anchor_time = 0.0;
      for (const Crossing& x : crossings) {
        const double span = h - anchor_time;
        const double frac = span > 0.0 ? (x.time - anchor_time) / span : 1.0;
        const double var =
            span > 0.0 ? std::max(0.0, (x.time - anchor_time) * (h - x.time) / span) : 0.0;
        const Point mean{anchor.u + frac * (q.u - anchor.u), anchor.v + frac * (q.v - anchor.v)};
        Point hit;
        bool exit;
        if (x.comb) {
          hit = {xs[x.index], mean.v + std::sqrt(var) * rng.normal()};
          exit = std::abs(hit.v) >= comb->effective_height(x.index);
        } else {
          const Line& L = geom.lines[x.index];
          const double s = L.tx * mean.u + L.ty * mean.v + std::sqrt(var) * rng.normal();
          hit = {L.offset * L.nx + s * L.tx, L.offset * L.ny + s * L.ty};
          exit = !L.ray || s >= 0.0;
        }
        if (exit) {
          const double tau = t + x.time;
          if (tau >= P.time_cap) {
            return censored_sample(P.time_cap, hit, passages, steps + 1, EngineKind::EulerBridge);
          }
          return {tau, hit, false, passages, steps + 1, EngineKind::EulerBridge};
        }
        if (x.comb && x.index != last_slot) {
          ++passages;
          last_slot = x.index;
        }
        anchor = hit;
        anchor_time = x.time;
      }
    }

    p = q;
    t += h;
    if (comb != nullptr && comb->truncated() &&
        (p.u > xs.back() || (!comb->one_sided() && p.u < xs.front()))) {
      window_escape(*comb, p);
    }
    if (t >= P.time_cap) {
      return censored_sample(P.time_cap, p, passages, steps + 1, EngineKind::EulerBridge);
    }
  }
}

ExitSample walk_on_spheres(const SimDomain& domain, Point start, const SimParams& P,
                           RandomStream& rng) {
  Point p = start;
  double t = 0.0;
  for (std::int64_t steps = 0;; ++steps) {
    const BoundaryHit hit = nearest_boundary(domain, p);
    if (hit.distance < P.shell_eps) return {t, hit.nearest, false, -1, steps, EngineKind::WosTime};
    if (steps >= P.max_steps) return censored_sample(t, p, -1, steps, EngineKind::WosTime);
    const DiskExit d = sample_disk_exit(hit.distance, rng);
    t += d.time;
    p.u += hit.distance * std::cos(d.angle);
    p.v += hit.distance * std::sin(d.angle);
    if (t >= P.time_cap) return censored_sample(P.time_cap, p, -1, steps + 1, EngineKind::WosTime);
  }
}

ExitSample simulate_one(const SimDomain& domain, const Geometry& geom, Point start,
                        const SimParams& P, std::uint64_t index) {
  RandomStream rng = RandomStream::for_sample(P.master_seed, index);
  return P.engine == EngineKind::EulerBridge ? euler_bridge(geom, start, P, rng)
                                             : walk_on_spheres(domain, start, P, rng);
}

void require_inside(const SimDomain& domain, Point start) {
  if (!contains(domain, start)) {
    std::ostringstream os;
    os << "start point (" << start.u << ", " << start.v << ") is not inside the "
       << domain_kind(domain);
    throw ValidationError(os.str());
  }
}

}  // namespace

std::string to_string(EngineKind engine) {
  return engine == EngineKind::EulerBridge ? "euler_bridge" : "wos_time";
}

EngineKind parse_engine(const std::string& name) {
  if (name == "euler_bridge" || name == "EulerBridge" || name == "euler") {
    return EngineKind::EulerBridge;
  }
  if (name == "wos_time" || name == "WosTime" || name == "wos") return EngineKind::WosTime;
  throw ValidationError("unknown engine '" + name + "' (expected euler_bridge or wos_time)");
}

std::size_t SampleSet::censored_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(samples.begin(), samples.end(), [](const ExitSample& s) { return s.censored; }));
}

SimParams resolve_params(const SimDomain& domain, const SimParams& params) {
  validate(domain);
  SimParams r = params;
  const double scale = domain_scale(domain);
  if (r.step_h == 0.0) r.step_h = scale * scale / 25.0;
  if (r.shell_eps == 0.0) r.shell_eps = 1e-4 * scale;

  std::ostringstream os;
  if (!(r.step_h > 0.0) || r.step_h > scale * scale / 4.0) {
    os << "step_h=" << r.step_h << " must lie in (0, scale^2/4 = " << scale * scale / 4.0 << "]";
  } else if (!(r.shell_eps > 0.0) || !(r.shell_eps < scale / 10.0)) {
    os << "shell_eps=" << r.shell_eps << " must lie in (0, scale/10 = " << scale / 10.0 << ")";
  } else if (!(r.time_cap > 0.0)) {
    os << "time_cap must be positive";
  } else if (r.max_steps < 1) {
    os << "max_steps must be >= 1";
  } else if (r.workers < 1) {
    os << "workers must be >= 1";
  }
  if (!os.str().empty()) throw ValidationError(os.str());
  return r;
}

ExitSample simulate_exit(const SimDomain& domain, Point start, const SimParams& params,
                         std::uint64_t sample_index) {
  const SimParams P = resolve_params(domain, params);
  require_inside(domain, start);
  return simulate_one(domain, make_geometry(domain), start, P, sample_index);
}

std::vector<ExitSample> run_range(const SimDomain& domain, Point start, std::uint64_t first,
                                  std::size_t count, const SimParams& resolved) {
  const Geometry geom = make_geometry(domain);
  std::vector<ExitSample> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(simulate_one(domain, geom, start, resolved, first + i));
  }
  return out;
}

SampleSet run_batch(const SimDomain& domain, Point start, std::size_t n, const SimParams& params) {
  if (n == 0) throw ValidationError("run_batch: n must be >= 1");
  const SimParams P = resolve_params(domain, params);
  require_inside(domain, start);

  SampleSet set;
  set.params = P;
  set.start = start;
  set.domain_fingerprint = fingerprint(domain);
  set.samples.resize(n);

  const Geometry geom = make_geometry(domain);
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(P.workers), n);
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::size_t> error_index(workers, n);

  auto work = [&](std::size_t w) {
    const std::size_t lo = n * w / workers;
    const std::size_t hi = n * (w + 1) / workers;
    for (std::size_t i = lo; i < hi; ++i) {
      try {
        set.samples[i] = simulate_one(domain, geom, start, P, i);
      } catch (...) {
        errors[w] = std::current_exception();
        error_index[w] = i;
        return;
      }
    }
  };

  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(work, w);
  }

  // Report the lowest failing index, which does not depend on the partition.
  const auto first = std::min_element(error_index.begin(), error_index.end());
  if (*first < n) std::rethrow_exception(errors[static_cast<std::size_t>(first - error_index.begin())]);
  return set;
}

}  // namespace comblab

#pragma once

// Exit-time sampling for planar Brownian motion (generator Laplacian / 2).
//
// Two independent engines:
//
//  * EulerBridge: Gaussian steps of variance step_h per coordinate. Between
//    step endpoints each boundary line is tested for a crossing of the
//    Brownian bridge (certain on a sign change, probability
//    exp(-2 d0 d1 / h) otherwise). The first crossing time is drawn from its
//    exact conditional law and the tangential coordinate from the bridge at
//    that time; the crossing is an exit when that point lies on the boundary
//    (slit, wall or ray). On comb domains the engine also counts passages:
//    crossings of a grid abscissa different from the previous passage.
//
//  * WosTime: walk on spheres. Each jump goes to a uniform point of the
//    largest disk inside the domain and adds an exact disk exit-time draw.
//    Stops inside the shell_eps neighbourhood of the boundary with zero
//    residual time.
//
// Every sample owns a random stream seeded by substream_seed(master, index),
// so batches are identical for any worker count.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "comblab/domain.hpp"

namespace comblab {

enum class EngineKind { EulerBridge, WosTime };

std::string to_string(EngineKind engine);
EngineKind parse_engine(const std::string& name);

struct SimParams {
  EngineKind engine = EngineKind::EulerBridge;
  double step_h = 0.0;     // 0 selects scale^2 / 25
  double shell_eps = 0.0;  // 0 selects 1e-4 * scale
  double time_cap = 1e6;
  std::int64_t max_steps = 100'000'000;
  std::uint64_t master_seed = 0;
  int workers = 1;
};

struct ExitSample {
  double tau = 0.0;
  Point exit_point;
  bool censored = false;
  std::int64_t passages = -1;  // -1 when the engine does not track passages
  std::int64_t steps = 0;
  EngineKind engine = EngineKind::EulerBridge;
};

struct SampleSet {
  std::vector<ExitSample> samples;
  std::string domain_fingerprint;
  SimParams params;  // resolved
  Point start;

  std::size_t size() const noexcept { return samples.size(); }
  std::size_t censored_count() const noexcept;
};

/// Fills defaults and checks step_h <= scale^2 / 4 and shell_eps < scale / 10.
SimParams resolve_params(const SimDomain& domain, const SimParams& params);

/// One exit sample. `params` must already be resolved.
ExitSample simulate_exit(const SimDomain& domain, Point start, const SimParams& params,
                         std::uint64_t sample_index);

/// n samples, partitioned over params.workers threads by index range.
/// A WindowEscape on any sample aborts the batch.
SampleSet run_batch(const SimDomain& domain, Point start, std::size_t n, const SimParams& params);

/// Samples [first, first + count) of a batch; same per-index streams as run_batch.
std::vector<ExitSample> run_range(const SimDomain& domain, Point start, std::uint64_t first,
                                  std::size_t count, const SimParams& resolved);

}  // namespace comblab

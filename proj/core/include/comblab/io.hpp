#pragma once

// JSON and CSV formats. Every file carries "schema_version": 1.
//
// CombSpec:
//   {"schema_version": 1,
//    "generator": {"type": "uniform", "spacing": 1, "height": 1}
//               | {"type": "polynomial", "degree": 2, "coefficient": 1, "height": 1}
//               | {"type": "geometric", "ratio": 2, "height": 1, "scale": 1}
//               | {"type": "explicit", "slits": [[x, b], ...]}
//               | {"type": "custom", "gaps": [...], "heights": [...],
//                  "extension": "repeat_last" | "periodic"},
//    "window_radius": 8, "one_sided": false}
//
// Domain:
//   {"schema_version": 1, "type": "comb", "comb": <CombSpec>}
//   {"schema_version": 1, "type": "rectangle", "halfwidth": 1, "halfheight": 1}
//   {"schema_version": 1, "type": "vertical_strip", "left": -1, "right": 1}
//   {"schema_version": 1, "type": "wedge", "angle": 0.785}
//   {"schema_version": 1, "type": "half_plane"}
//
// Samples: CSV with header index,tau,u,v,censored,passages,steps and a JSON
// sidecar holding the domain, start, resolved params and fingerprint.

#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "comblab/checker.hpp"
#include "comblab/comb.hpp"
#include "comblab/domain.hpp"
#include "comblab/engine.hpp"

namespace comblab {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Parses JSON text; syntax errors become ValidationError with line and column.
json parse_json(std::string_view text, const std::string& source = "input");
json read_json_file(const std::filesystem::path& path);

CombSpec comb_spec_from_json(const json& j);
json to_json(const CombSpec& spec);

SimDomain domain_from_json(const json& j);
json to_json(const SimDomain& domain);

SimParams params_from_json(const json& j);
json to_json(const SimParams& params);

json to_json(const Verdict& verdict);

/// 64-bit FNV-1a as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);
std::string fingerprint(const SimDomain& domain);
std::string fingerprint(const json& value);

/// Writes to a temporary sibling and renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

std::string samples_to_csv(const SampleSet& set);
json sample_sidecar(const SampleSet& set, const SimDomain& domain);

struct LoadedSamples {
  SampleSet set;
  json sidecar;
};

/// Reads `csv_path` and its sidecar (same stem, .json extension).
LoadedSamples read_samples(const std::filesystem::path& csv_path);

/// Writes `<prefix>.csv` and `<prefix>.json`.
void write_samples(const std::filesystem::path& prefix, const SampleSet& set,
                   const SimDomain& domain);

}  // namespace comblab

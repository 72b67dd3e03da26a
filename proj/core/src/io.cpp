#include "comblab/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
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

[[noreturn]] void field_error(const std::string& path, const std::string& what) {
  throw ValidationError("field '" + path + "': " + what);
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) field_error(path.empty() ? "<root>" : path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) field_error(join(path, key), "missing");
  return *it;
}

double number(const json& obj, const std::string& key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_number()) field_error(join(path, key), "expected a number");
  return v.get<double>();
}

double number_or(const json& obj, const std::string& key, const std::string& path, double fallback) {
  return obj.contains(key) ? number(obj, key, path) : fallback;
}

std::int64_t integer(const json& obj, const std::string& key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_number_integer()) field_error(join(path, key), "expected an integer");
  return v.get<std::int64_t>();
}

std::string text(const json& obj, const std::string& key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_string()) field_error(join(path, key), "expected a string");
  return v.get<std::string>();
}

std::vector<double> number_list(const json& obj, const std::string& key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_array()) field_error(join(path, key), "expected an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) field_error(join(path, key) + "[" + std::to_string(i) + "]", "expected a number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

void check_schema(const json& j, const std::string& path) {
  if (!j.is_object()) field_error(path.empty() ? "<root>" : path, "expected an object");
  if (j.contains("schema_version")) {
    const auto v = integer(j, "schema_version", path);
    if (v != kSchemaVersion) {
      field_error(join(path, "schema_version"), "unsupported version " + std::to_string(v));
    }
  }
}

CombGenerator generator_from_json(const json& g, const std::string& path) {
  const std::string type = text(g, "type", path);
  if (type == "uniform") {
    return UniformGenerator{number(g, "spacing", path), number(g, "height", path)};
  }
  if (type == "polynomial") {
    return PolynomialGenerator{static_cast<int>(integer(g, "degree", path)),
                               number(g, "coefficient", path), number_or(g, "height", path, 1.0)};
  }
  if (type == "geometric") {
    return GeometricGenerator{number(g, "ratio", path), number_or(g, "height", path, 1.0),
                              number_or(g, "scale", path, 1.0)};
  }
  if (type == "explicit") {
    const json& slits = require(g, "slits", path);
    const std::string sp = join(path, "slits");
    if (!slits.is_array()) field_error(sp, "expected an array of [x, b] pairs");
    ExplicitSlits out;
    for (std::size_t i = 0; i < slits.size(); ++i) {
      const json& s = slits[i];
      if (!s.is_array() || s.size() != 2 || !s[0].is_number() || !s[1].is_number()) {
        field_error(sp + "[" + std::to_string(i) + "]", "expected [x, b]");
      }
      out.slits.emplace_back(s[0].get<double>(), s[1].get<double>());
    }
    return out;
  }
  if (type == "custom") {
    CustomGenerator out{number_list(g, "gaps", path), number_list(g, "heights", path),
                        Extension::RepeatLast};
    if (g.contains("extension")) {
      const std::string e = text(g, "extension", path);
      if (e == "periodic") {
        out.extension = Extension::Periodic;
      } else if (e != "repeat_last") {
        field_error(join(path, "extension"), "expected repeat_last or periodic, got '" + e + "'");
      }
    }
    return out;
  }
  field_error(join(path, "type"), "unknown generator '" + type + "'");
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

double parse_double(std::string_view s, std::size_t line, const char* column) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  double x = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), x);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
    throw ValidationError("samples line " + std::to_string(line) + ", column '" + column +
                          "': not a number: '" + std::string(s) + "'");
  }
  return x;
}

std::int64_t parse_int(std::string_view s, std::size_t line, const char* column) {
  std::int64_t x = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), x);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
    throw ValidationError("samples line " + std::to_string(line) + ", column '" + column +
                          "': not an integer: '" + std::string(s) + "'");
  }
  return x;
}

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace

json parse_json(std::string_view text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ValidationError(source + ":" + std::to_string(line) + ":" + std::to_string(column) +
                          ": malformed JSON");
  }
}

json read_json_file(const std::filesystem::path& path) {
  return parse_json(read_file(path), path.string());
}

CombSpec comb_spec_from_json(const json& j) {
  check_schema(j, "");
  CombSpec spec;
  spec.generator = generator_from_json(require(j, "generator", ""), "generator");
  spec.window_radius = static_cast<int>(integer(j, "window_radius", ""));
  if (j.contains("one_sided")) {
    if (!j["one_sided"].is_boolean()) field_error("one_sided", "expected a boolean");
    spec.one_sided = j["one_sided"].get<bool>();
  }
  return spec;
}

json to_json(const CombSpec& spec) {
  json g = std::visit(
      overloaded{
          [](const ExplicitSlits& e) {
            json slits = json::array();
            for (const auto& [x, b] : e.slits) slits.push_back({x, b});
            return json{{"type", "explicit"}, {"slits", slits}};
          },
          [](const UniformGenerator& u) {
            return json{{"type", "uniform"}, {"spacing", u.spacing}, {"height", u.height}};
          },
          [](const PolynomialGenerator& p) {
            return json{{"type", "polynomial"},
                        {"degree", p.degree},
                        {"coefficient", p.coefficient},
                        {"height", p.height}};
          },
          [](const GeometricGenerator& g) {
            return json{{"type", "geometric"}, {"ratio", g.ratio}, {"height", g.height}, {"scale", g.scale}};
          },
          [](const CustomGenerator& c) {
            return json{{"type", "custom"},
                        {"gaps", c.gaps},
                        {"heights", c.heights},
                        {"extension", c.extension == Extension::Periodic ? "periodic" : "repeat_last"}};
          },
      },
      spec.generator);
  return {{"schema_version", kSchemaVersion},
          {"generator", g},
          {"window_radius", spec.window_radius},
          {"one_sided", spec.one_sided}};
}

SimDomain domain_from_json(const json& j) {
  check_schema(j, "");
  const std::string type = text(j, "type", "");
  SimDomain out = HalfPlane{};
  if (type == "comb") {
    out = build_comb(comb_spec_from_json(require(j, "comb", "")));
  } else if (type == "rectangle") {
    out = Rectangle{number(j, "halfwidth", ""), number(j, "halfheight", "")};
  } else if (type == "vertical_strip") {
    out = VerticalStrip{number(j, "left", ""), number(j, "right", "")};
  } else if (type == "wedge") {
    out = Wedge{number(j, "angle", "")};
  } else if (type != "half_plane") {
    field_error("type", "unknown domain type '" + type + "'");
  }
  validate(out);
  return out;
}

json to_json(const SimDomain& domain) {
  json j = std::visit(
      overloaded{
          [](const CombDomain& c) { return json{{"type", "comb"}, {"comb", to_json(c.spec())}}; },
          [](const Rectangle& r) {
            return json{{"type", "rectangle"}, {"halfwidth", r.halfwidth}, {"halfheight", r.halfheight}};
          },
          [](const VerticalStrip& s) {
            return json{{"type", "vertical_strip"}, {"left", s.left}, {"right", s.right}};
          },
          [](const Wedge& w) { return json{{"type", "wedge"}, {"angle", w.angle}}; },
          [](const HalfPlane&) { return json{{"type", "half_plane"}}; },
      },
      domain);
  j["schema_version"] = kSchemaVersion;
  return j;
}

SimParams params_from_json(const json& j) {
  check_schema(j, "");
  SimParams p;
  if (j.contains("engine")) p.engine = parse_engine(text(j, "engine", ""));
  p.step_h = number_or(j, "step_h", "", p.step_h);
  p.shell_eps = number_or(j, "shell_eps", "", p.shell_eps);
  p.time_cap = number_or(j, "time_cap", "", p.time_cap);
  if (j.contains("max_steps")) p.max_steps = integer(j, "max_steps", "");
  if (j.contains("master_seed")) {
    if (!j["master_seed"].is_number_unsigned()) field_error("master_seed", "expected an unsigned integer");
    p.master_seed = j["master_seed"].get<std::uint64_t>();
  }
  if (j.contains("workers")) p.workers = static_cast<int>(integer(j, "workers", ""));
  return p;
}

json to_json(const SimParams& p) {
  return {{"engine", to_string(p.engine)}, {"step_h", p.step_h},
          {"shell_eps", p.shell_eps},      {"time_cap", p.time_cap},
          {"max_steps", p.max_steps},      {"master_seed", p.master_seed},
          {"workers", p.workers}};
}

json to_json(const Verdict& v) {
  return {{"status", to_string(v.status)},
          {"p", v.p},
          {"ell", finite_or_null(v.ell)},
          {"theta0", finite_or_null(v.theta0_used)},
          {"ratio", finite_or_null(v.ratio)},
          {"bound", finite_or_null(v.bound_on_moment_root)},
          {"strip_factor", finite_or_null(v.strip_factor)},
          {"bound_with_strip_factor", finite_or_null(v.bound_with_strip_factor)},
          {"growth_class", v.growth_class_used},
          {"terms_summed", v.terms_summed},
          {"reason", v.reason}};
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string fingerprint(const json& value) { return fnv1a_hex(value.dump()); }

std::string fingerprint(const SimDomain& domain) { return fingerprint(to_json(domain)); }

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string samples_to_csv(const SampleSet& set) {
  std::string out = "index,tau,u,v,censored,passages,steps\n";
  out.reserve(out.size() + set.samples.size() * 80);
  for (std::size_t i = 0; i < set.samples.size(); ++i) {
    const ExitSample& s = set.samples[i];
    out += std::to_string(i);
    out += ',';
    out += format_double(s.tau);
    out += ',';
    out += format_double(s.exit_point.u);
    out += ',';
    out += format_double(s.exit_point.v);
    out += s.censored ? ",1," : ",0,";
    if (s.passages >= 0) out += std::to_string(s.passages);
    out += ',';
    out += std::to_string(s.steps);
    out += '\n';
  }
  return out;
}

json sample_sidecar(const SampleSet& set, const SimDomain& domain) {
  return {{"schema_version", kSchemaVersion},
          {"domain", to_json(domain)},
          {"domain_fingerprint", set.domain_fingerprint},
          {"start", {set.start.u, set.start.v}},
          {"params", to_json(set.params)},
          {"count", set.size()},
          {"censored_count", set.censored_count()}};
}

void write_samples(const std::filesystem::path& prefix, const SampleSet& set,
                   const SimDomain& domain) {
  const std::string csv = samples_to_csv(set);
  json side = sample_sidecar(set, domain);
  side["csv_fingerprint"] = fnv1a_hex(csv);
  std::filesystem::path csv_path = prefix;
  csv_path += ".csv";
  std::filesystem::path json_path = prefix;
  json_path += ".json";
  write_file_atomic(csv_path, csv);
  write_file_atomic(json_path, side.dump(2) + "\n");
}

LoadedSamples read_samples(const std::filesystem::path& csv_path) {
  std::filesystem::path side_path = csv_path;
  side_path.replace_extension(".json");
  LoadedSamples out;
  out.sidecar = read_json_file(side_path);
  check_schema(out.sidecar, "");
  out.set.params = params_from_json(require(out.sidecar, "params", ""));
  out.set.domain_fingerprint = text(out.sidecar, "domain_fingerprint", "");
  const json& start = require(out.sidecar, "start", "");
  if (!start.is_array() || start.size() != 2) field_error("start", "expected [u, v]");
  out.set.start = {start[0].get<double>(), start[1].get<double>()};

  const std::string csv = read_file(csv_path);
  std::istringstream in(csv);
  std::string row;
  std::size_t line = 0;
  static constexpr const char* kColumns[] = {"index", "tau", "u", "v", "censored", "passages", "steps"};
  while (std::getline(in, row)) {
    ++line;
    if (line == 1) {
      if (row != "index,tau,u,v,censored,passages,steps") {
        throw ValidationError("samples line 1: unexpected header '" + row + "'");
      }
      continue;
    }
    if (row.empty()) continue;
    std::vector<std::string_view> cells;
    std::string_view rest(row);
    for (;;) {
      const auto comma = rest.find(',');
      cells.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (cells.size() != 7) {
      throw ValidationError("samples line " + std::to_string(line) + ": expected 7 columns, got " +
                            std::to_string(cells.size()));
    }
    ExitSample s;
    s.tau = parse_double(cells[1], line, kColumns[1]);
    s.exit_point = {parse_double(cells[2], line, kColumns[2]), parse_double(cells[3], line, kColumns[3])};
    s.censored = parse_int(cells[4], line, kColumns[4]) != 0;
    s.passages = cells[5].empty() ? -1 : parse_int(cells[5], line, kColumns[5]);
    s.steps = parse_int(cells[6], line, kColumns[6]);
    s.engine = out.set.params.engine;
    out.set.samples.push_back(s);
  }
  if (out.set.samples.empty()) throw ValidationError("samples file " + csv_path.string() + " is empty");
  return out;
}

}  // namespace comblab

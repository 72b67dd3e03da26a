#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "comblab/adversarial.hpp"
#include "comblab/analytic.hpp"
#include "comblab/checker.hpp"
#include "comblab/error.hpp"
#include "comblab/estimators.hpp"
#include "comblab/io.hpp"

namespace comblab::cli {

namespace {

namespace fs = std::filesystem;

int default_workers() {
  if (const char* env = std::getenv("COMBLAB_WORKERS")) {
    try {
      const int w = std::stoi(env);
      if (w >= 1) return w;
    } catch (const std::exception&) {
    }
    throw ValidationError(std::string("COMBLAB_WORKERS must be a positive integer, got '") + env + "'");
  }
  return 1;
}

Point parse_point(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw ValidationError("--start expects U,V");
  try {
    std::size_t used = 0;
    const std::string us = text.substr(0, comma);
    const std::string vs = text.substr(comma + 1);
    const double u = std::stod(us, &used);
    if (used != us.size()) throw std::invalid_argument(us);
    const double v = std::stod(vs, &used);
    if (used != vs.size()) throw std::invalid_argument(vs);
    return {u, v};
  } catch (const std::logic_error&) {
    throw ValidationError("--start expects U,V with numeric U and V, got '" + text + "'");
  }
}

json point_json(Point p) { return json::array({p.u, p.v}); }

// Reports carry the command, its resolved configuration and a fingerprint
// of that configuration together with the bytes of every input file.
json make_report(const std::string& command, const json& config,
                 const std::vector<fs::path>& inputs = {}) {
  std::string bytes = config.dump();
  for (const auto& path : inputs) bytes += read_file(path);
  return {{"schema_version", kSchemaVersion},
          {"command", command},
          {"config", config},
          {"fingerprint", fnv1a_hex(bytes)}};
}

void emit(const json& report, const std::string& out_path, std::ostream& out) {
  const std::string text = report.dump(2) + "\n";
  if (!out_path.empty()) write_file_atomic(out_path, text);
  out << text;
}

json moment_json(const MomentEstimate& m) {
  return {{"p", m.p},
          {"estimate", m.point_estimate},
          {"standard_error", m.standard_error},
          {"ci_95", {m.ci_lo, m.ci_hi}},
          {"censored_fraction", m.censored_fraction},
          {"lower_bound_only", m.lower_bound_only},
          {"n", m.n}};
}

json tail_json(const TailDiagnostic& t) {
  json j = {{"H_hat", t.H_hat},
            {"ci_95", {t.ci_lo, t.ci_hi}},
            {"method", to_string(t.method)},
            {"n_effective", t.n_effective}};
  if (t.method == TailMethod::Hill) {
    j["k"] = t.k;
    j["censored_in_tail"] = t.censored_in_tail;
  } else {
    j["quantile_range"] = {t.quantile_lo, t.quantile_hi};
  }
  return j;
}

json trace_json(const std::vector<AdversarialTrace>& trace) {
  json out = json::array();
  for (const auto& t : trace) {
    out.push_back({{"stage", t.stage},
                   {"abscissa", t.abscissa},
                   {"threshold", t.threshold},
                   {"mean_sqrt_tau", t.mean},
                   {"standard_error", t.standard_error},
                   {"lower_bound", t.lower_bound},
                   {"samples_used", t.samples_used},
                   {"search_iterations", t.search_iterations}});
  }
  return out;
}

// Simulation flags shared by simulate and xval.
struct SimFlags {
  std::string engine = "euler_bridge";
  std::uint64_t seed = 0;
  double step_h = 0.0;
  double shell_eps = 0.0;
  double time_cap = 1e6;
  std::int64_t max_steps = 100'000'000;
  int workers = 0;

  void attach(CLI::App* app, bool with_engine) {
    if (with_engine) app->add_option("--engine", engine, "euler_bridge or wos_time");
    app->add_option("--seed", seed, "master seed");
    app->add_option("--step-h", step_h, "Euler-bridge step (0: automatic)");
    app->add_option("--shell-eps", shell_eps, "walk-on-spheres shell (0: automatic)");
    app->add_option("--time-cap", time_cap, "censoring time");
    app->add_option("--max-steps", max_steps, "censoring step count");
    app->add_option("--workers", workers, "worker threads (default: COMBLAB_WORKERS or 1)");
  }

  SimParams params() const {
    SimParams p;
    p.engine = parse_engine(engine);
    p.master_seed = seed;
    p.step_h = step_h;
    p.shell_eps = shell_eps;
    p.time_cap = time_cap;
    p.max_steps = max_steps;
    p.workers = workers > 0 ? workers : default_workers();
    return p;
  }
};

Point default_start(const SimDomain& domain) {
  if (const auto* s = std::get_if<VerticalStrip>(&domain)) return {0.5 * (s->left + s->right), 0.0};
  if (std::holds_alternative<Rectangle>(domain)) return {0.0, 0.0};
  throw ValidationError("--start is required for " + domain_kind(domain) + " domains");
}

std::vector<double> default_grid(const SimDomain& domain) {
  const double unit = 0.25 * domain_scale(domain) * domain_scale(domain);
  return {0.1 * unit, 0.25 * unit, 0.5 * unit, unit, 2.0 * unit};
}

}  // namespace

int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exit-time moments of planar Brownian motion from comb domains"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");
  std::string out_path;

  double ell = 0.0;
  double tol = 1e-12;
  auto* c_theta = app.add_subcommand("theta0", "theta0(ell) = 1 - P(top/bottom exit of (-1,1)x(-ell,ell)) / 2");
  c_theta->add_option("--ell", ell, "aspect ratio")->required();
  c_theta->add_option("--tol", tol, "absolute series tolerance");
  c_theta->add_option("--out", out_path, "report file");

  double p = 0.0;
  auto* c_strip = app.add_subcommand("strip-moment", "E[tau^p] for the exit of (-1,1) from 0");
  c_strip->add_option("--p", p, "moment order")->required();
  c_strip->add_option("--tol", tol, "absolute tolerance");
  c_strip->add_option("--out", out_path, "report file");

  std::string comb_file;
  bool refined = false;
  std::string growth = "auto";
  double margin = 0.05;
  int ratio_start = 0;
  auto* c_check = app.add_subcommand("check", "sufficient condition for a finite p-th moment");
  c_check->add_option("--comb", comb_file, "CombSpec JSON")->required()->check(CLI::ExistingFile);
  c_check->add_option("--p", p, "moment order")->required();
  c_check->add_flag("--refined", refined, "use theta0 = 3/4 (unit heights, gaps >= 1)");
  c_check->add_option("--growth", growth, "auto, bounded, polynomial, geometric or table");
  c_check->add_option("--margin", margin, "safety margin of the table ratio test");
  c_check->add_option("--ratio-start", ratio_start, "first index J0 of the table ratio test (0: J/2)");
  c_check->add_option("--out", out_path, "report file");

  std::string domain_file;
  std::string start_text;
  std::size_t n = 0;
  SimFlags sim;
  auto* c_sim = app.add_subcommand("simulate", "sample exit times and write CSV plus JSON sidecar");
  c_sim->add_option("--domain", domain_file, "domain JSON")->required()->check(CLI::ExistingFile);
  c_sim->add_option("--start", start_text, "start point U,V")->required();
  c_sim->add_option("--n", n, "sample count")->required();
  c_sim->add_option("--out", out_path, "output prefix (writes PREFIX.csv and PREFIX.json)")->required();
  sim.attach(c_sim, true);

  std::string samples_file;
  std::string method = "hill";
  std::size_t k = 0;
  double q_lo = 0.80;
  double q_hi = 0.99;
  auto* c_tail = app.add_subcommand("tail", "tail exponent of the exit-time law");
  c_tail->add_option("--samples", samples_file, "samples CSV")->required()->check(CLI::ExistingFile);
  c_tail->add_option("--method", method, "hill or loglog_fit");
  c_tail->add_option("--k", k, "Hill order statistics (0: default)");
  c_tail->add_option("--q-lo", q_lo, "log-log fit lower quantile");
  c_tail->add_option("--q-hi", q_hi, "log-log fit upper quantile");
  c_tail->add_option("--out", out_path, "report file");

  auto* c_verdict = app.add_subcommand("verdict", "empirical finite/infinite verdict, reconciled with the checker");
  c_verdict->add_option("--samples", samples_file, "samples CSV")->required()->check(CLI::ExistingFile);
  c_verdict->add_option("--p", p, "moment order")->required();
  c_verdict->add_option("--comb", comb_file, "CombSpec JSON (default: the sampled comb, if any)")
      ->check(CLI::ExistingFile);
  c_verdict->add_option("--method", method, "hill or loglog_fit");
  c_verdict->add_option("--out", out_path, "report file");

  AdversarialOptions adv;
  std::string comb_out;
  std::string adv_engine = "wos_time";
  int adv_workers = 0;
  auto* c_construct = app.add_subcommand("construct", "stagewise comb with unbounded sqrt-moment");
  c_construct->add_option("--stages", adv.stages, "number of stages")->required();
  c_construct->add_option("--budget", adv.sample_budget, "total sample budget")->required();
  c_construct->add_option("--seed", adv.params.master_seed, "master seed")->required();
  c_construct->add_option("--samples-per-candidate", adv.samples_per_candidate, "walks per candidate");
  c_construct->add_option("--max-iterations", adv.max_iterations_per_stage, "doubling steps per stage");
  c_construct->add_option("--engine", adv_engine, "euler_bridge or wos_time");
  c_construct->add_option("--time-cap", adv.params.time_cap, "censoring time");
  c_construct->add_option("--workers", adv_workers, "worker threads");
  c_construct->add_option("--comb-out", comb_out, "write the final comb as a CombSpec JSON");
  c_construct->add_option("--out", out_path, "report file");

  std::vector<double> grid;
  double confidence = 0.99;
  n = 20000;
  auto* c_xval = app.add_subcommand("xval", "compare Euler-bridge and walk-on-spheres survival curves");
  c_xval->add_option("--domain", domain_file, "domain JSON")->required()->check(CLI::ExistingFile);
  c_xval->add_option("--start", start_text, "start point U,V (default: center of strip/rectangle)");
  c_xval->add_option("--n", n, "samples per engine");
  c_xval->add_option("--grid", grid, "survival time grid")->delimiter(',');
  c_xval->add_option("--confidence", confidence, "joint confidence of the band");
  c_xval->add_option("--out", out_path, "report file");
  sim.attach(c_xval, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kValidationError;
  }

  try {
    if (c_theta->parsed()) {
      SeriesParams sp;
      sp.abs_tolerance = tol;
      const Theta0Result r = theta0(ell, sp);
      json rep = make_report("theta0", {{"ell", ell}, {"abs_tolerance", tol}});
      rep["ell"] = r.ell;
      rep["theta0"] = r.theta0;
      rep["p_top_bottom"] = r.p_top_bottom;
      rep["remainder_bound"] = r.remainder_bound;
      emit(rep, out_path, out);
    } else if (c_strip->parsed()) {
      SeriesParams sp;
      sp.abs_tolerance = tol;
      const MomentValue m = strip_moment(p, sp);
      json rep = make_report("strip-moment", {{"p", p}, {"abs_tolerance", tol}});
      rep["strip_moment"] = m.value;
      rep["error_estimate"] = m.error_estimate;
      rep["method"] = m.exact_recursion ? "ode_recursion" : "quadrature";
      emit(rep, out_path, out);
    } else if (c_check->parsed()) {
      const CombSpec spec = comb_spec_from_json(read_json_file(comb_file));
      const CombDomain comb = build_comb(spec);
      CheckOptions opt;
      opt.growth = parse_growth_choice(growth);
      opt.safety_margin = margin;
      opt.ratio_start = ratio_start;
      const Verdict v = refined ? check_refined_unit(comb, p, opt) : check_theorem1(comb, p, opt);
      json rep = make_report("check",
                             {{"comb", to_json(spec)},
                              {"p", p},
                              {"refined", refined},
                              {"growth", growth},
                              {"safety_margin", margin},
                              {"ratio_start", ratio_start}},
                             {comb_file});
      rep.update(to_json(v));
      rep["notes"] = comb.notes();
      emit(rep, out_path, out);
    } else if (c_sim->parsed()) {
      const SimDomain domain = domain_from_json(read_json_file(domain_file));
      const Point start = parse_point(start_text);
      if (fs::weakly_canonical(out_path + ".json") == fs::weakly_canonical(domain_file)) {
        throw ValidationError("--out " + out_path + " would overwrite the domain file");
      }
      const SampleSet set = run_batch(domain, start, n, sim.params());
      write_samples(out_path, set, domain);
      json rep = make_report("simulate",
                             {{"domain", to_json(domain)},
                              {"start", point_json(start)},
                              {"n", n},
                              {"params", to_json(set.params)}},
                             {domain_file});
      rep["count"] = set.size();
      rep["censored_count"] = set.censored_count();
      rep["domain_fingerprint"] = set.domain_fingerprint;
      rep["mean_exit_time"] = moment_json(estimate_moment(set, 1.0));
      rep["files"] = {out_path + ".csv", out_path + ".json"};
      emit(rep, "", out);
    } else if (c_tail->parsed()) {
      const LoadedSamples loaded = read_samples(samples_file);
      TailOptions opt;
      opt.method = parse_tail_method(method);
      opt.k = k;
      opt.quantile_lo = q_lo;
      opt.quantile_hi = q_hi;
      const TailDiagnostic t = tail_index(loaded.set, opt);
      json rep = make_report("tail",
                             {{"samples", samples_file},
                              {"method", to_string(opt.method)},
                              {"k", k},
                              {"quantile_range", {q_lo, q_hi}}},
                             {samples_file});
      rep.update(tail_json(t));
      rep["sample_count"] = loaded.set.size();
      rep["censored_count"] = loaded.set.censored_count();
      emit(rep, out_path, out);
    } else if (c_verdict->parsed()) {
      const LoadedSamples loaded = read_samples(samples_file);
      TailOptions opt;
      opt.method = parse_tail_method(method);
      const TailDiagnostic t = tail_index(loaded.set, opt);
      const MomentVerdict empirical = moment_verdict(t, p);
      std::vector<fs::path> inputs{samples_file};
      std::optional<CombDomain> comb;
      if (!comb_file.empty()) {
        comb = build_comb(comb_spec_from_json(read_json_file(comb_file)));
        inputs.emplace_back(comb_file);
      } else {
        const json& d = loaded.sidecar.at("domain");
        if (d.value("type", "") == "comb") comb = build_comb(comb_spec_from_json(d.at("comb")));
      }
      json rep = make_report("verdict",
                             {{"samples", samples_file}, {"p", p}, {"comb", comb_file}, {"method", method}},
                             inputs);
      rep["empirical"] = to_string(empirical);
      rep["tail"] = tail_json(t);
      rep["moment"] = moment_json(estimate_moment(loaded.set, p));
      std::string final_verdict = to_string(empirical);
      if (comb) {
        const Verdict v = check_theorem1(*comb, p);
        rep["certificate"] = to_json(v);
        if (v.status == VerdictStatus::FiniteCertified) final_verdict = "FiniteCertified";
      }
      rep["verdict"] = final_verdict;
      emit(rep, out_path, out);
    } else if (c_construct->parsed()) {
      adv.params.engine = parse_engine(adv_engine);
      adv.params.workers = adv_workers > 0 ? adv_workers : default_workers();
      json config = {{"stages", adv.stages},
                     {"budget", adv.sample_budget},
                     {"samples_per_candidate", adv.samples_per_candidate},
                     {"max_iterations", adv.max_iterations_per_stage},
                     {"start", point_json({adv.start_u, 0.0})},
                     {"params", to_json(adv.params)}};
      try {
        const AdversarialResult r = build_adversarial(adv);
        json rep = make_report("construct", config);
        rep["trace"] = trace_json(r.trace);
        rep["comb"] = to_json(r.comb.spec());
        if (!comb_out.empty()) write_file_atomic(comb_out, to_json(r.comb.spec()).dump(2) + "\n");
        emit(rep, out_path, out);
      } catch (const BudgetExhausted& e) {
        err << "error: " << e.what() << "\n"
            << json{{"partial_trace", trace_json(e.partial_trace())}}.dump(2) << "\n";
        return kRunAborted;
      }
    } else if (c_xval->parsed()) {
      const SimDomain domain = domain_from_json(read_json_file(domain_file));
      const Point start = start_text.empty() ? default_start(domain) : parse_point(start_text);
      if (grid.empty()) grid = default_grid(domain);
      SimParams eb = sim.params();
      eb.engine = EngineKind::EulerBridge;
      SimParams wos = eb;
      wos.engine = EngineKind::WosTime;
      const SampleSet a = run_batch(domain, start, n, eb);
      const SampleSet b = run_batch(domain, start, n, wos);
      const SurvivalComparison c = compare_survival(a, b, grid, confidence);
      json rep = make_report("xval",
                             {{"domain", to_json(domain)},
                              {"start", point_json(start)},
                              {"n", n},
                              {"grid", grid},
                              {"confidence", confidence},
                              {"euler_bridge", to_json(a.params)},
                              {"wos_time", to_json(b.params)}},
                             {domain_file});
      json rows = json::array();
      for (std::size_t i = 0; i < c.t.size(); ++i) {
        rows.push_back({{"t", c.t[i]},
                        {"euler_bridge", c.fraction_a[i]},
                        {"wos_time", c.fraction_b[i]},
                        {"diff", c.diff[i]},
                        {"se", c.se[i]}});
      }
      rep["survival"] = rows;
      rep["critical_z"] = c.critical;
      rep["max_abs_z"] = c.max_abs_z;
      rep["agree"] = c.agree;
      rep["mean_exit_time"] = {{"euler_bridge", moment_json(estimate_moment(a, 1.0))},
                               {"wos_time", moment_json(estimate_moment(b, 1.0))}};
      emit(rep, out_path, out);
    }
    return kOk;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kValidationError;
  } catch (const WindowEscape& e) {
    err << "error: " << e.what() << "\n";
    return kRunAborted;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
}

}  // namespace comblab::cli

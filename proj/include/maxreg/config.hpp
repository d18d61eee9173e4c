#pragma once

// JSON run configurations, the batch pipeline behind the command line tool,
// and the summary table.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "maxreg/error.hpp"
#include "maxreg/generators.hpp"
#include "maxreg/io.hpp"
#include "maxreg/lattice.hpp"
#include "maxreg/maxops.hpp"
#include "maxreg/parallel.hpp"
#include "maxreg/sobolev.hpp"
#include "maxreg/verify.hpp"

namespace maxreg {

inline const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> ids{"thm21",          "eq21",       "thm23",
                                            "norm_bounds",    "zero_boundary", "continuity",
                                            "argmax_stability", "derivative_formula", "calculus"};
  return ids;
}

struct RunConfig {
  DomainSpec domain;
  double h = 0.0;
  std::vector<GeneratorSpec> fields;
  std::vector<GeneratorSpec> perturbations;  ///< one per slot; defaults are drawn from the seed
  int m = 1;
  double alpha = 0.0;
  std::vector<double> p;
  std::vector<std::string> checks;
  std::string output_dir = "out";
  std::uint64_t seed = 0;
  std::string threads;  ///< integer or "auto"; empty defers to MAXREG_THREADS
  int continuity_levels = 6;
  int stability_levels = 5;
  double stability_lambda = 4.0;  ///< in units of h
  VerifyOptions verify;
};

namespace detail {

class Reader {
public:
  explicit Reader(const json& root) : root_(root) {}

  const json* find(const std::string& ptr) const {
    const json::json_pointer jp(ptr);
    return root_.contains(jp) ? &root_.at(jp) : nullptr;
  }
  const json& need(const std::string& ptr) const {
    const json* j = find(ptr);
    if (!j) throw config_error(ptr, "required value missing");
    return *j;
  }
  double number(const std::string& ptr) const { return as_number(need(ptr), ptr); }
  double number_or(const std::string& ptr, double dflt) const {
    const json* j = find(ptr);
    return j ? as_number(*j, ptr) : dflt;
  }
  std::string string(const std::string& ptr) const {
    const json& j = need(ptr);
    if (!j.is_string()) throw config_error(ptr, "expected a string");
    return j.get<std::string>();
  }
  std::vector<double> numbers(const std::string& ptr) const {
    const json& j = need(ptr);
    if (!j.is_array()) throw config_error(ptr, "expected an array of numbers");
    std::vector<double> v;
    for (std::size_t i = 0; i < j.size(); ++i) v.push_back(as_number(j[i], ptr + "/" + std::to_string(i)));
    return v;
  }
  std::vector<double> numbers_or_empty(const std::string& ptr) const {
    return find(ptr) ? numbers(ptr) : std::vector<double>{};
  }

  static double as_number(const json& j, const std::string& ptr) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
      const auto s = j.get<std::string>();
      if (s == "inf") return std::numeric_limits<double>::infinity();
      if (s == "-inf") return -std::numeric_limits<double>::infinity();
    }
    throw config_error(ptr, "expected a number");
  }

private:
  const json& root_;
};

inline GeneratorSpec parse_generator(const Reader& rd, const std::string& at) {
  const json& j = rd.need(at);
  if (!j.is_object()) throw config_error(at, "expected a generator object");
  GeneratorSpec g;
  g.kind = rd.string(at + "/kind");
  static const std::vector<std::string> kinds{"constant", "gaussian", "trig", "indicator", "bump", "sum", "noise"};
  if (std::find(kinds.begin(), kinds.end(), g.kind) == kinds.end())
    throw config_error(at + "/kind", "unknown generator kind \"" + g.kind + "\"");
  g.value = rd.number_or(at + "/value", 0.0);
  if (const json* c = rd.find(at + "/center")) {
    if (c->is_string() && c->get<std::string>() == "random")
      g.random_center = true;
    else
      g.center = rd.numbers(at + "/center");
  }
  g.width = rd.number_or(at + "/width", g.width);
  g.amplitude = rd.number_or(at + "/amplitude", g.amplitude);
  g.offset = rd.number_or(at + "/offset", 0.0);
  g.frequencies = rd.numbers_or_empty(at + "/frequencies");
  g.phases = rd.numbers_or_empty(at + "/phases");
  if (rd.find(at + "/region")) g.region = rd.string(at + "/region");
  g.radius = rd.number_or(at + "/radius", 0.0);
  g.lo = rd.numbers_or_empty(at + "/lo");
  g.hi = rd.numbers_or_empty(at + "/hi");
  if (const json* t = rd.find(at + "/terms")) {
    if (!t->is_array()) throw config_error(at + "/terms", "expected an array of generators");
    for (std::size_t i = 0; i < t->size(); ++i) g.terms.push_back(parse_generator(rd, at + "/terms/" + std::to_string(i)));
  }
  return g;
}

inline std::vector<GeneratorSpec> parse_generators(const Reader& rd, const std::string& at) {
  const json& j = rd.need(at);
  if (!j.is_array()) throw config_error(at, "expected an array of generators");
  std::vector<GeneratorSpec> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(parse_generator(rd, at + "/" + std::to_string(i)));
  return out;
}

inline DomainSpec parse_domain(const Reader& rd) {
  DomainSpec d;
  d.kind = rd.string("/domain/kind");
  const std::string pp = "/domain/params";
  if (!rd.find(pp) || !rd.need(pp).is_object()) throw config_error(pp, "expected a params object");
  if (d.kind == "interval" || d.kind == "rectangle") {
    if (d.kind == "interval" && rd.need(pp + "/lo").is_number()) {
      d.lo = {rd.number(pp + "/lo")};
      d.hi = {rd.number(pp + "/hi")};
    } else {
      d.lo = rd.numbers(pp + "/lo");
      d.hi = rd.numbers(pp + "/hi");
    }
  } else if (d.kind == "disk" || d.kind == "annulus") {
    d.center = rd.numbers(pp + "/center");
    d.radius = rd.number(pp + "/radius");
    if (d.kind == "annulus") d.inner_radius = rd.number(pp + "/inner_radius");
  } else if (d.kind == "rect_union") {
    const json& rs = rd.need(pp + "/rects");
    if (!rs.is_array()) throw config_error(pp + "/rects", "expected an array of {lo, hi}");
    for (std::size_t i = 0; i < rs.size(); ++i) {
      const std::string at = pp + "/rects/" + std::to_string(i);
      d.rects.emplace_back(rd.numbers(at + "/lo"), rd.numbers(at + "/hi"));
    }
  } else {
    throw config_error("/domain/kind", "unknown domain kind \"" + d.kind + "\"");
  }
  return d;
}

} // namespace detail

inline RunConfig parse_config(const json& root) {
  if (!root.is_object()) throw config_error("", "configuration must be a JSON object");
  static const std::vector<std::string> keys{"domain", "h",     "fields", "perturbations", "m",       "alpha",
                                             "p",      "checks", "output_dir", "seed",      "threads", "continuity",
                                             "argmax_stability", "verify"};
  for (const auto& [k, v] : root.items())
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) throw config_error("/" + k, "unknown key");
  const detail::Reader rd(root);
  RunConfig c;
  c.domain = detail::parse_domain(rd);
  const json* top_h = rd.find("/h");
  const json* dom_h = rd.find("/domain/h");
  if (!top_h && !dom_h) throw config_error("/h", "required value missing");
  c.h = top_h ? rd.number("/h") : rd.number("/domain/h");
  if (top_h && dom_h && rd.number("/domain/h") != c.h) throw config_error("/domain/h", "disagrees with /h");
  if (!(c.h > 0.0) || !std::isfinite(c.h)) throw config_error(top_h ? "/h" : "/domain/h", "h must be positive");

  c.fields = detail::parse_generators(rd, "/fields");
  const double m = rd.number_or("/m", static_cast<double>(c.fields.size()));
  if (!(m >= 1.0) || m != std::floor(m) || m > 8) throw config_error("/m", "m must be an integer in [1, 8]");
  c.m = static_cast<int>(m);
  if (c.fields.size() != static_cast<std::size_t>(c.m))
    throw config_error("/fields", "expected " + std::to_string(c.m) + " generators, one per slot");
  if (rd.find("/perturbations")) {
    c.perturbations = detail::parse_generators(rd, "/perturbations");
    if (c.perturbations.size() != c.fields.size())
      throw config_error("/perturbations", "expected one perturbation per slot");
  }
  c.alpha = rd.number_or("/alpha", 0.0);
  c.p = rd.numbers("/p");
  if (c.p.size() != static_cast<std::size_t>(c.m)) throw config_error("/p", "expected m exponents");

  if (const json* ch = rd.find("/checks")) {
    if (!ch->is_array()) throw config_error("/checks", "expected an array of check ids");
    for (std::size_t i = 0; i < ch->size(); ++i) {
      const std::string at = "/checks/" + std::to_string(i);
      const std::string id = rd.string(at);
      if (id == "all") {
        c.checks = known_checks();
        continue;
      }
      if (std::find(known_checks().begin(), known_checks().end(), id) == known_checks().end())
        throw config_error(at, "unknown check id \"" + id + "\"");
      if (std::find(c.checks.begin(), c.checks.end(), id) == c.checks.end()) c.checks.push_back(id);
    }
  }
  if (rd.find("/output_dir")) c.output_dir = rd.string("/output_dir");
  const double seed = rd.number_or("/seed", 0.0);
  if (!(seed >= 0.0) || seed != std::floor(seed) || seed > 9007199254740992.0)
    throw config_error("/seed", "seed must be a nonnegative integer");
  c.seed = static_cast<std::uint64_t>(seed);
  if (const json* t = rd.find("/threads")) {
    c.threads = t->is_number_integer() ? std::to_string(t->get<long long>()) : (t->is_string() ? t->get<std::string>() : "?");
    try {
      parse_threads(c.threads);
    } catch (const error& e) {
      throw config_error("/threads", e.what());
    }
  }
  c.continuity_levels = static_cast<int>(rd.number_or("/continuity/levels", c.continuity_levels));
  if (c.continuity_levels < 4) throw config_error("/continuity/levels", "need at least 4 levels");
  c.stability_levels = static_cast<int>(rd.number_or("/argmax_stability/levels", c.stability_levels));
  if (c.stability_levels < 1) throw config_error("/argmax_stability/levels", "need at least 1 level");
  c.stability_lambda = rd.number_or("/argmax_stability/lambda_cells", c.stability_lambda);
  if (!(c.stability_lambda >= 2.0)) throw config_error("/argmax_stability/lambda_cells", "lambda must be at least 2h");

  VerifyOptions& v = c.verify;
  v.eps_factor = rd.number_or("/verify/eps_factor", v.eps_factor);
  v.collar = rd.number_or("/verify/collar_cells", v.collar);
  v.disc_lambda = rd.number_or("/verify/discontinuity_cells", v.disc_lambda);
  v.argmax_tol = rd.number_or("/verify/argmax_rel_tol", v.argmax_tol);
  v.threshold = rd.number_or("/verify/threshold", v.threshold);
  v.calculus_samples = static_cast<int>(rd.number_or("/verify/calculus_samples", v.calculus_samples));
  v.rhs_floor = rd.number_or("/verify/rhs_floor", v.rhs_floor);
  if (!(v.rhs_floor >= 0.0 && v.rhs_floor < 1.0)) throw config_error("/verify/rhs_floor", "must lie in [0, 1)");
  if (!(v.argmax_tol >= 0.0 && v.argmax_tol <= 0.1)) throw config_error("/verify/argmax_rel_tol", "must lie in [0, 0.1]");
  if (!(v.threshold > 0.0 && v.threshold <= 1.0)) throw config_error("/verify/threshold", "must lie in (0, 1]");
  if (const json* r = rd.find("/verify/radius_rule")) {
    const std::string s = rd.string("/verify/radius_rule");
    if (s == "ladder")
      v.rule = RadiusRule::ladder;
    else if (s == "ladder_with_edge")
      v.rule = RadiusRule::ladder_with_edge;
    else
      throw config_error("/verify/radius_rule", "expected \"ladder\" or \"ladder_with_edge\"");
    (void)r;
  }
  v.seed = c.seed;
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw config_error("", "cannot open config file " + path);
  json root;
  try {
    root = json::parse(is);
  } catch (const json::parse_error& e) {
    throw config_error("", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(root);
}

/// Fixed-width table of check_id, q, pass_fraction, empirical_constant, pass, sorted by check_id.
inline std::string emit_report(std::vector<VerificationReport> reports) {
  if (reports.empty()) throw argument_error("nothing to report");
  std::stable_sort(reports.begin(), reports.end(),
                   [](const VerificationReport& a, const VerificationReport& b) { return a.check_id < b.check_id; });
  auto cell = [](double v) {
    if (std::isnan(v)) return std::string("nan");
    if (std::isinf(v)) return std::string(v > 0 ? "inf" : "-inf");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return std::string(buf);
  };
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%-20s %12s %14s %20s %6s\n", "check_id", "q", "pass_fraction",
                "empirical_constant", "pass");
  os << line;
  for (const auto& r : reports) {
    const std::string q = r.exponents.p.empty() ? "-" : cell(r.exponents.q);
    std::snprintf(line, sizeof line, "%-20s %12s %14s %20s %6s\n", r.check_id.c_str(), q.c_str(),
                  cell(r.pass_fraction).c_str(), cell(r.empirical_constant).c_str(), r.pass ? "true" : "false");
    os << line;
  }
  return os.str();
}

/// Rebuilds the summary columns of reports from reports.json.
inline std::vector<VerificationReport> reports_from_json(const json& j) {
  if (!j.is_array()) throw config_error("", "reports.json must hold an array");
  std::vector<VerificationReport> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string at = "/" + std::to_string(i);
    const detail::Reader rd(j);
    VerificationReport r;
    r.check_id = rd.string(at + "/check_id");
    r.pass_fraction = rd.number(at + "/pass_fraction");
    r.empirical_constant = rd.number(at + "/empirical_constant");
    r.pass = rd.need(at + "/pass").get<bool>();
    const json& e = rd.need(at + "/exponents/p");
    for (std::size_t k = 0; k < e.size(); ++k) r.exponents.p.push_back(rd.number(at + "/exponents/p/" + std::to_string(k)));
    r.exponents.q = rd.number(at + "/exponents/q");
    out.push_back(std::move(r));
  }
  return out;
}

enum class Stage { gen, compute, verify };

enum ExitCode : int { exit_pass = 0, exit_check_failed = 1, exit_hypothesis = 2, exit_config = 3 };

struct RunOutcome {
  int exit_code = exit_pass;
  std::vector<VerificationReport> reports;
  std::string summary;
};

namespace detail {

inline GeneratorSpec default_perturbation() {
  GeneratorSpec g;
  g.kind = "gaussian";
  g.random_center = true;
  g.width = 0.2;
  g.amplitude = 0.5;
  return g;
}

// Gate of each check: the hypotheses that must hold before anything is computed.
inline void gate_check(const std::string& id, const RunConfig& c, const ExponentSet& e, bool smooth) {
  const double a = c.alpha;
  auto need = [&](bool ok, const std::string& what) {
    if (!ok) throw hypothesis_error(id + ": hypotheses unmet: " + what);
  };
  if (id == "thm21") need(e.thm21, "alpha = 0 and 1 < q < inf with 1/q = sum 1/p_j");
  if (id == "eq21") need(e.thm22i && a >= 1.0, "1 <= alpha < m n and 1 < q < inf");
  if (id == "thm23") need(e.thm23, "p_j > n/(n-1), 1 <= alpha < m beta + 1 and 1 < q < inf");
  if (id == "norm_bounds") need(a == 0.0 ? e.bd1 : (e.tb_i || e.tb_ii), "no boundedness window holds");
  if (id == "zero_boundary") need(e.sobolev0, "1 < q < inf (and alpha >= 1 when alpha > 0)");
  if (id == "continuity") need(e.continuity, "1 < q < inf (and alpha >= 1 when alpha > 0)");
  if (id == "thm21" || id == "eq21" || id == "thm23" || id == "derivative_formula" || id == "calculus")
    need(smooth, "every slot generator must be smooth");
}

} // namespace detail

/// Runs one configuration: gen writes fields, compute adds maximal functions,
/// verify adds reports.json and summary.txt.
inline RunOutcome run_config(const RunConfig& c, Stage stage = Stage::verify, const std::string& out_override = "",
                             const std::string& threads_override = "") {
  namespace fs = std::filesystem;
  const ExponentSet exps = [&] {
    const Domain d = build_domain(c.domain);
    return exponent_table(c.m, d.dim(), c.p, c.alpha);
  }();
  const Domain domain = build_domain(c.domain);
  Problem pb;
  pb.domain = domain;
  pb.h = c.h;
  bool smooth = true;
  for (std::size_t i = 0; i < c.fields.size(); ++i) {
    pb.generators.push_back(make_generator(c.fields[i], domain, detail::splitmix64(c.seed + i)));
    smooth = smooth && pb.generators.back().smooth();
  }
  if (stage == Stage::verify)
    for (const auto& id : c.checks) detail::gate_check(id, c, exps, smooth);
  std::vector<Generator> perturb;
  for (std::size_t i = 0; i < c.fields.size(); ++i) {
    const GeneratorSpec spec = c.perturbations.empty() ? detail::default_perturbation() : c.perturbations[i];
    perturb.push_back(make_generator(spec, domain, detail::splitmix64(c.seed + 1000 + i)));
  }

  VerifyOptions vo = c.verify;
  vo.threads = parse_threads(threads_override.empty() ? c.threads : threads_override);
  const fs::path out = out_override.empty() ? fs::path(c.output_dir) : fs::path(out_override);
  std::error_code ec;
  fs::create_directories(out / "fields", ec);
  if (ec) throw error("cannot create " + (out / "fields").string() + ": " + ec.message());

  const Scenario sc = pb.sample();
  for (std::size_t i = 0; i < sc.m(); ++i)
    write_field_csv((out / "fields" / ("f" + std::to_string(i + 1) + ".csv")).string(), sc.slots[i].value);
  write_field_csv((out / "fields" / "delta.csv").string(), distance_field(sc.lattice));

  RunOutcome outcome;
  const bool want_maximal = stage == Stage::compute || (stage == Stage::verify && !c.checks.empty());
  if (want_maximal) {
    fs::create_directories(out / "maximal", ec);
    if (ec) throw error("cannot create " + (out / "maximal").string() + ": " + ec.message());
    MaxOptions mo;
    mo.rel_tol = vo.argmax_tol;
    mo.rule = vo.rule;
    mo.threads = vo.threads;
    const MaxResult res = local_maximal_field(sc.fields(), c.alpha, mo);
    write_field_csv((out / "maximal" / "maximal.csv").string(), res.value);
    if (c.alpha <= 1.0 && c.m == 1 && sc.lattice->dim() >= 2)
      write_field_csv((out / "maximal" / "spherical.csv").string(),
                      spherical_maximal_field(sc.slots[0].value, c.alpha, vo.threads));
    write_text_file((out / "maximal" / "argmax.json").string(), dump_json(argmax_json(*sc.lattice, res)));
  }
  if (stage != Stage::verify) return outcome;

  for (const auto& id : c.checks) {
    if (id == "thm21") outcome.reports.push_back(check_gradient_bound_alpha0(sc, exps, vo));
    if (id == "eq21") outcome.reports.push_back(check_gradient_bound_fractional(sc, c.alpha, exps, vo));
    if (id == "thm23") outcome.reports.push_back(check_gradient_bound_spherical(pb, c.alpha, exps, vo));
    if (id == "norm_bounds") outcome.reports.push_back(check_norm_bounds(pb, c.alpha, exps, vo));
    if (id == "zero_boundary") outcome.reports.push_back(check_zero_boundary(pb, c.alpha, exps, vo));
    if (id == "continuity")
      outcome.reports.push_back(continuity_experiment(pb, perturb, c.alpha, exps, c.continuity_levels, vo));
    if (id == "argmax_stability")
      outcome.reports.push_back(
          argmax_stability_experiment(pb, perturb, c.alpha, c.stability_lambda * c.h, c.stability_levels, vo));
    if (id == "derivative_formula") outcome.reports.push_back(derivative_formula_check(sc, c.alpha, exps, vo));
    if (id == "calculus") outcome.reports.push_back(calculus_identity_checks(sc.slots, vo));
  }
  write_text_file((out / "reports.json").string(), dump_json(to_json(outcome.reports)));
  outcome.summary = outcome.reports.empty() ? std::string("no checks requested\n") : emit_report(outcome.reports);
  write_text_file((out / "summary.txt").string(), outcome.summary);
  for (const auto& r : outcome.reports)
    if (!r.pass) outcome.exit_code = exit_check_failed;
  return outcome;
}

} // namespace maxreg

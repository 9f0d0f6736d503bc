#include "ergolab/scenarios.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "ergolab/decomp.hpp"
#include "ergolab/errors.hpp"
#include "ergolab/parallel.hpp"
#include "ergolab/seminorms.hpp"
#include "ergolab/suspension.hpp"

namespace ergolab {

Check check_le(std::string name, double value, double bound) {
  const double m = bound - value;
  return {std::move(name), value, bound, "<=", 0.0, m, m >= 0.0};
}

Check check_ge(std::string name, double value, double bound) {
  const double m = value - bound;
  return {std::move(name), value, bound, ">=", 0.0, m, m >= 0.0};
}

Check check_eq(std::string name, double value, double target, double tolerance) {
  const double m = tolerance - std::abs(value - target);
  return {std::move(name), value, target, "==", tolerance, m, m >= 0.0};
}

bool RunReport::checks_pass() const {
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

int RunReport::exit_code() const {
  if (!checks_pass()) return kExitCheckFail;
  if (!certified) return kExitNonCertified;
  return kExitPass;
}

std::string RunReport::status() const {
  switch (exit_code()) {
    case kExitPass: return "pass";
    case kExitNonCertified: return "not-certified";
    default: return "fail";
  }
}

json RunReport::to_json(bool with_timing) const {
  json j;
  j["scenario"] = scenario;
  j["exercises"] = exercises;
  j["status"] = status();
  json cs = json::array();
  for (const auto& c : checks) {
    cs.push_back({{"name", c.name}, {"value", c.value}, {"bound", c.bound}, {"relation", c.relation},
                  {"tolerance", c.tolerance}, {"margin", c.margin}, {"pass", c.pass}});
  }
  j["checks"] = cs;
  j["result"] = result;
  j["environment"] = {{"threads", thread_count()}, {"compiler", __VERSION__}, {"cplusplus", __cplusplus}};
  if (with_timing) j["timing"] = {{"seconds", seconds}};
  return j;
}

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json window_json(Window w) { return {{"begin", w.begin}, {"end", w.end}}; }

json complex_json(cplx c) { return json::array({c.real(), c.imag()}); }

double tol(const json& doc, const std::string& key, double fallback) {
  if (doc.contains("tolerances") && doc.at("tolerances").contains(key)) return doc.at("tolerances").at(key).get<double>();
  return fallback;
}

Route parse_route(const json& doc) {
  const std::string r = doc.value("route", std::string("spectral"));
  if (r == "spectral") return Route::Spectral;
  if (r == "sampler") return Route::Sampler;
  throw ConfigError("route: expected 'spectral' or 'sampler'");
}

// ---------------------------------------------------------------- scenarios

RunReport run_correlate(const ExperimentConfig& cfg) {
  const json& doc = cfg.doc;
  const CorrelationSpec spec = parse_correlation(doc, cfg.seed);
  const Window w = parse_window(require(doc, "window", "config"));
  const Route route = parse_route(doc);
  RunReport rep;
  const SequenceSample a = corr_seq(spec, w, route);
  std::ostringstream csv;
  csv << "n,re,im\n";
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    csv << w.begin + static_cast<std::int64_t>(i) << ',' << num(a.values[i].real()) << ',' << num(a.values[i].imag()) << '\n';
  }
  rep.csv = csv.str();
  rep.result["window"] = window_json(w);
  rep.result["route"] = route == Route::Spectral ? "spectral" : "sampler";
  rep.result["provenance"] = a.provenance;
  if (w.length() >= 64) {
    const auto fam = WindowFamily::lengths(w.begin, {w.length() / 16, w.length() / 8, w.length() / 4});
    const auto u = uniform_seminorm([&](std::int64_t n) { return a.at(n); }, fam);
    rep.result["uniform_seminorm"] = {{"value", u.value}, {"squared", u.squared}, {"argmax", window_json(u.argmax)}};
  }
  if (doc.value("compare_routes", false)) {
    const SequenceSample b = corr_seq(spec, w, route == Route::Spectral ? Route::Sampler : Route::Spectral);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) worst = std::max(worst, std::abs(a.values[i] - b.values[i]));
    rep.checks.push_back(check_le("routes agree", worst, tol(doc, "routes", 1e-12)));
  }
  if (doc.contains("expect")) {
    for (const json& e : doc.at("expect")) {
      const auto n = require(e, "n", "expect").get<std::int64_t>();
      if (n < w.begin || n >= w.end) throw ConfigError("expect: n outside the window");
      const cplx want(require(e, "value", "expect")[0].get<double>(), e.at("value")[1].get<double>());
      rep.checks.push_back(check_eq("a(" + std::to_string(n) + ")", std::abs(a.at(n) - want), 0.0, e.value("tol", 1e-12)));
    }
  }
  return rep;
}

RunReport run_converge(const ExperimentConfig& cfg) {
  const json& doc = cfg.doc;
  const CorrelationSpec spec = parse_correlation(doc, cfg.seed);
  const auto begin = doc.value("begin", std::int64_t{0});
  const auto base = require(doc, "base_length", "config").get<std::int64_t>();
  const int steps = doc.value("steps", 6);
  const double t = tol(doc, "cauchy", 1e-3);
  const CauchyReport r = cauchy_report(spec, begin, base, steps, t);
  RunReport rep;
  std::ostringstream csv;
  csv << "from_length,to_length,diff_l2\n";
  json rows = json::array();
  for (const auto& row : r.rows) {
    csv << row.from.length() << ',' << row.to.length() << ',' << num(row.diff_l2) << '\n';
    rows.push_back({{"from", window_json(row.from)}, {"to", window_json(row.to)}, {"diff_l2", row.diff_l2}});
  }
  rep.csv = csv.str();
  rep.result["rows"] = rows;
  rep.result["converged"] = r.converged;
  const double last = r.rows.empty() ? 0.0 : std::max(r.rows.back().diff_l2, r.rows[r.rows.size() - 2].diff_l2);
  rep.checks.push_back(check_le("last two differences", last, t));
  return rep;
}

RunReport run_zero_limit(const ExperimentConfig& cfg) {
  const json& doc = cfg.doc;
  const CorrelationSpec spec = parse_correlation(doc, cfg.seed);
  const json& wins = require(doc, "windows", "config");
  if (!wins.is_array() || wins.empty()) throw ConfigError("windows: expected a non-empty array");
  const double bound = tol(doc, "l2_max", 0.05);
  RunReport rep;
  std::ostringstream csv;
  csv << "begin,length,l2_spectral,l2_sampled,std_error\n";
  json rows = json::array();
  std::vector<double> l2;
  for (const json& wj : wins) {
    const Window w = parse_window(wj);
    const MultiAverage ma = multi_average(spec, w);
    l2.push_back(ma.l2_spectral);
    csv << w.begin << ',' << w.length() << ',' << num(ma.l2_spectral) << ',' << num(ma.l2_sampled) << ','
        << num(ma.l2_std_error) << '\n';
    rows.push_back({{"window", window_json(w)}, {"l2_spectral", ma.l2_spectral}, {"l2_sampled", ma.l2_sampled},
                    {"std_error", ma.l2_std_error}, {"samples", ma.samples}});
  }
  rep.csv = csv.str();
  rep.result["averages"] = rows;
  rep.checks.push_back(check_le("L2 norm at first window", l2.front(), bound));
  for (std::size_t i = 1; i < l2.size(); ++i) {
    Check c = check_le("L2 norm decreases at window " + std::to_string(i), l2[i], l2[i - 1]);
    c.pass = l2[i] < l2[i - 1];
    rep.checks.push_back(c);
  }
  return rep;
}

RunReport run_seminorm(const ExperimentConfig& cfg) {
  const json& doc = cfg.doc;
  const CommutingSystem sys = parse_system(require(doc, "system", "config"), cfg.seed);
  const Observable f = parse_observable(require(doc, "observable", "config"), sys.space());
  const auto idx = doc.value("map", std::size_t{0});
  if (idx >= sys.size()) throw ConfigError("map: index out of range");
  const Transformation& t = sys.map(idx);
  HKSeminormConfig hc;
  hc.exact = doc.value("mode", std::string("exact")) == "exact";
  hc.N = doc.value("N", std::int64_t{256});
  hc.start = doc.value("start", std::int64_t{1});
  const auto ks = doc.value("ks", std::vector<int>{1, 2});
  RunReport rep;
  std::ostringstream csv;
  csv << "k,value,method,period\n";
  json rows = json::array();
  std::map<int, double> values;
  for (int k : ks) {
    hc.k = k;
    const HKSeminormReport r = hk_seminorm(f, t, hc);
    values[k] = r.value;
    csv << k << ',' << num(r.value) << ',' << r.method << ',' << r.period << '\n';
    rows.push_back({{"k", k}, {"value", r.value}, {"power", r.power}, {"method", r.method}, {"period", r.period}});
    if (hc.exact && sys.space().finite()) {
      const InverseDirectionReport inv = hk_inverse_direction_checks(f, t, k);
      for (const auto& c : inv.checks) {
        rep.checks.push_back(check_ge(c.name + " k=" + std::to_string(k), c.margin, -tol(doc, "relations", 1e-9)));
      }
    }
  }
  rep.csv = csv.str();
  rep.result["seminorms"] = rows;
  if (doc.contains("expect")) {
    for (const json& e : doc.at("expect")) {
      const int k = require(e, "k", "expect").get<int>();
      if (!values.count(k)) throw ConfigError("expect: k=" + std::to_string(k) + " not among ks");
      rep.checks.push_back(check_eq("seminorm k=" + std::to_string(k), values[k], require(e, "value", "expect").get<double>(),
                                    e.value("tol", 1e-12)));
    }
  }
  return rep;
}

SuspensionPoint random_suspension_point(const SuspensionFlow& flow, const StatePoint& base, std::mt19937_64& rng) {
  SuspensionPoint p{base, std::vector<std::uint64_t>(flow.directions())};
  for (auto& h : p.heights) h = rng();
  return p;
}

std::vector<FixedReal> random_time(std::size_t n, std::mt19937_64& rng) {
  std::vector<FixedReal> s(n);
  for (auto& x : s) x = FixedReal::from_int(static_cast<std::int64_t>(rng() % 8)) + FixedReal::from_fraction_bits(rng());
  return s;
}

RunReport run_suspension(const ExperimentConfig& cfg) {
  const json& doc = cfg.doc;
  const std::uint64_t seed = cfg.require_seed("suspension");
  const CommutingSystem sys = parse_system(require(doc, "system", "config"), cfg.seed);
  const auto m = doc.value("m", std::size_t{1});
  const SuspensionFlow flow(sys, m);
  std::mt19937_64 rng(seed);
  RunReport rep;
  std::ostringstream csv;
  csv << "check,value,bound,margin\n";

  // Flow law on random points and times.
  const auto count = doc.value("points", std::size_t{1000});
  const auto bases = Sampler::random(seed, count).points(sys.space());
  std::int64_t law_failures = 0;
  for (const auto& b : bases) {
    const SuspensionPoint p = random_suspension_point(flow, b, rng);
    const auto s = random_time(flow.directions(), rng);
    const auto t = random_time(flow.directions(), rng);
    std::vector<FixedReal> st(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) st[i] = s[i] + t[i];
    if (!(flow.apply(st, p) == flow.apply(s, flow.apply(t, p)))) ++law_failures;
  }
  rep.checks.push_back(check_le("flow law mismatches", static_cast<double>(law_failures), 0.0));
  rep.result["flow_law"] = {{"points", bases.size()}, {"mismatches", law_failures}};

  if (doc.contains("power")) {
    const json& pj = doc.at("power");
    const FixedReal s = parse_fixed(require(pj, "s", "power"), "power.s");
    const FixedReal b = parse_fixed(pj.value("b", json("0")), "power.b");
    const auto n_max = pj.value("n_max", std::int64_t{10000});
    const Observable f = parse_observable(require(pj, "observable", "power"), sys.space());
    const FlowPowerReport r = flow_power_identity_check(sys.map(0), s, bases.front(), b.frac_bits(), n_max, f);
    rep.checks.push_back(check_le("power identity mismatches", static_cast<double>(r.mismatches + r.observable_mismatches), 0.0));
    rep.result["power_identity"] = {{"checked", r.checked}, {"mismatches", r.mismatches},
                                    {"observable_mismatches", r.observable_mismatches}};
  }

  if (doc.contains("f6")) {
    const json& fj = doc.at("f6");
    const FixedReal s = parse_fixed(require(fj, "s", "f6"), "f6.s");
    const int k = fj.value("k", 1);
    const Observable f = parse_observable(require(fj, "observable", "f6"), sys.space());
    const LemmaF6Report r = lemma_f6_numeric_check(f, sys.map(0), s, k);
    rep.checks.push_back(check_ge("seminorm transfer margin", r.margin, -tol(doc, "inequality", 1e-6)));
    rep.result["seminorm_transfer"] = {{"lhs", r.lhs}, {"seminorm", r.seminorm}, {"rhs", r.rhs}, {"margin", r.margin},
                                       {"c_k", static_cast<double>(r.constants.c_k)},
                                       {"c_ks", static_cast<double>(r.constants.c_ks)}, {"height_bits", r.height_bits}};
  }

  if (doc.contains("anti_uniform")) {
    const json& aj = doc.at("anti_uniform");
    json inner = aj;
    inner["system"] = require(doc, "system", "config");
    const CorrelationSpec spec = parse_correlation(inner, cfg.seed);
    const Window w = parse_window(require(aj, "window", "anti_uniform"));
    const FixedReal theta = parse_fixed(require(aj, "b_theta", "anti_uniform"), "anti_uniform.b_theta");
    const std::uint64_t bits = theta.frac_bits();
    const SequenceSample b = sample_sequence(
        [bits](std::int64_t n) {
          const cplx v = std::polar(1.0, 2.0 * M_PI * std::ldexp(static_cast<double>(static_cast<std::uint64_t>(n) * bits), -64));
          return v;
        },
        w, "e(n theta)");
    const int k = aj.value("k", 2);
    json rows = json::array();
    double prev_c = std::numeric_limits<double>::infinity();
    for (const json& dj : require(aj, "deltas", "anti_uniform")) {
      const FixedReal delta = parse_fixed(dj, "anti_uniform.deltas");
      const WeakAntiUniformBound r = weak_anti_uniform_bound(spec, b, delta, k);
      const std::string tag = "delta=" + num(delta.to_double());
      rep.checks.push_back(check_ge("anti-uniform margin " + tag, r.margin, -tol(doc, "inequality", 1e-6)));
      Check dec = check_le("c_delta decreases " + tag, r.c_delta, prev_c);
      dec.pass = r.c_delta < prev_c;
      if (std::isinf(prev_c)) dec.bound = dec.margin = 0.0;
      rep.checks.push_back(dec);
      prev_c = r.c_delta;
      csv << "anti_uniform " << tag << ',' << num(r.lhs) << ',' << num(r.rhs) << ',' << num(r.margin) << '\n';
      rows.push_back({{"delta", delta.to_double()}, {"lhs", r.lhs}, {"box_term", r.box_term}, {"c_delta", r.c_delta},
                      {"rhs", r.rhs}, {"margin", r.margin}, {"densities", r.densities}, {"b_uniformity", r.b_uniformity}});
    }
    rep.result["anti_uniform"] = rows;
  }
  for (const auto& c : rep.checks) {
    if (c.name.rfind("anti_uniform", 0) == 0) continue;
    if (c.name.rfind("anti-uniform", 0) == 0) continue;
    csv << c.name << ',' << num(c.value) << ',' << num(c.bound) << ',' << num(c.margin) << '\n';
  }
  rep.csv = csv.str();
  return rep;
}

json trace_json(const PetTrace& t) {
  json steps = json::array();
  for (const auto& s : t.steps) {
    json w = json::array();
    for (const auto& [lead, deg] : s.weight) w.push_back({lead, deg});
    steps.push_back({{"family", s.family}, {"pivot", s.pivot}, {"result", s.result}, {"weight", w}});
  }
  return {{"depth", t.depth}, {"k", t.k_estimate}, {"completed", t.completed}, {"steps", steps}};
}

RunReport run_pet(const ExperimentConfig& cfg) {
  const json& doc = cfg.doc;
  const PolyFamily fam = parse_family(require(doc, "family", "config"));
  RunReport rep;
  try {
    const NiceResult n = is_nice(fam);
    rep.result["nice"] = n.nice;
    if (!n.nice) rep.result["nice_failing"] = n.failing;
  } catch (const InvalidInput&) {
    rep.result["nice"] = nullptr;  // non-integer coefficients
  }
  const NiceResult rn = is_r_nice(fam);
  rep.result["r_nice"] = rn.nice;
  if (!rn.nice) rep.result["r_nice_failing"] = rn.failing;
  const PetTrace trace = pet_reduce(fam, doc.value("max_depth", kPetMaxDepth));
  const json tj = trace_json(trace);
  rep.result["trace"] = tj;
  rep.result["d"] = trace.depth;
  rep.result["k"] = trace.k_estimate;
  rep.checks.push_back(check_ge("reduction completed", trace.completed ? 1.0 : 0.0, 1.0));
  const bool replay = trace_json(pet_reduce(fam, doc.value("max_depth", kPetMaxDepth))) == tj;
  rep.checks.push_back(check_ge("trace replays", replay ? 1.0 : 0.0, 1.0));
  if (doc.contains("expect")) {
    const json& e = doc.at("expect");
    if (e.contains("d")) rep.checks.push_back(check_eq("depth d", trace.depth, e.at("d").get<double>(), 0.0));
    if (e.contains("d_max")) rep.checks.push_back(check_le("depth d", trace.depth, e.at("d_max").get<double>()));
    if (e.contains("k")) rep.checks.push_back(check_eq("k", trace.k_estimate, e.at("k").get<double>(), 0.0));
  }
  std::ostringstream csv;
  csv << "step,pivot,columns_before,columns_after\n";
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const auto& s = trace.steps[i];
    csv << i + 1 << ',' << s.pivot << ',' << s.family.size() << ',' << s.result.size() << '\n';
  }
  rep.csv = csv.str();
  return rep;
}

SequenceSample parse_sequence(const json& j, Window w, std::optional<std::uint64_t> seed) {
  const std::string where = "sequence";
  if (!j.is_object()) throw ConfigError("sequence: expected an object");
  const std::string kind = require(j, "kind", where).get<std::string>();
  auto turns = [](std::uint64_t bits) { return std::polar(1.0, 2.0 * M_PI * std::ldexp(static_cast<double>(bits), -64)); };
  if (kind == "floor_twist") {
    // e([α n] β)
    const FixedReal alpha = parse_fixed(require(j, "alpha", where), "sequence.alpha");
    const std::uint64_t beta = parse_fixed(require(j, "beta", where), "sequence.beta").frac_bits();
    const RealPolynomial p = RealPolynomial::from_fixed({FixedReal::from_int(0), alpha});
    return sample_sequence([&](std::int64_t n) { return turns(static_cast<std::uint64_t>(eval_floor(p, n)) * beta); }, w,
                           "floor_twist");
  }
  if (kind == "character") {
    const std::uint64_t theta = parse_fixed(require(j, "theta", where), "sequence.theta").frac_bits();
    return sample_sequence([&](std::int64_t n) { return turns(static_cast<std::uint64_t>(n) * theta); }, w, "character");
  }
  if (kind == "random_signs") {
    if (!seed) throw ConfigError("sequence: random_signs needs a top-level 'seed'");
    std::mt19937_64 rng(*seed);
    SequenceSample s{w, {}, "random_signs"};
    s.values.reserve(static_cast<std::size_t>(w.length()));
    for (std::int64_t n = w.begin; n < w.end; ++n) s.values.emplace_back((rng() & 1) ? 1.0 : -1.0, 0.0);
    return s;
  }
  if (kind == "correlation") {
    const CorrelationSpec spec = parse_correlation(j, seed);
    return corr_seq(spec, w);
  }
  throw ConfigError("sequence: unknown kind '" + kind + "'");
}

RunReport run_decompose(const ExperimentConfig& cfg) {
  const json& doc = cfg.doc;
  const Window w = parse_window(require(doc, "window", "config"));
  const SequenceSample a = parse_sequence(require(doc, "sequence", "config"), w, cfg.seed);
  const std::vector<NilBasis> ladder = parse_ladder(require(doc, "ladder", "config"));
  const double eps = require(doc, "epsilon", "config").get<double>();
  const DecompositionReport d = decompose(a, ladder, eps, doc.value("run_all", false));
  RunReport rep;
  rep.certified = d.certified;
  json rows = json::array();
  for (const auto& r : d.ladder) {
    rows.push_back({{"index", r.index}, {"basis_size", r.basis_size}, {"residual_raw", r.residual_raw},
                    {"residual_fejer", r.residual_fejer}, {"residual", r.residual}, {"source", r.source},
                    {"max_margin", r.max_margin}, {"ridge_flagged", r.ridge_flagged}});
  }
  json coeffs = json::array();
  for (std::size_t j = 0; j < d.coefficients.size(); ++j) {
    if (std::abs(d.coefficients[j]) > 1e-12) coeffs.push_back({{"tag", d.tags[j]}, {"c", complex_json(d.coefficients[j])}});
  }
  rep.result = {{"certified", d.certified}, {"index", d.index}, {"epsilon", d.epsilon}, {"residual", d.residual},
                {"nil_sup", d.nil_sup}, {"rescale", d.rescale}, {"source", d.source}, {"ladder", rows},
                {"coefficients", coeffs}, {"window", window_json(w)}};
  double worst = 0.0;
  for (double m : d.margins) worst = std::max(worst, m);
  rep.result["max_margin"] = worst;
  rep.checks.push_back(check_le("orthogonality margin", worst, tol(doc, "orthogonality", 1e-6)));
  for (std::size_t i = 1; i < d.ladder.size(); ++i) {
    rep.checks.push_back(check_le("residual nonincreasing at " + std::to_string(i), d.ladder[i].residual, d.ladder[i - 1].residual));
  }
  std::ostringstream csv;
  csv << "n,nil_re,nil_im,e_re,e_im\n";
  for (std::size_t i = 0; i < d.nil_part.size(); ++i) {
    csv << w.begin + static_cast<std::int64_t>(i) << ',' << num(d.nil_part[i].real()) << ',' << num(d.nil_part[i].imag())
        << ',' << num(d.error[i].real()) << ',' << num(d.error[i].imag()) << '\n';
  }
  rep.csv = csv.str();
  return rep;
}

RunReport run_density(const ExperimentConfig& cfg) {
  const json& doc = cfg.doc;
  const RealPolynomial p = parse_polynomial(require(doc, "polynomial", "config"));
  const Window w = parse_window(require(doc, "window", "config"));
  RunReport rep;
  std::ostringstream csv;
  csv << "delta,count,density,period,period_density\n";
  json rows = json::array();
  for (const json& dj : require(doc, "deltas", "config")) {
    const FixedReal delta = parse_fixed(dj, "deltas");
    const FracDensityReport r = frac_density(p, delta, w);
    const double dd = delta.to_double();
    csv << num(dd) << ',' << r.count << ',' << num(r.density) << ',' << r.period << ',' << num(r.period_density) << '\n';
    rows.push_back({{"delta", dd}, {"count", r.count}, {"density", r.density}, {"periodic", r.periodic},
                    {"period", r.period}, {"period_count", r.period_count}, {"period_density", r.period_density}});
    const std::string tag = "density delta=" + num(dd);
    if (doc.contains("relative_tolerance")) {
      rep.checks.push_back(check_eq(tag, r.density, dd, doc.at("relative_tolerance").get<double>() * dd));
    }
    if (doc.contains("expect_density")) {
      rep.checks.push_back(check_eq(tag, r.density, doc.at("expect_density").get<double>(), tol(doc, "density", 1e-12)));
    }
  }
  rep.csv = csv.str();
  rep.result["polynomial"] = p.to_string();
  rep.result["window"] = window_json(w);
  rep.result["densities"] = rows;
  return rep;
}

using Runner = RunReport (*)(const ExperimentConfig&);

const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> r{
      {"correlate", run_correlate}, {"converge", run_converge}, {"zero-limit", run_zero_limit},
      {"seminorm", run_seminorm},   {"suspension", run_suspension}, {"pet", run_pet},
      {"decompose", run_decompose}, {"density", run_density}};
  return r;
}

const ScenarioInfo& info_for(const std::string& name) {
  for (const auto& s : scenario_catalog()) {
    if (s.name == name) return s;
  }
  throw ConfigError("unknown scenario '" + name + "'");
}

}  // namespace

const std::vector<ScenarioInfo>& scenario_catalog() {
  static const std::vector<ScenarioInfo> c{
      {"correlate", {"system", "iterates", "observables", "window"},
       "integer-part polynomial correlation sequences and their route agreement"},
      {"converge", {"system", "iterates", "observables", "base_length"},
       "Cauchy behaviour of uniform Cesaro averages over doubling windows"},
      {"zero-limit", {"system", "iterates", "observables", "windows"},
       "L2 decay of multiple averages of zero-mean observables under commuting automorphisms"},
      {"seminorm", {"system", "observable", "ks"}, "Host-Kra seminorms, calibration and inverse-direction relations"},
      {"suspension", {"system", "seed"}, "suspension flow laws, the power identity and seminorm transfer bounds"},
      {"pet", {"family"}, "nice families and polynomial exhaustion depth d, k = d + 1"},
      {"decompose", {"sequence", "window", "ladder", "epsilon"}, "nil plus small-residual decomposition along a basis ladder"},
      {"density", {"polynomial", "deltas", "window"}, "density of fractional parts in [1 - delta, 1)"},
  };
  return c;
}

void validate_config(const ExperimentConfig& cfg) {
  const ScenarioInfo& info = info_for(cfg.scenario);
  for (const auto& key : info.required) {
    if (key == "seed") {
      cfg.require_seed(cfg.scenario);
    } else {
      require(cfg.doc, key, "config");
    }
  }
  const json& doc = cfg.doc;
  if (doc.contains("system")) parse_system(doc.at("system"), cfg.seed);
  if (doc.contains("iterates") && doc.contains("observables")) parse_correlation(doc, cfg.seed);
  if (doc.contains("window")) parse_window(doc.at("window"));
  if (doc.contains("windows")) {
    for (const json& w : doc.at("windows")) parse_window(w);
  }
  if (doc.contains("family")) parse_family(doc.at("family"));
  if (doc.contains("ladder")) parse_ladder(doc.at("ladder"));
  if (doc.contains("polynomial")) parse_polynomial(doc.at("polynomial"));
  if (doc.contains("sequence") && doc.at("sequence").value("kind", std::string()) == "random_signs") {
    cfg.require_seed("random_signs sequence");
  }
}

RunReport run_scenario(const ExperimentConfig& cfg) {
  const auto it = runners().find(cfg.scenario);
  if (it == runners().end()) throw ConfigError("unknown scenario '" + cfg.scenario + "'");
  const auto t0 = std::chrono::steady_clock::now();
  RunReport rep;
  try {
    rep = it->second(cfg);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  rep.scenario = cfg.scenario;
  rep.exercises = info_for(cfg.scenario).exercises;
  if (cfg.seed) rep.result["seed"] = *cfg.seed;
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

void write_artifacts(const RunReport& report, const ExperimentConfig& cfg) {
  std::filesystem::create_directories(cfg.output_dir);
  {
    std::ofstream out(cfg.csv_path(), std::ios::binary);
    out << report.csv;
  }
  std::ofstream out(cfg.json_path(), std::ios::binary);
  out << report.to_json().dump(2) << '\n';
}

}  // namespace ergolab

#include "weightlab/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "weightlab/convexity.hpp"

namespace weightlab {

namespace {

GridSpec apply_overrides(GridSpec g, const RunOptions& opt) {
  if (opt.grid_depth) g.depth = *opt.grid_depth;
  if (opt.points_per_level) g.points_per_level = *opt.points_per_level;
  g.validate();
  return g;
}

Json grid_json(const AnalysisConfig& cfg) {
  Json g;
  g["depth"] = cfg.grid.depth;
  g["points_per_level"] = cfg.grid.points_per_level;
  g["x_floor"] = json_number(cfg.grid.x_floor);
  g["prefix_points"] = cfg.grid.prefix_points;
  Json edges = Json::array();
  for (double e : cfg.grid.level_edges) edges.push_back(json_number(e));
  g["level_edges"] = edges;
  Json t;
  t["K"] = cfg.tail.K;
  t["rel_tol"] = json_number(cfg.tail.rel_tol);
  t["tail_levels"] = cfg.tail.tail_levels;
  Json p;
  p["grid"] = g;
  p["tail"] = t;
  return p;
}

Json weight_json(const RadialWeight& w) {
  Json j;
  j["label"] = w.label();
  j["domain"] = w.domain().name();
  return j;
}

void add_traces(std::vector<CsvFile>& out, const ConditionReport& r, const std::string& prefix = "") {
  const std::string name = prefix.empty() ? r.id : prefix + "." + r.id;
  if (!r.trace.empty()) {
    CsvFile f{name, {"x", "value"}, {}};
    for (const auto& [x, y] : r.trace) f.rows.push_back({x, y});
    out.push_back(std::move(f));
  }
  for (const auto& p : r.parts) add_traces(out, p, name);
}

Json assertion(const std::string& name, bool passed, double value, const std::string& expected) {
  Json j;
  j["name"] = name;
  j["passed"] = passed;
  j["value"] = json_number(value);
  j["expected"] = expected;
  return j;
}

CsvFile profile_csv(const std::string& name, const RadialWeight& v, const RadialWeight& v_bar, const GridSpec& g) {
  auto kinks = v.kinks();
  auto kb = v_bar.kinks();
  kinks.insert(kinks.end(), kb.begin(), kb.end());
  LogProfile p = make_grid(v.domain(), g, kinks);
  CsvFile f{name, {"x", "phi", "phi_bar"}, {}};
  for (double x : p.xs) f.rows.push_back({x, v.log_at(x), v_bar.log_at(x)});
  return f;
}

int exit_code_for(Boundedness b) {
  switch (b) {
    case Boundedness::Bounded: return 0;
    case Boundedness::Unbounded: return 1;
    case Boundedness::Inconclusive: return 2;
  }
  return 2;
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

Json json_number(double v) {
  if (!std::isfinite(v)) return format_number(v);
  return std::strtod(format_number(v).c_str(), nullptr);
}

Json to_json(const AsymptoticEstimate& e) {
  Json j;
  j["kind"] = to_string(e.kind);
  j["trend"] = to_string(e.trend);
  j["value"] = json_number(e.value);
  j["confidence"] = to_string(e.confidence);
  j["overall"] = json_number(e.overall());
  j["exponent"] = json_number(e.exponent);
  j["mean_last"] = json_number(e.mean_last);
  Json ws = Json::array();
  for (const auto& w : e.windows) {
    Json row;
    row["level"] = w.level;
    row["x_lo"] = json_number(w.x_lo);
    row["x_hi"] = json_number(w.x_hi);
    row["max"] = json_number(w.max);
    row["min"] = json_number(w.min);
    ws.push_back(row);
  }
  j["windows"] = ws;
  return j;
}

Json to_json(const ConditionReport& r) {
  Json j;
  j["id"] = r.id;
  j["statement"] = r.statement;
  j["verdict"] = to_string(r.verdict);
  j["scalar"] = r.scalar ? json_number(*r.scalar) : Json();
  j["detail"] = r.detail;
  Json values = Json::object();
  for (const auto& [k, v] : r.values) values[k] = json_number(v);
  j["values"] = values;
  j["estimate"] = r.estimate ? to_json(*r.estimate) : Json();
  if (!r.parts.empty()) {
    Json parts = Json::array();
    for (const auto& p : r.parts) parts.push_back(to_json(p));
    j["parts"] = parts;
  }
  return j;
}

Json to_json(const OperatorVerdict& v) {
  Json j;
  j["operator"] = to_string(v.op);
  j["v"] = v.v_label;
  j["w"] = v.w_label;
  j["direction"] = v.op == Operator::D ? "H_v -> H_w" : "H_w -> H_v";
  j["verdict"] = to_string(v.verdict);
  j["theorem"] = v.theorem;
  j["justification"] = v.justification;
  j["norm_lower_bound"] = json_number(v.norm_lower_bound);
  j["monomial_ratio_estimate"] = v.ratio_estimate ? to_json(*v.ratio_estimate) : Json();
  j["warnings"] = v.warnings;
  Json ev = Json::array();
  for (const auto& r : v.evidence) ev.push_back(to_json(r));
  j["evidence"] = ev;
  return j;
}

RadialWeight resolve_weight(const std::string& spec) {
  try {
    return parse_weight_spec(spec);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidParams) throw Error(ErrorCode::WeightInvalid, spec + ": " + e.what());
    throw;
  }
}

RadialWeight resolve_partner(const std::string& spec, const RadialWeight& v) {
  if (spec == "same") return v;
  if (spec == "auto:v-over-1-minus-r") return divide_by_one_minus_r(v);
  return resolve_weight(spec);
}

ReportDocument run_analyze(const std::string& spec, const RunOptions& opt) {
  const RadialWeight v = resolve_weight(spec);
  AnalysisConfig cfg;
  cfg.grid = apply_overrides(cfg.grid, opt);
  if (std::string bad = check_weight_invariants(v, cfg.grid); !bad.empty())
    throw Error(ErrorCode::WeightInvalid, v.label() + ": " + bad);

  ReportDocument doc;
  Json& j = doc.json;
  j["schema_version"] = kSchemaVersion;
  j["command"] = "analyze";
  j["inputs"] = {{"spec", spec}, {"weight", weight_json(v)}};
  j["provenance"] = grid_json(cfg);

  const WeightClassTags tags = classify_weight(v, cfg);
  Json flags = Json::array();
  for (WeightClass c : tags.flags) flags.push_back(to_string(c));
  Json classes;
  classes["flags"] = flags;
  classes["L_v"] = tags.L_v ? json_number(*tags.L_v) : Json();
  Json ev = Json::array();
  for (const auto& r : tags.evidence) ev.push_back(to_json(r));
  classes["evidence"] = ev;
  j["classes"] = classes;

  const bool convex = tags.has(WeightClass::LogConvex);
  Json conditions = Json::array();
  Json lattice = Json::object();
  auto add_battery = [&](const std::string& name, const std::vector<ConditionReport>& reports, bool check_lattice) {
    for (const auto& r : reports) {
      conditions.push_back(to_json(r));
      add_traces(doc.csv, r);
    }
    if (check_lattice) lattice[name] = lattice_violations(reports, convex);
  };
  if (v.domain().is_disc()) {
    add_battery("disc_d", check_disc_d_conditions(v, cfg), true);
    add_battery("disc_i", check_disc_i_conditions(v, cfg), true);
    add_battery("log_domination", {check_log_domination(v, cfg)}, false);
  } else {
    add_battery("plane_d", check_plane_d_conditions(v, cfg), false);
    add_battery("plane_i", check_plane_i_conditions(v, cfg), false);
    add_battery("epimorphism", {check_epimorphism_plane(v, cfg)}, false);
  }
  j["conditions"] = conditions;
  j["lattice_violations"] = lattice;
  for (const auto& r : tags.evidence) add_traces(doc.csv, r, "class");
  return doc;
}

ReportDocument run_verdict(Operator op, const std::string& spec_v, const std::string& spec_w, const RunOptions& opt) {
  const RadialWeight v = resolve_weight(spec_v);
  const RadialWeight w = resolve_partner(spec_w, v);
  AnalysisConfig cfg;
  cfg.grid = apply_overrides(cfg.grid, opt);
  const OperatorVerdict verdict = boundedness_verdict(op, v, w, cfg);

  ReportDocument doc;
  Json& j = doc.json;
  j["schema_version"] = kSchemaVersion;
  j["command"] = "verdict";
  j["inputs"] = {{"operator", to_string(op)}, {"v_spec", spec_v}, {"w_spec", spec_w}, {"v", weight_json(v)},
                 {"w", weight_json(w)}};
  j["provenance"] = grid_json(cfg);
  j["result"] = to_json(verdict);
  for (const auto& r : verdict.evidence) add_traces(doc.csv, r);
  doc.exit_code = exit_code_for(verdict.verdict);
  return doc;
}

ReportDocument run_counterexample(const std::string& which, const CounterexampleParams& params, const RunOptions& opt) {
  ReportDocument doc;
  Json& j = doc.json;
  j["schema_version"] = kSchemaVersion;
  j["command"] = "counterexample";
  Json inputs;
  inputs["which"] = which;
  Json asserts = Json::array();
  bool all = true;
  auto check = [&](const std::string& name, bool ok, double value, const std::string& expected) {
    asserts.push_back(assertion(name, ok, value, expected));
    all = all && ok;
  };
  Json conditions = Json::array();
  auto keep = [&](const ConditionReport& r, const std::string& prefix) {
    Json c = to_json(r);
    c["weight"] = prefix;
    conditions.push_back(c);
    add_traces(doc.csv, r, prefix);
  };

  std::optional<CounterexampleBundle> bundle;
  if (which == "ex1" || which == "ex2") {
    SequencePair s = which == "ex1" ? default_disc_sequences() : default_plane_sequences();
    if (params.a) s.a = SequenceExpr::parse(*params.a);
    if (params.b) s.b = SequenceExpr::parse(*params.b);
    if (params.n_max) s.n_max = *params.n_max;
    inputs["a"] = s.a.text();
    inputs["b"] = s.b.text();
    inputs["n_max"] = s.n_max;
    bundle = which == "ex1" ? build_example_d_disc(s) : build_example_d_plane(s);
  } else if (which == "ex3") {
    SequenceExpr eps = params.eps ? SequenceExpr::parse(*params.eps) : default_eps_sequence();
    const int n_max = params.n_max.value_or(12);
    inputs["eps"] = eps.text();
    inputs["n_max"] = n_max;
    bundle = build_example_i_plane(eps, n_max);
  } else {
    throw Error(ErrorCode::ParseError, "unknown counterexample '" + which + "' (ex1, ex2, ex3)");
  }
  const CounterexampleBundle& b = *bundle;
  AnalysisConfig cfg;
  cfg.grid = apply_overrides(b.grid, opt);
  j["inputs"] = inputs;
  j["provenance"] = grid_json(cfg);
  Json constants = Json::object();
  for (const auto& [k, val] : b.constants) constants[k] = json_number(val);
  j["constants"] = constants;
  j["weights"] = {{"v", weight_json(b.v)}, {"v_bar", weight_json(b.v_bar)}};
  doc.csv.push_back(profile_csv("phi", b.v, b.v_bar, cfg.grid));

  if (which == "ex1" || which == "ex2") {
    // Closed-form minorant against the computed hull.
    const LogProfile p = sample_log_profile(b.v, cfg.grid);
    const auto hull = convex_minorant(p);
    double err = 0.0;
    for (std::size_t n = 0; n < b.breakpoints.size(); ++n)
      if (b.breakpoints[n] >= p.xs.front() && b.breakpoints[n] <= p.xs.back())
        err = std::max(err, std::abs(hull.value_at(b.breakpoints[n]) - b.phi_bar_values[n]));
    check("hull_matches_closed_form", err <= 1e-9, err, "<= 1e-9");
  }
  if (which == "ex1") {
    auto raw = check_disc_d_conditions(b.v, cfg);
    auto bar = check_disc_d_conditions(b.v_bar, cfg);
    const auto& bar_i = find_report(bar, "disc_d.slope_limsup");
    const double limit = b.constant("minorant_limit");
    const double got = bar_i.estimate ? bar_i.estimate->value : NAN;
    check("minorant_slope_limit", std::abs(got - limit) <= 0.05 * limit, got, "2(L+1) = " + format_number(limit));
    const auto& raw_i = find_report(raw, "disc_d.slope_limsup");
    check("raw_slope_diverges", raw_i.estimate && raw_i.estimate->trend == TrendKind::DivergesToInfinity,
          raw_i.scalar.value_or(NAN), "DivergesToInfinity");
    const auto& raw_iv = find_report(raw, "disc_d.dyadic_ratio");
    check("raw_dyadic_ratio_finite", raw_iv.verdict == Verdict::Holds, raw_iv.scalar.value_or(NAN), "finite sup");
    const auto violations = lattice_violations(raw, false);
    check("lattice_consistent", violations.empty(), static_cast<double>(violations.size()), "0 violations");
    const OperatorVerdict vd = boundedness_verdict(Operator::D, b.v, divide_by_one_minus_r(b.v), cfg);
    check("verdict_D_bounded", vd.verdict == Boundedness::Bounded, vd.norm_lower_bound, "Bounded");
    for (const auto& r : raw) keep(r, "v");
    for (const auto& r : bar) keep(r, "v_bar");
    j["verdict"] = to_json(vd);
  } else if (which == "ex2") {
    auto raw = check_plane_d_conditions(b.v, cfg);
    auto bar = check_plane_d_conditions(b.v_bar, cfg);
    const auto& raw_s = find_report(raw, "plane_d.slope_limsup");
    check("raw_slope_limsup_infinite", raw_s.verdict == Verdict::Fails, raw_s.scalar.value_or(NAN), "Fails");
    const auto& raw_g = find_report(raw, "plane_d.log_growth_linear");
    check("raw_log_growth_linear", raw_g.verdict == Verdict::Holds, raw_g.scalar.value_or(NAN), "Holds");
    const auto& bar_s = find_report(bar, "plane_d.slope_limsup");
    check("minorant_slope_limsup_finite", bar_s.verdict == Verdict::Holds, bar_s.scalar.value_or(NAN), "Holds");
    const OperatorVerdict vd = boundedness_verdict(Operator::D, b.v, b.v, cfg);
    check("verdict_D_bounded", vd.verdict == Boundedness::Bounded, vd.norm_lower_bound, "Bounded");
    for (const auto& r : raw) keep(r, "v");
    for (const auto& r : bar) keep(r, "v_bar");
    j["verdict"] = to_json(vd);
  } else {
    const double C = b.constant("C");
    const LogProfile p = sample_log_profile(b.v, cfg.grid);
    double dev = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) dev = std::max(dev, std::abs(p.phis[i] - std::exp(p.xs[i])));
    check("sandwich", dev <= C + 1e-9, dev, "<= C = " + format_number(C));
    auto raw = check_plane_i_conditions(b.v, cfg);
    const auto& lim = find_report(raw, "plane_i.slope_liminf");
    check("liminf_decays_to_zero", lim.estimate && lim.estimate->trend == TrendKind::DecaysToZero,
          lim.scalar.value_or(NAN), "DecaysToZero");
    const OperatorVerdict vbar = boundedness_verdict(Operator::I, b.v_bar, b.v_bar, cfg);
    check("verdict_I_v_bar_bounded", vbar.verdict == Boundedness::Bounded, vbar.norm_lower_bound, "Bounded");
    const OperatorVerdict vd = boundedness_verdict(Operator::I, b.v, b.v, cfg);
    const bool transfer = vd.justification.find("norm-equivalent") != std::string::npos;
    check("verdict_I_bounded_by_equivalence", vd.verdict == Boundedness::Bounded && transfer, vd.norm_lower_bound,
          "Bounded via a norm-equivalent weight");
    for (const auto& r : raw) keep(r, "v");
    j["verdict"] = to_json(vd);
  }
  j["assertions"] = asserts;
  j["conditions"] = conditions;
  doc.exit_code = all ? 0 : 1;
  return doc;
}

ReportDocument run_norms(const std::string& spec_v, const std::optional<std::string>& spec_w,
                         const std::optional<Operator>& op, const RunOptions& opt) {
  const RadialWeight v = resolve_weight(spec_v);
  AnalysisConfig cfg;
  cfg.grid = apply_overrides(cfg.grid, opt);
  if (opt.N < 0) throw Error(ErrorCode::InvalidParams, "N must be >= 0");
  const LogProfile p = sample_log_profile(v, cfg.grid);
  MonomialNorms m = monomial_log_norms(p, opt.N, BoundaryPolicy::Flag);
  refine_monomial_log_norms(m, v, p);

  ReportDocument doc;
  Json& j = doc.json;
  j["schema_version"] = kSchemaVersion;
  j["command"] = "norms";
  Json inputs;
  inputs["v_spec"] = spec_v;
  inputs["v"] = weight_json(v);
  inputs["N"] = opt.N;
  if (op) inputs["operator"] = to_string(*op);
  if (spec_w) inputs["w_spec"] = *spec_w;
  j["inputs"] = inputs;
  j["provenance"] = grid_json(cfg);

  CsvFile table{"norms", {"n", "A_n", "x_n", "grid_limited"}, {}};
  Json rows = Json::array();
  for (int n = 0; n <= m.N(); ++n) {
    table.rows.push_back({double(n), m.A[n], m.x[n], m.grid_limited[n] ? 1.0 : 0.0});
    rows.push_back({{"n", n}, {"A_n", json_number(m.A[n])}, {"x_n", json_number(m.x[n])},
                    {"grid_limited", static_cast<bool>(m.grid_limited[n])}});
  }
  j["norms"] = rows;
  doc.csv.push_back(std::move(table));

  if (op) {
    const RadialWeight w = resolve_partner(spec_w.value_or("same"), v);
    // Enough dyadic blocks of n for the trend classifier.
    const int N = std::max(opt.N, 256);
    MonomialRatios mr = monomial_norm_ratios(*op, v, w, N, cfg.grid);
    CsvFile trace{"ratios", {"n", "ratio"}, {}};
    Json rr = Json::array();
    for (int n = 0; n <= N; ++n) {
      if (std::isnan(mr.ratio[n])) continue;
      trace.rows.push_back({double(n), mr.ratio[n]});
      rr.push_back({{"n", n}, {"ratio", json_number(mr.ratio[n])}});
    }
    Json rj;
    rj["w"] = weight_json(w);
    rj["N"] = N;
    rj["sup"] = json_number(mr.sup);
    rj["norm_lower_bound"] = json_number(std::exp(mr.sup));
    try {
      rj["trend"] = to_json(ratio_trend(mr, cfg.tail));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::TooFewLevels) throw;
      rj["trend"] = Json();
      rj["trend_note"] = e.what();
    }
    rj["values"] = rr;
    j["ratios"] = rj;
    doc.csv.push_back(std::move(trace));
  }
  return doc;
}

std::string format_csv(const CsvFile& f) {
  std::ostringstream os;
  for (std::size_t i = 0; i < f.header.size(); ++i) os << (i ? "," : "") << f.header[i];
  os << '\n';
  for (const auto& row : f.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_number(row[i]);
    os << '\n';
  }
  return os.str();
}

void write_report(const ReportDocument& doc, const std::string& dir, bool json, bool csv) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  if (json) {
    std::ofstream out(fs::path(dir) / "report.json");
    if (!out) throw Error(ErrorCode::ParseError, "cannot write " + (fs::path(dir) / "report.json").string());
    out << doc.json.dump(2) << '\n';
  }
  if (csv)
    for (const auto& f : doc.csv) {
      std::ofstream out(fs::path(dir) / (f.name + ".csv"));
      if (!out) throw Error(ErrorCode::ParseError, "cannot write " + f.name + ".csv");
      out << format_csv(f);
    }
}

}  // namespace weightlab

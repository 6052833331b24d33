#include "weightlab/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace weightlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double dt_dx(double x) { return 1.0 / std::expm1(-x); }

std::vector<double> merged_kinks(const RadialWeight& a, const RadialWeight& b) {
  auto k = a.kinks();
  auto kb = b.kinks();
  k.insert(k.end(), kb.begin(), kb.end());
  return k;
}

// phi_a - phi_b is constant on the grid (relative to the profile scale).
bool same_up_to_constant(const RadialWeight& a, const RadialWeight& b, const GridSpec& g) {
  LogProfile p = make_grid(a.domain(), g, merged_kinks(a, b));
  double ref = a.log_at(p.xs.front()) - b.log_at(p.xs.front());
  for (double x : p.xs) {
    double pa = a.log_at(x), pb = b.log_at(x);
    double tol = 1e-9 * std::max({1.0, std::abs(pa), std::abs(pb)});
    if (!(std::abs(pa - pb - ref) <= tol)) return false;
  }
  return true;
}

Verdict decide_battery(const std::vector<ConditionReport>& reports, std::size_t primary, std::string& used) {
  if (reports[primary].verdict != Verdict::Inconclusive) {
    used = reports[primary].id;
    return reports[primary].verdict;
  }
  for (const auto& r : reports)
    if (r.verdict != Verdict::Inconclusive) {
      used = r.id;
      return r.verdict;
    }
  return Verdict::Inconclusive;
}

}  // namespace

const char* to_string(Operator op) { return op == Operator::D ? "D" : "I"; }

Operator parse_operator(const std::string& s) {
  if (s == "D" || s == "d") return Operator::D;
  if (s == "I" || s == "i") return Operator::I;
  throw Error(ErrorCode::ParseError, "operator must be D or I, got '" + s + "'");
}

const char* to_string(Boundedness b) {
  switch (b) {
    case Boundedness::Bounded: return "Bounded";
    case Boundedness::Unbounded: return "Unbounded";
    case Boundedness::Inconclusive: return "Inconclusive";
  }
  return "";
}

PolyFunction::PolyFunction(std::vector<double> c) : coeffs(std::move(c)) {
  for (double a : coeffs)
    if (!(a >= 0.0) || !std::isfinite(a)) throw Error(ErrorCode::InvalidParams, "coefficients must be finite and >= 0");
}

PolyFunction PolyFunction::monomial(int n) {
  if (n < 0) throw Error(ErrorCode::InvalidParams, "monomial degree must be >= 0");
  std::vector<double> c(n + 1, 0.0);
  c[n] = 1.0;
  return PolyFunction(std::move(c));
}

bool PolyFunction::is_zero() const {
  return std::all_of(coeffs.begin(), coeffs.end(), [](double a) { return a == 0.0; });
}

PolyFunction apply_D(const PolyFunction& f) {
  PolyFunction g;
  for (std::size_t k = 1; k < f.coeffs.size(); ++k) g.coeffs.push_back(static_cast<double>(k) * f.coeffs[k]);
  return g;
}

PolyFunction apply_I(const PolyFunction& f) {
  PolyFunction g;
  if (f.coeffs.empty()) return g;
  g.coeffs.push_back(0.0);
  for (std::size_t k = 0; k < f.coeffs.size(); ++k) g.coeffs.push_back(f.coeffs[k] / static_cast<double>(k + 1));
  return g;
}

double weighted_log_norm(const PolyFunction& f, const RadialWeight& v, const GridSpec& g) {
  if (f.is_zero()) throw Error(ErrorCode::ZeroFunction, "the zero function has norm 0");
  const LogProfile p = sample_log_profile(v, g);
  std::vector<std::pair<double, double>> terms;  // (k, log a_k)
  for (std::size_t k = 0; k < f.coeffs.size(); ++k)
    if (f.coeffs[k] > 0.0) terms.emplace_back(static_cast<double>(k), std::log(f.coeffs[k]));
  double best = -kInf;
  if (f.coeffs[0] > 0.0) best = std::log(f.coeffs[0]) - v.log_at(-kInf);
  for (std::size_t i = 0; i < p.size(); ++i) {
    double m = -kInf;
    for (const auto& [k, la] : terms) m = std::max(m, k * p.xs[i] + la);
    double s = 0.0;
    for (const auto& [k, la] : terms) s += std::exp(k * p.xs[i] + la - m);
    best = std::max(best, m + std::log(s) - p.phis[i]);
  }
  return best;
}

RadialWeight v_rho_weight(const RadialWeight& v) {
  std::vector<double> kinks;
  if (v.domain().is_disc()) {
    // r' = (1+r)/2, so x' = log1p(expm1(x)/2) and x = log(2 e^{x'} - 1).
    for (double k : v.kinks()) {
      double r = 2.0 * std::exp(k) - 1.0;
      if (r > 0.0) kinks.push_back(std::log(r));
    }
    ClosedForm cf{"(2/(1-r)) v((1+r)/2)",
                  [v](double x) { return std::log(2.0) + disc_t_from_x(x) + v.log_at(std::log1p(0.5 * std::expm1(x))); },
                  [v](double x) {
                    double xp = std::log1p(0.5 * std::expm1(x));
                    return dt_dx(x) + v.slope_at(xp) / (1.0 + std::exp(-x));
                  },
                  kinks};
    return RadialWeight(v.domain(), std::move(cf), "v_rho(" + v.label() + ")");
  }
  for (double k : v.kinks())
    if (k > 0.0) kinks.push_back(std::log(std::expm1(k)));
  ClosedForm cf{"v(r+1)", [v](double x) { return v.log_at(std::log1p(std::exp(x))); },
                [v](double x) { return v.slope_at(std::log1p(std::exp(x))) / (1.0 + std::exp(-x)); }, kinks};
  return RadialWeight(v.domain(), std::move(cf), "v_rho(" + v.label() + ")");
}

ConditionReport sufficient_boundedness_check(const RadialWeight& v, const RadialWeight& w, const AnalysisConfig& cfg) {
  if (v.domain() != w.domain())
    throw Error(ErrorCode::DomainMismatch, v.label() + " and " + w.label() + " live on different domains");
  ConditionReport r;
  r.id = "shift_sufficiency";
  r.statement = "v_rho(r) <= C w(r)";
  const RadialWeight vr = v_rho_weight(v);
  LogProfile p = make_grid(v.domain(), cfg.grid, merged_kinks(vr, w));
  std::vector<double> ratio(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) ratio[i] = std::exp(vr.log_at(p.xs[i]) - w.log_at(p.xs[i]));
  try {
    r.estimate = estimate_tail(p, ratio, EstimateKind::Limsup, cfg.tail);
    r.verdict = verdict_finite_limsup(*r.estimate);
    r.scalar = r.estimate->overall();
    r.detail = describe(*r.estimate);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::TooFewLevels) throw;
    r.detail = e.what();
  }
  double c = 0.0;
  for (double q : ratio) c = std::max(c, q);
  r.values.emplace_back("C_grid", c);
  for (std::size_t i = p.main_begin(); i < p.size(); ++i) r.trace.emplace_back(p.xs[i], ratio[i]);
  return r;
}

MonomialRatios monomial_norm_ratios(Operator op, const RadialWeight& v, const RadialWeight& w, int N, const GridSpec& g) {
  if (v.domain() != w.domain())
    throw Error(ErrorCode::DomainMismatch, v.label() + " and " + w.label() + " live on different domains");
  if (N < 1) throw Error(ErrorCode::InvalidParams, "N must be >= 1");
  auto norms = [&](const RadialWeight& u) {
    LogProfile p = sample_log_profile(u, g);
    MonomialNorms m = monomial_log_norms(p, N + 1, BoundaryPolicy::Flag);
    refine_monomial_log_norms(m, u, p);
    return m;
  };
  const MonomialNorms av = norms(v);
  const MonomialNorms aw = norms(w);
  auto need = [](const MonomialNorms& m, int n, const RadialWeight& u) {
    if (m.grid_limited[n])
      throw Error(ErrorCode::GridLimited, "maximizer for n=" + std::to_string(n) + " of " + u.label() +
                                              " is at the grid end; increase the grid depth or lower N");
    return m.A[n];
  };
  MonomialRatios out;
  out.op = op;
  out.ratio.assign(N + 1, kNaN);
  out.sup = -kInf;
  for (int n = 0; n <= N; ++n) {
    double r;
    if (op == Operator::D) {
      if (n == 0) continue;
      r = std::log(static_cast<double>(n)) + need(aw, n - 1, w) - need(av, n, v);
    } else {
      r = -std::log(static_cast<double>(n + 1)) + need(aw, n + 1, w) - need(av, n, v);
    }
    out.ratio[n] = r;
    out.sup = std::max(out.sup, r);
  }
  return out;
}

AsymptoticEstimate ratio_trend(const MonomialRatios& r, const TailOptions& opt) {
  std::vector<Window> ws;
  const int N = static_cast<int>(r.ratio.size()) - 1;
  for (int k = 0; (1 << k) <= N; ++k) {
    Window w;
    w.level = k;
    w.x_lo = static_cast<double>(1 << k);
    w.x_hi = std::min<double>(N, (2 << k) - 1);
    w.max = -kInf;
    w.min = kInf;
    for (int n = 1 << k; n < (2 << k) && n <= N; ++n) {
      if (std::isnan(r.ratio[n])) continue;
      w.max = std::max(w.max, r.ratio[n]);
      w.min = std::min(w.min, r.ratio[n]);
    }
    if (std::isfinite(w.max)) ws.push_back(w);
  }
  const int J = static_cast<int>(ws.size());
  int tail = opt.tail_levels > 0 ? opt.tail_levels : std::max((J + 1) / 2, opt.K + 2);
  tail = std::min(tail, J);
  ws.erase(ws.begin(), ws.end() - tail);
  return estimate_windows(ws, EstimateKind::Limsup, opt);
}

OperatorVerdict boundedness_verdict(Operator op, const RadialWeight& v, const RadialWeight& w, const AnalysisConfig& cfg,
                                    int N) {
  if (v.domain() != w.domain())
    throw Error(ErrorCode::DomainMismatch, v.label() + " and " + w.label() + " live on different domains");
  OperatorVerdict out;
  out.op = op;
  out.v_label = v.label();
  out.w_label = w.label();
  const bool disc = v.domain().is_disc();
  auto conclude = [&](Boundedness b, std::string theorem, std::string text) {
    out.verdict = b;
    out.theorem = std::move(theorem);
    out.justification = std::move(text);
    return out;
  };

  // Monomials z^n witness unboundedness whenever the norm ratios diverge.
  try {
    MonomialRatios mr = op == Operator::D ? monomial_norm_ratios(Operator::D, v, w, N, cfg.grid)
                                          : monomial_norm_ratios(Operator::I, w, v, N, cfg.grid);
    out.norm_lower_bound = std::exp(mr.sup);
    out.ratio_estimate = ratio_trend(mr, cfg.tail);
    if (verdict_finite_limsup(*out.ratio_estimate) == Verdict::Fails)
      return conclude(Boundedness::Unbounded, "monomial-witness",
                      "log ||op z^n|| - log ||z^n|| diverges; " + describe(*out.ratio_estimate));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::GridLimited && e.code() != ErrorCode::TooFewLevels) throw;
    out.warnings.push_back(std::string("monomial ratios unavailable: ") + e.what());
  }

  if (disc && op == Operator::I && same_up_to_constant(w, v, cfg.grid))
    return conclude(Boundedness::Bounded, "disc-integration-universal",
                    "I: H_v -> H_v is continuous on the disc for every radial weight");

  const bool canonical =
      disc ? same_up_to_constant(w, divide_by_one_minus_r(v), cfg.grid) : same_up_to_constant(w, v, cfg.grid);
  if (!canonical)
    out.warnings.push_back(std::string("pairing is not canonical (expected w = ") + (disc ? "v/(1-r)" : "v") +
                           "); equivalence theorems skipped");

  // Log-convex subject: v itself or its hull when the two are norm-equivalent.
  std::optional<RadialWeight> subject;
  std::string via;
  if (canonical) {
    LogProfile pv = sample_log_profile(v, cfg.grid);
    if (is_log_convex(pv).convex) {
      subject = v;
    } else {
      auto hull = convex_minorant(pv);
      LogProfile hp = minorant_profile(pv, hull);
      ConditionReport eq;
      eq.id = "hull_equivalence";
      eq.statement = "log v - log v_bar is bounded";
      std::vector<double> diff(pv.size());
      for (std::size_t i = 0; i < pv.size(); ++i) diff[i] = pv.phis[i] - hp.phis[i];
      try {
        eq.estimate = estimate_tail(pv, diff, EstimateKind::Limsup, cfg.tail);
        eq.verdict = verdict_finite_limsup(*eq.estimate);
        eq.scalar = *std::max_element(diff.begin(), diff.end());
        eq.detail = describe(*eq.estimate);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::TooFewLevels) throw;
        eq.detail = e.what();
      }
      for (std::size_t i = pv.main_begin(); i < pv.size(); ++i) eq.trace.emplace_back(pv.xs[i], diff[i]);
      if (eq.verdict == Verdict::Holds) {
        subject = minorant_weight(hull, v.domain(), "hull(" + v.label() + ")");
        via = " (applied to the norm-equivalent weight " + subject->label() + ")";
      }
      out.evidence.push_back(std::move(eq));
    }
  }

  if (subject) {
    const RadialWeight& s = *subject;
    std::string used;
    if (disc && op == Operator::D) {
      auto reports = check_disc_d_conditions(s, cfg);
      Verdict vd = decide_battery(reports, 0, used);
      out.evidence.insert(out.evidence.end(), reports.begin(), reports.end());
      if (vd != Verdict::Inconclusive)
        return conclude(vd == Verdict::Holds ? Boundedness::Bounded : Boundedness::Unbounded, "disc-derivative-criterion",
                        "log-convex weight with w = v/(1-r): D bounded iff " + used + " holds" + via);
    } else if (!disc && op == Operator::D) {
      auto reports = check_plane_d_conditions(s, cfg);
      Verdict vd = decide_battery(reports, 1, used);
      out.evidence.insert(out.evidence.end(), reports.begin(), reports.end());
      if (vd != Verdict::Inconclusive)
        return conclude(vd == Verdict::Holds ? Boundedness::Bounded : Boundedness::Unbounded, "plane-derivative-criterion",
                        "log-convex weight with w = v: D bounded iff " + used + " holds" + via);
    } else if (!disc) {
      auto reports = check_plane_i_conditions(s, cfg);
      Verdict vd = decide_battery(reports, 0, used);
      out.evidence.insert(out.evidence.end(), reports.begin(), reports.end());
      if (vd != Verdict::Inconclusive)
        return conclude(vd == Verdict::Holds ? Boundedness::Bounded : Boundedness::Unbounded,
                        "plane-integration-criterion",
                        "log-convex weight with w = v: I bounded iff " + used + " holds" + via);
    } else {
      auto reports = check_disc_i_conditions(s, cfg);
      out.evidence.insert(out.evidence.end(), reports.begin(), reports.end());
      for (const auto& r : reports)
        if (r.verdict == Verdict::Holds)
          return conclude(Boundedness::Bounded, "disc-integration-sufficient",
                          "log-convex weight with w = v/(1-r) satisfies " + r.id + via);
      ConditionReport dom = check_log_domination(s, cfg);
      const bool dom_fails = dom.verdict == Verdict::Fails;
      out.evidence.push_back(std::move(dom));
      if (dom_fails)
        return conclude(Boundedness::Unbounded, "disc-integration-log-domination",
                        "log(1/(1-r)) is not O(log v), a necessary condition for I: H_{v/(1-r)} -> H_v" + via);
      WeightClassTags tags = classify_weight(s, cfg);
      if (tags.has(WeightClass::Regular) && tags.L_v && *tags.L_v == 0.0)
        return conclude(Boundedness::Unbounded, "regular-weight-criterion", "regular weight with L_v = 0" + via);
      out.warnings.push_back("disc I with log-convex v: necessity of the slope condition is open");
    }
  }

  // Sufficient conditions.
  ConditionReport suff = op == Operator::D ? sufficient_boundedness_check(v, w, cfg) : check_integral_condition(w, v, cfg);
  const Verdict suff_v = suff.verdict;
  out.evidence.push_back(suff);
  if (suff_v == Verdict::Holds)
    return op == Operator::D ? conclude(Boundedness::Bounded, "shift-sufficiency", "v_rho <= C w on the tail")
                             : conclude(Boundedness::Bounded, "integral-sufficiency",
                                        "(1/v(r)) int_0^r w is bounded");

  // Necessary conditions.
  if (op == Operator::D) {
    ConditionReport nec = check_necessary_derivative_bound(v, w, cfg);
    const Verdict nv = nec.verdict;
    out.evidence.push_back(std::move(nec));
    if (nv == Verdict::Fails)
      return conclude(Boundedness::Unbounded, "derivative-necessity",
                      "the associated-weight derivative bound v~'/w = O(1) fails");
  } else {
    WeightClassTags tags = classify_weight(w, cfg);
    const bool rich = disc ? (tags.has(WeightClass::BBTWeight) || tags.has(WeightClass::HWeight))
                           : tags.has(WeightClass::CKWeight);
    if (rich && suff_v == Verdict::Fails)
      return conclude(Boundedness::Unbounded, "integration-class-criterion",
                      std::string("w is a ") + (disc ? "BBT/H" : "CK") + "-weight and the integral condition fails");
    if (disc && canonical) {
      ConditionReport dom = check_log_domination(v, cfg);
      const bool fails = dom.verdict == Verdict::Fails;
      out.evidence.push_back(std::move(dom));
      if (fails)
        return conclude(Boundedness::Unbounded, "disc-integration-log-domination",
                        "log(1/(1-r)) is not O(log v), a necessary condition for I: H_{v/(1-r)} -> H_v");
    }
  }
  return conclude(Boundedness::Inconclusive, "none", "no sufficient condition holds and no necessary condition fails");
}

}  // namespace weightlab

#include "weightlab/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "weightlab/convexity.hpp"

namespace weightlab {

namespace {

constexpr double kLn2 = 0.69314718055994530942;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Sampled {
  LogProfile p;
  std::vector<double> slope;
  std::vector<double> t;  // disc only
};

Sampled sample(const RadialWeight& v, const GridSpec& g) {
  Sampled s;
  s.p = sample_log_profile(v, g);
  s.slope.resize(s.p.size());
  for (std::size_t i = 0; i < s.p.size(); ++i) s.slope[i] = v.slope_at(s.p.xs[i]);
  if (v.domain().is_disc()) {
    s.t.resize(s.p.size());
    for (std::size_t i = 0; i < s.p.size(); ++i) s.t[i] = disc_t_from_x(s.p.xs[i]);
  }
  return s;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

ConditionReport make(std::string id, std::string statement) {
  ConditionReport r;
  r.id = std::move(id);
  r.statement = std::move(statement);
  return r;
}

void add_trace(ConditionReport& r, const LogProfile& p, const std::vector<double>& values) {
  for (std::size_t i = p.main_begin(); i < p.size(); ++i)
    if (!std::isnan(values[i])) r.trace.emplace_back(p.xs[i], values[i]);
}

using Mapping = Verdict (*)(const AsymptoticEstimate&);

void attach(ConditionReport& r, const std::function<AsymptoticEstimate()>& build, Mapping map) {
  try {
    r.estimate = build();
    r.verdict = map(*r.estimate);
    r.scalar = r.estimate->overall();
    if (r.detail.empty()) r.detail = describe(*r.estimate);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::TooFewLevels) throw;
    r.verdict = Verdict::Inconclusive;
    r.detail = e.what();
  }
}

int tail_count(int J, const TailOptions& opt) {
  int tail = opt.tail_levels > 0 ? opt.tail_levels : std::max((J + 1) / 2, opt.K + 2);
  return std::min(tail, J);
}

std::vector<Window> last_windows(std::vector<Window> all, int count) {
  if (static_cast<int>(all.size()) > count) all.erase(all.begin(), all.end() - count);
  return all;
}

Window point_window(int level, double x_lo, double x_hi, double value) {
  Window w;
  w.level = level;
  w.x_lo = x_lo;
  w.x_hi = x_hi;
  w.max = value;
  w.min = value;
  return w;
}

// Index of the grid point t = n log 2 (n >= 1) on a disc grid.
std::size_t dyadic_index(const LogProfile& p, int n) { return p.level_range(n - 1).second - 1; }

double phi_at_dyadic(const RadialWeight& v, const LogProfile& p, int n) {
  if (n == 0) return v.log_at(-kInf);
  return p.phis[dyadic_index(p, n)];
}

// Existence over a menu: Holds if any part holds, Fails if all fail.
void combine_exists(ConditionReport& r, const std::string& key) {
  const ConditionReport* chosen = nullptr;
  bool all_fail = !r.parts.empty();
  for (const auto& part : r.parts) {
    if (part.verdict == Verdict::Holds && !chosen) chosen = &part;
    if (part.verdict != Verdict::Fails) all_fail = false;
  }
  if (chosen) {
    r.verdict = Verdict::Holds;
    r.estimate = chosen->estimate;
    r.scalar = chosen->scalar;
    r.trace = chosen->trace;
    for (const auto& kv : chosen->values)
      if (kv.first == key) r.values.push_back(kv);
    r.detail = "holds with " + chosen->id + (chosen->estimate ? "; " + describe(*chosen->estimate) : "");
  } else {
    r.verdict = all_fail ? Verdict::Fails : Verdict::Inconclusive;
    if (!r.parts.empty()) {
      r.estimate = r.parts.front().estimate;
      r.trace = r.parts.front().trace;
    }
    r.detail = all_fail ? "fails for every " + key + " in the menu" : "no " + key + " in the menu is conclusive";
  }
}

// Disc: (1-r) v'/v = slope * (e^{-x} - 1).
std::vector<double> disc_log_derivative(const Sampled& s) {
  std::vector<double> q(s.p.size());
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = s.slope[i] * std::expm1(-s.p.xs[i]);
  return q;
}

std::vector<double> plane_log_derivative(const Sampled& s) {
  std::vector<double> q(s.p.size());
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = s.slope[i] * std::exp(-s.p.xs[i]);
  return q;
}

// Per-level extreme chord slope of phi in t, over pairs starting in the level.
std::vector<Window> chord_slope_windows(const Sampled& s, bool largest, std::vector<double>& chord) {
  const auto& p = s.p;
  chord.assign(p.size(), kNaN);
  for (std::size_t i = p.main_begin(); i + 1 < p.size(); ++i)
    chord[i] = (p.phis[i + 1] - p.phis[i]) / (s.t[i + 1] - s.t[i]);
  std::vector<Window> out;
  for (int level = 0; level < p.depth; ++level) {
    auto [b, e] = p.level_range(level);
    double best = largest ? -kInf : kInf;
    for (std::size_t i = b; i < e && i + 1 < p.size(); ++i)
      best = largest ? std::max(best, chord[i]) : std::min(best, chord[i]);
    if (b < e && std::isfinite(best)) out.push_back(point_window(level, p.xs[b], p.xs[e - 1], best));
  }
  return out;
}

// Level-average slopes sigma_n = (phi(t_{n+1}) - phi(t_n)) / log 2.
std::vector<Window> dyadic_slope_windows(const RadialWeight& v, const LogProfile& p) {
  std::vector<Window> out;
  for (int n = 0; n < p.depth; ++n) {
    double a = phi_at_dyadic(v, p, n), b = phi_at_dyadic(v, p, n + 1);
    double x_lo = n == 0 ? -kInf : p.xs[dyadic_index(p, n)];
    out.push_back(point_window(n, x_lo, p.xs[dyadic_index(p, n + 1)], (b - a) / kLn2));
  }
  return out;
}

// Running maximal excursion of psi = phi - alpha t: upward (later minus earlier) or downward.
std::vector<Window> excursion_windows(const Sampled& s, double alpha, bool upward, std::vector<double>& exc) {
  const auto& p = s.p;
  exc.assign(p.size(), 0.0);
  double extreme = 0.0, best = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double psi = p.phis[i] - alpha * s.t[i];
    if (i == 0) {
      extreme = psi;
    } else {
      best = std::max(best, upward ? psi - extreme : extreme - psi);
      extreme = upward ? std::min(extreme, psi) : std::max(extreme, psi);
    }
    exc[i] = best;
  }
  std::vector<Window> out;
  for (int level = 0; level < p.depth; ++level) {
    auto [b, e] = p.level_range(level);
    if (b < e) out.push_back(point_window(level, p.xs[b], p.xs[e - 1], exc[e - 1]));
  }
  return out;
}

ConditionReport almost_monotone(const RadialWeight& v, const Sampled& s, const AnalysisConfig& cfg, bool decreasing) {
  const char* id = decreasing ? "disc_d.almost_decreasing" : "disc_i.almost_increasing";
  ConditionReport r =
      make(id, decreasing ? "(1-r)^alpha v(r) is almost decreasing on [0,1) for some alpha > 0"
                          : "(1-r)^alpha v(r) is almost increasing on [0,1) for some alpha > 0");
  const int tail = tail_count(s.p.depth, cfg.tail);
  AsymptoticEstimate sigma;
  try {
    sigma = estimate_windows(last_windows(dyadic_slope_windows(v, s.p), tail),
                             decreasing ? EstimateKind::Limsup : EstimateKind::Liminf, cfg.tail);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::TooFewLevels) throw;
    r.detail = e.what();
    return r;
  }
  r.values.emplace_back("level_slope_tail", sigma.overall());
  Verdict sv = decreasing ? verdict_finite_limsup(sigma) : verdict_positive_liminf(sigma);
  if (sv == Verdict::Fails) {
    r.verdict = Verdict::Fails;
    r.estimate = sigma;
    r.detail = std::string("dyadic level slopes ") + (decreasing ? "diverge" : "decay to zero") + "; " + describe(sigma);
    return r;
  }
  if (sv == Verdict::Inconclusive) {
    r.estimate = sigma;
    r.detail = "dyadic level slopes undecided; " + describe(sigma);
    return r;
  }
  // Menu of alphas starting at the tightest power of two.
  const double bound = sigma.overall();
  std::vector<double> menu;
  if (decreasing) {
    for (int k = -10; k <= 10; ++k)
      if (std::ldexp(1.0, k) >= bound * (1.0 - 1e-9)) menu.push_back(std::ldexp(1.0, k));
  } else {
    for (int k = 10; k >= -10; --k)
      if (std::ldexp(1.0, k) <= bound * (1.0 + 1e-9)) menu.push_back(std::ldexp(1.0, k));
  }
  bool all_diverge = !menu.empty();
  for (double alpha : menu) {
    std::vector<double> exc;
    auto windows = last_windows(excursion_windows(s, alpha, decreasing, exc), tail);
    AsymptoticEstimate est = estimate_windows(windows, EstimateKind::Limsup, cfg.tail);
    Verdict ev = verdict_finite_limsup(est);
    if (ev == Verdict::Holds) {
      r.verdict = Verdict::Holds;
      r.estimate = est;
      r.scalar = std::exp(est.overall());
      r.values.emplace_back("alpha", alpha);
      r.values.emplace_back("C", std::exp(exc.back()));
      add_trace(r, s.p, exc);
      r.detail = "alpha=" + fmt(alpha) + ", excursion constant C=" + fmt(std::exp(exc.back()));
      return r;
    }
    if (ev != Verdict::Fails) all_diverge = false;
    if (!r.estimate) r.estimate = est;
  }
  r.verdict = all_diverge ? Verdict::Fails : Verdict::Inconclusive;
  r.detail = menu.empty() ? "no alpha in 2^-10..2^10 matches the dyadic level slopes"
                          : (all_diverge ? "excursions diverge for every alpha in the menu"
                                         : "excursion bound undecided for the alpha menu");
  if (menu.empty()) r.verdict = Verdict::Inconclusive;
  return r;
}

ConditionReport power_monotone(const Sampled& s, const AnalysisConfig& cfg, bool decreasing) {
  ConditionReport r = make(decreasing ? "disc_d.power_decreasing" : "disc_i.power_increasing",
                           decreasing ? "(1-r)^alpha v(r) is decreasing on [r0,1) for some alpha > 0"
                                      : "(1-r)^alpha v(r) is increasing on [r0,1) for some alpha > 0");
  std::vector<double> chord;
  auto all = chord_slope_windows(s, decreasing, chord);
  // The feasible alpha on a level is the extreme chord slope, searched within [2^-10, 2^10].
  const double lo = std::ldexp(1.0, -10), hi = std::ldexp(1.0, 10);
  for (auto& w : all) {
    double a = w.max;
    if (decreasing) a = a > hi ? kInf : std::max(a, lo);
    else a = a < lo ? 0.0 : std::min(a, hi);
    w.max = w.min = a;
  }
  attach(
      r,
      [&] {
        return estimate_windows(last_windows(all, tail_count(s.p.depth, cfg.tail)),
                                decreasing ? EstimateKind::Limsup : EstimateKind::Liminf, cfg.tail);
      },
      decreasing ? verdict_finite_limsup : verdict_positive_liminf);
  if (r.estimate && r.verdict == Verdict::Holds) {
    // An alpha valid from r0 on: the extreme over the last K levels.
    const auto& ws = r.estimate->windows;
    double a = decreasing ? -kInf : kInf;
    for (std::size_t j = ws.size() - cfg.tail.K; j < ws.size(); ++j)
      a = decreasing ? std::max(a, ws[j].max) : std::min(a, ws[j].min);
    r.values.emplace_back("alpha", a);
    r.detail = "alpha=" + fmt(a) + " from the last " + std::to_string(cfg.tail.K) + " levels; " + r.detail;
  }
  add_trace(r, s.p, chord);
  return r;
}

// Ratio exp(phi(x') - phi(x)) for a disc map x -> x'; NaN when x' leaves the grid range.
std::vector<double> shifted_ratio(const RadialWeight& v, const Sampled& s, const std::function<double(std::size_t)>& tmap,
                                  bool numerator_shifted) {
  const auto& p = s.p;
  const double t_max = s.t.back();
  std::vector<double> out(p.size(), kNaN);
  for (std::size_t i = p.main_begin(); i < p.size(); ++i) {
    double t2 = tmap(i);
    if (!(t2 <= t_max * (1.0 + 1e-12))) continue;
    double phi2 = v.log_at(disc_x_from_t(t2));
    out[i] = numerator_shifted ? std::exp(phi2 - p.phis[i]) : std::exp(p.phis[i] - phi2);
  }
  return out;
}

ConditionReport mobius(const RadialWeight& v, const Sampled& s, const AnalysisConfig& cfg, bool d_condition) {
  ConditionReport r =
      make(d_condition ? "disc_d.mobius_shift" : "disc_i.mobius_contraction",
           d_condition ? "v((r+delta)/(1+delta r)) = O(v(r)) for some delta in (0,1)"
                       : "limsup v(r)/v((r+delta)/(1+delta r)) < 1 for some delta in (0,1)");
  for (double delta : {0.25, 0.5, 0.75}) {
    ConditionReport part = make("delta=" + fmt(delta), r.statement);
    // 1 - r' = (1-r)(1-delta)/(1+delta r)
    auto values = shifted_ratio(
        v, s, [&](std::size_t i) { return s.t[i] + std::log1p(delta * std::exp(s.p.xs[i])) - std::log1p(-delta); },
        d_condition);
    attach(part, [&] { return estimate_tail(s.p, values, EstimateKind::Limsup, cfg.tail); },
           d_condition ? verdict_finite_limsup : verdict_limsup_below_one);
    part.values.emplace_back("delta", delta);
    add_trace(part, s.p, values);
    r.parts.push_back(std::move(part));
  }
  combine_exists(r, "delta");
  return r;
}

void check_same_domain(const RadialWeight& a, const RadialWeight& b) {
  if (a.domain() != b.domain())
    throw Error(ErrorCode::DomainMismatch, a.label() + " and " + b.label() + " live on different domains");
}

void require_domain(const RadialWeight& v, Domain d, const char* what) {
  if (v.domain() != d) throw Error(ErrorCode::DomainMismatch, std::string(what) + " needs a weight on the " + d.name());
}

// log( int_{u0}^{u1} exp(l - l1) du ) for l linear between l0 and l1.
double log_panel_rel(double u0, double u1, double l0, double l1) {
  const double du = u1 - u0;
  if (!(du > 0.0)) return -kInf;
  const double d = l1 - l0;
  if (std::abs(d) < 1e-8) return std::log(du) - 0.5 * d;
  if (d > 0.0) return std::log(du) + std::log(-std::expm1(-d)) - std::log(d);
  return std::log(du) + std::log(std::expm1(-d)) - std::log(-d);
}

// Is phi at least 1 higher after a fixed boundary dilation, checked over the usable grid.
bool shift_gap_ok(const std::vector<double>& from_x, const std::vector<double>& base, const std::function<double(double)>& shifted,
                  const std::function<bool(double)>& in_range) {
  bool any = false;
  for (std::size_t i = 0; i < from_x.size(); ++i) {
    if (!in_range(from_x[i])) continue;
    any = true;
    if (shifted(from_x[i]) - base[i] < 1.0 - 1e-9) return false;
  }
  return any;
}

bool nondecreasing(const std::vector<double>& y, std::size_t from) {
  for (std::size_t i = from + 1; i < y.size(); ++i)
    if (y[i] < y[i - 1] - 1e-9 * std::max(1.0, std::abs(y[i - 1]))) return false;
  return true;
}

}  // namespace

const ConditionReport* ConditionReport::part(const std::string& part_id) const {
  for (const auto& p : parts)
    if (p.id == part_id) return &p;
  return nullptr;
}

const ConditionReport& find_report(const std::vector<ConditionReport>& reports, const std::string& id) {
  for (const auto& r : reports)
    if (r.id == id) return r;
  throw Error(ErrorCode::OutOfRange, "no condition report '" + id + "'");
}

std::vector<ConditionReport> check_disc_d_conditions(const RadialWeight& v, const AnalysisConfig& cfg) {
  require_domain(v, Domain::disc(), "disc D conditions");
  const Sampled s = sample(v, cfg.grid);
  const auto& p = s.p;
  std::vector<ConditionReport> out;

  {
    ConditionReport r = make("disc_d.slope_limsup", "limsup (1-r) v'(r)/v(r) < inf");
    auto q = disc_log_derivative(s);
    attach(r, [&] { return estimate_tail(p, q, EstimateKind::Limsup, cfg.tail); }, verdict_finite_limsup);
    add_trace(r, p, q);
    out.push_back(std::move(r));
  }
  out.push_back(power_monotone(s, cfg, true));
  out.push_back(almost_monotone(v, s, cfg, true));
  {
    ConditionReport r = make("disc_d.dyadic_ratio", "sup_n v(1-2^{-n-1})/v(1-2^{-n}) < inf");
    std::vector<Window> all;
    for (int n = 0; n < p.depth; ++n) {
      double ratio = std::exp(phi_at_dyadic(v, p, n + 1) - phi_at_dyadic(v, p, n));
      all.push_back(point_window(n, n == 0 ? -kInf : p.xs[dyadic_index(p, n)], p.xs[dyadic_index(p, n + 1)], ratio));
      r.trace.emplace_back(p.xs[dyadic_index(p, n + 1)], ratio);
    }
    double sup = -kInf;
    for (const auto& w : all) sup = std::max(sup, w.max);
    attach(r, [&] { return estimate_windows(last_windows(all, tail_count(p.depth, cfg.tail)), EstimateKind::Limsup, cfg.tail); },
           verdict_finite_limsup);
    r.scalar = sup;
    r.values.emplace_back("sup", sup);
    out.push_back(std::move(r));
  }
  out.push_back(mobius(v, s, cfg, true));
  {
    ConditionReport r = make("disc_d.square_ratio", "v(r) = O(v(r^2))");
    std::vector<double> values(p.size(), kNaN);
    for (std::size_t i = p.main_begin(); i < p.size(); ++i) values[i] = std::exp(p.phis[i] - v.log_at(2.0 * p.xs[i]));
    attach(r, [&] { return estimate_tail(p, values, EstimateKind::Limsup, cfg.tail); }, verdict_finite_limsup);
    add_trace(r, p, values);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ConditionReport> check_disc_i_conditions(const RadialWeight& v, const AnalysisConfig& cfg) {
  require_domain(v, Domain::disc(), "disc I conditions");
  const Sampled s = sample(v, cfg.grid);
  const auto& p = s.p;
  std::vector<ConditionReport> out;
  {
    ConditionReport r = make("disc_i.slope_liminf", "liminf (1-r) v'(r)/v(r) > 0");
    auto q = disc_log_derivative(s);
    attach(r, [&] { return estimate_tail(p, q, EstimateKind::Liminf, cfg.tail); }, verdict_positive_liminf);
    add_trace(r, p, q);
    out.push_back(std::move(r));
  }
  out.push_back(power_monotone(s, cfg, false));
  out.push_back(almost_monotone(v, s, cfg, false));
  {
    ConditionReport r = make("disc_i.dyadic_contraction", "limsup_n v(1-2^{-n})/v(1-2^{-n-k}) < 1 for some k");
    for (int k = 1; k <= 10; ++k) {
      ConditionReport part = make("k=" + std::to_string(k), r.statement);
      std::vector<Window> all;
      for (int n = 0; n + k <= p.depth; ++n) {
        double ratio = std::exp(phi_at_dyadic(v, p, n) - phi_at_dyadic(v, p, n + k));
        double x_hi = p.xs[dyadic_index(p, n + k)];
        all.push_back(point_window(n, n == 0 ? -kInf : p.xs[dyadic_index(p, n)], x_hi, ratio));
        part.trace.emplace_back(n == 0 ? x_hi : p.xs[dyadic_index(p, n)], ratio);
      }
      attach(part,
             [&] { return estimate_windows(last_windows(all, tail_count(p.depth - k, cfg.tail)), EstimateKind::Limsup, cfg.tail); },
             verdict_limsup_below_one);
      part.values.emplace_back("k", k);
      r.parts.push_back(std::move(part));
    }
    combine_exists(r, "k");
    out.push_back(std::move(r));
  }
  out.push_back(mobius(v, s, cfg, false));
  {
    ConditionReport r = make("disc_i.power_contraction", "limsup v(r^gamma)/v(r) < 1 for some gamma > 1");
    for (double gamma : {2.0, 3.0, 4.0, 8.0}) {
      ConditionReport part = make("gamma=" + fmt(gamma), r.statement);
      std::vector<double> values(p.size(), kNaN);
      for (std::size_t i = p.main_begin(); i < p.size(); ++i)
        values[i] = std::exp(v.log_at(gamma * p.xs[i]) - p.phis[i]);
      attach(part, [&] { return estimate_tail(p, values, EstimateKind::Limsup, cfg.tail); }, verdict_limsup_below_one);
      part.values.emplace_back("gamma", gamma);
      add_trace(part, p, values);
      r.parts.push_back(std::move(part));
    }
    combine_exists(r, "gamma");
    out.push_back(std::move(r));
  }
  {
    ConditionReport r = check_integral_condition(divide_by_one_minus_r(v), v, cfg);
    r.id = "disc_i.integral";
    r.statement = "limsup (1/v(r)) int_0^r v(t)/(1-t) dt < inf";
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ConditionReport> check_plane_d_conditions(const RadialWeight& v, const AnalysisConfig& cfg) {
  require_domain(v, Domain::plane(), "plane D conditions");
  const Sampled s = sample(v, cfg.grid);
  const auto& p = s.p;
  std::vector<ConditionReport> out;
  {
    ConditionReport r = make("plane_d.slope_limsup", "limsup v'(r)/v(r) < inf");
    auto q = plane_log_derivative(s);
    attach(r, [&] { return estimate_tail(p, q, EstimateKind::Limsup, cfg.tail); }, verdict_finite_limsup);
    add_trace(r, p, q);
    out.push_back(std::move(r));
  }
  {
    ConditionReport r = make("plane_d.log_growth_linear", "log v(r) = O(r)");
    std::vector<double> q(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) q[i] = p.phis[i] * std::exp(-p.xs[i]);
    attach(r, [&] { return estimate_tail(p, q, EstimateKind::Limsup, cfg.tail); }, verdict_finite_limsup);
    add_trace(r, p, q);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ConditionReport> check_plane_i_conditions(const RadialWeight& v, const AnalysisConfig& cfg) {
  require_domain(v, Domain::plane(), "plane I conditions");
  const Sampled s = sample(v, cfg.grid);
  std::vector<ConditionReport> out;
  {
    ConditionReport r = make("plane_i.slope_liminf", "liminf v'(r)/v(r) > 0");
    auto q = plane_log_derivative(s);
    attach(r, [&] { return estimate_tail(s.p, q, EstimateKind::Liminf, cfg.tail); }, verdict_positive_liminf);
    add_trace(r, s.p, q);
    out.push_back(std::move(r));
  }
  {
    ConditionReport r = check_integral_condition(v, v, cfg);
    r.id = "plane_i.integral";
    r.statement = "limsup (1/v(r)) int_0^r v(t) dt < inf";
    out.push_back(std::move(r));
  }
  return out;
}

ConditionReport check_integral_condition(const RadialWeight& w, const RadialWeight& v, const AnalysisConfig& cfg) {
  check_same_domain(w, v);
  ConditionReport r = make("integral_condition", "limsup (1/v(r)) int_0^r w(t) dt < inf");
  auto kinks = v.kinks();
  auto wk = w.kinks();
  kinks.insert(kinks.end(), wk.begin(), wk.end());
  LogProfile p = make_grid(v.domain(), cfg.grid, kinks);
  const bool disc = v.domain().is_disc();
  // Integrate in t = log(1/(1-r)) on the disc (dr = e^{-t} dt) and in r on the plane.
  // The ratio is advanced recursively so that only neighbouring log values are subtracted.
  double u_prev = 0.0;
  double l_prev = w.log_at(-kInf);
  double lv_prev = v.log_at(-kInf);
  double acc = 0.0;
  std::vector<double> ratio(p.size(), kNaN);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double x = p.xs[i];
    const double u = disc ? disc_t_from_x(x) : std::exp(x);
    const double lw = w.log_at(x);
    const double lv = v.log_at(x);
    const double l = lw - (disc ? u : 0.0);
    const double gap = lw - lv - (disc ? u : 0.0);
    acc = acc * std::exp(lv_prev - lv) + std::exp(log_panel_rel(u_prev, u, l_prev, l) + gap);
    u_prev = u;
    l_prev = l;
    lv_prev = lv;
    ratio[i] = acc;
  }
  attach(r, [&] { return estimate_tail(p, ratio, EstimateKind::Limsup, cfg.tail); }, verdict_finite_limsup);
  add_trace(r, p, ratio);
  r.detail = "w=" + w.label() + ", v=" + v.label() + "; " + r.detail;
  return r;
}

ConditionReport check_log_domination(const RadialWeight& v, const AnalysisConfig& cfg) {
  require_domain(v, Domain::disc(), "log domination");
  ConditionReport r = make("log_domination", "log(1/(1-r)) = O(log v(r))");
  const Sampled s = sample(v, cfg.grid);
  std::vector<double> q(s.p.size());
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = s.p.phis[i] > 0.0 ? s.t[i] / s.p.phis[i] : kInf;
  attach(r, [&] { return estimate_tail(s.p, q, EstimateKind::Limsup, cfg.tail); }, verdict_finite_limsup);
  add_trace(r, s.p, q);
  return r;
}

ConditionReport check_epimorphism_plane(const RadialWeight& v, const AnalysisConfig& cfg) {
  require_domain(v, Domain::plane(), "epimorphism sandwich");
  ConditionReport r = make("epimorphism_sandwich", "(1/A) e^{r/C} <= v(r) <= A e^{Cr} for some A, C");
  const Sampled s = sample(v, cfg.grid);
  const auto& p = s.p;
  const int tail = tail_count(p.depth, cfg.tail);

  // Tri-state "bounded above" for a series on the grid.
  auto bounded_above = [&](const std::vector<double>& y, AsymptoticEstimate& est) {
    est = estimate_tail(p, y, EstimateKind::Limsup, cfg.tail);
    if (est.trend == TrendKind::DivergesToInfinity) return Verdict::Fails;
    const auto& ws = est.windows;
    double early = -kInf, late = -kInf;
    for (std::size_t i = 0; i < p.size() && p.levels[i] < p.depth - tail + static_cast<int>(ws.size()) - cfg.tail.K; ++i)
      early = std::max(early, y[i]);
    for (std::size_t j = ws.size() - cfg.tail.K; j < ws.size(); ++j) late = std::max(late, ws[j].max);
    if (late <= early + 1e-9 * std::max(1.0, std::abs(early))) return Verdict::Holds;
    if (est.trend == TrendKind::ConvergesTo && est.stable()) return Verdict::Holds;
    return Verdict::Inconclusive;
  };

  bool all_fail = true;
  for (int k = 0; k <= 10; ++k) {
    const double C = std::ldexp(1.0, k);
    std::vector<double> upper(p.size()), lower(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
      double er = std::exp(p.xs[i]);
      upper[i] = p.phis[i] - C * er;
      lower[i] = er / C - p.phis[i];
    }
    AsymptoticEstimate eu, el;
    Verdict vu, vl;
    try {
      vu = bounded_above(upper, eu);
      vl = bounded_above(lower, el);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::TooFewLevels) throw;
      r.detail = e.what();
      return r;
    }
    if (vu == Verdict::Holds && vl == Verdict::Holds) {
      double log_a = -kInf;
      for (std::size_t i = 0; i < p.size(); ++i) log_a = std::max({log_a, upper[i], lower[i]});
      log_a = std::max(log_a, 0.0);
      r.verdict = Verdict::Holds;
      r.estimate = eu;
      r.scalar = C;
      r.values.emplace_back("C", C);
      r.values.emplace_back("log_A", log_a);
      add_trace(r, p, lower);
      r.detail = "C=" + fmt(C) + ", log A=" + fmt(log_a) + " (grid maximum)";
      return r;
    }
    if (vu != Verdict::Fails && vl != Verdict::Fails) all_fail = false;
    if (!r.estimate) r.estimate = vu == Verdict::Holds ? el : eu;
  }
  r.verdict = all_fail ? Verdict::Fails : Verdict::Inconclusive;
  r.detail = all_fail ? "one side of the sandwich diverges for every C in 2^0..2^10" : "sandwich undecided for the C menu";
  return r;
}

ConditionReport check_necessary_derivative_bound(const RadialWeight& v, const RadialWeight& w, const AnalysisConfig& cfg) {
  check_same_domain(v, w);
  ConditionReport r = make("necessary_derivative_bound", "limsup v~'(r)/w(r) < inf");
  auto kinks = v.kinks();
  auto wk = w.kinks();
  kinks.insert(kinks.end(), wk.begin(), wk.end());
  GridSpec g = cfg.grid;
  LogProfile p = make_grid(v.domain(), g, kinks);
  p.phis.resize(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) p.phis[i] = v.log_at(p.xs[i]);
  std::vector<double> phibar = p.phis, slope(p.size());
  const bool convex = is_log_convex(p).convex;
  if (convex) {
    for (std::size_t i = 0; i < p.size(); ++i) slope[i] = v.slope_at(p.xs[i]);
  } else {
    auto hull = convex_minorant(p);
    auto hp = minorant_profile(p, hull);
    phibar = hp.phis;
    for (std::size_t i = 0; i < p.size(); ++i)
      slope[i] = i + 1 < p.size() ? right_derivative(hull, p.xs[i]) : hull.slopes.back();
  }
  std::vector<double> ratio(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    double log_r = phibar[i] - w.log_at(p.xs[i]) + std::log(slope[i]) - p.xs[i];
    ratio[i] = slope[i] > 0.0 ? std::exp(log_r) : 0.0;
  }
  attach(r, [&] { return estimate_tail(p, ratio, EstimateKind::Limsup, cfg.tail); }, verdict_finite_limsup);
  add_trace(r, p, ratio);
  r.detail = std::string(convex ? "v is log-convex, used directly" : "v replaced by exp of its largest convex minorant") +
             " as the associated-weight surrogate; " + r.detail;
  return r;
}

ConditionReport check_hl_condition(const RadialWeight& v, const std::vector<double>& n_grid_in, const AnalysisConfig& cfg) {
  ConditionReport r = make("hl_condition", "every radius maximizes r^n/v(r) for some n > 0");
  const LogProfile p = sample_log_profile(v, cfg.grid);
  const std::size_t b = p.main_begin();
  std::vector<double> n_grid = n_grid_in;
  if (n_grid.empty()) {
    double smin = kInf, smax = 0.0;
    for (std::size_t i = b; i + 1 < p.size(); ++i) {
      double s = (p.phis[i + 1] - p.phis[i]) / (p.xs[i + 1] - p.xs[i]);
      if (s > 0.0) {
        smin = std::min(smin, s);
        smax = std::max(smax, s);
      }
    }
    if (smax > 0.0)
      for (double n = smin / 2.0; n <= smax * 2.0; n *= std::exp2(1.0 / 32.0)) n_grid.push_back(n);
  }
  std::vector<char> covered(p.size(), 0);
  for (double n : n_grid) {
    double best = -kInf;
    for (std::size_t i = b; i < p.size(); ++i) best = std::max(best, n * p.xs[i] - p.phis[i]);
    const double tol = 1e-12 * std::max(1.0, std::abs(best));
    for (std::size_t i = b; i < p.size(); ++i)
      if (n * p.xs[i] - p.phis[i] >= best - tol) covered[i] = 1;
  }
  // Gaps: runs of uncovered points between covered ones.
  std::size_t max_gap = 0, certified_gap = 0;
  std::size_t last = p.size();
  for (std::size_t i = b; i < p.size(); ++i) {
    if (!covered[i]) continue;
    if (last != p.size() && i - last - 1 > 0) {
      std::size_t gap = i - last - 1;
      max_gap = std::max(max_gap, gap);
      bool above = true;
      for (std::size_t j = last + 1; j < i && above; ++j) {
        double chord = p.phis[last] + (p.phis[i] - p.phis[last]) * (p.xs[j] - p.xs[last]) / (p.xs[i] - p.xs[last]);
        above = p.phis[j] > chord + 1e-12 * std::max(1.0, std::abs(chord));
      }
      if (above) certified_gap = std::max(certified_gap, gap);
    }
    last = i;
  }
  std::size_t uncovered_ends = 0;
  for (std::size_t i = b; i < p.size() && !covered[i]; ++i) ++uncovered_ends;
  for (std::size_t i = p.size(); i > b && !covered[i - 1]; --i) ++uncovered_ends;
  max_gap = std::max(max_gap, uncovered_ends);
  r.values.emplace_back("n_samples", static_cast<double>(n_grid.size()));
  r.values.emplace_back("max_gap", static_cast<double>(max_gap));
  r.scalar = static_cast<double>(max_gap);
  if (certified_gap >= 3) {
    r.verdict = Verdict::Fails;
  } else if (max_gap <= 1) {
    r.verdict = Verdict::Holds;
  }
  for (std::size_t i = b; i < p.size(); ++i) r.trace.emplace_back(p.xs[i], covered[i] ? 1.0 : 0.0);
  r.detail = "heuristic: " + std::to_string(n_grid.size()) + " sampled n; largest uncovered run " +
             std::to_string(max_gap) + " points, certified non-convex run " + std::to_string(certified_gap);
  return r;
}

const char* to_string(WeightClass c) {
  switch (c) {
    case WeightClass::LogConvex: return "LogConvex";
    case WeightClass::ModerateGrowth: return "ModerateGrowth";
    case WeightClass::RapidlyGrowing: return "RapidlyGrowing";
    case WeightClass::HWeight: return "HWeight";
    case WeightClass::CKWeight: return "CKWeight";
    case WeightClass::BBTWeight: return "BBTWeight";
    case WeightClass::Regular: return "Regular";
    case WeightClass::HLCondition: return "HLCondition";
  }
  return "";
}

WeightClassTags classify_weight(const RadialWeight& v, const AnalysisConfig& cfg) {
  WeightClassTags tags;
  const Sampled s = sample(v, cfg.grid);
  const auto& p = s.p;
  const bool log_convex = is_log_convex(p).convex;
  if (log_convex) tags.flags.insert(WeightClass::LogConvex);

  if (v.domain().is_disc()) {
    auto d = check_disc_d_conditions(v, cfg);
    const auto& dyadic = find_report(d, "disc_d.dyadic_ratio");
    const bool moderate = dyadic.verdict == Verdict::Holds;
    if (moderate) tags.flags.insert(WeightClass::ModerateGrowth);
    tags.evidence.push_back(dyadic);
    if (v.rapidly_growing_construction() && !moderate) tags.flags.insert(WeightClass::RapidlyGrowing);
    if (log_convex && (moderate || tags.has(WeightClass::RapidlyGrowing))) tags.flags.insert(WeightClass::HWeight);

    // BBT: tau = (1-r)(log v)' nondecreasing with tau(1-(1-r)/c) - tau(r) >= 1.
    auto tau = disc_log_derivative(s);
    if (log_convex && nondecreasing(tau, p.main_begin())) {
      const double t_max = s.t.back();
      for (double c : {2.0, 4.0, 8.0, 16.0}) {
        auto shifted = [&](double x) {
          double t2 = disc_t_from_x(x) + std::log(c);
          double x2 = disc_x_from_t(t2);
          return v.slope_at(x2) * std::expm1(-x2);
        };
        std::vector<double> xs(p.xs.begin() + p.main_begin(), p.xs.end());
        std::vector<double> base(tau.begin() + p.main_begin(), tau.end());
        if (shift_gap_ok(xs, base, shifted, [&](double x) { return disc_t_from_x(x) + std::log(c) <= t_max; })) {
          tags.flags.insert(WeightClass::BBTWeight);
          break;
        }
      }
    }
    ConditionReport reg = make("regular", "lim (1-r) v'(r)/v(r) exists");
    attach(reg, [&] { return estimate_tail(p, tau, EstimateKind::Limit, cfg.tail); }, [](const AsymptoticEstimate& e) {
      return e.stable() && e.trend != TrendKind::Oscillating ? Verdict::Holds : Verdict::Inconclusive;
    });
    if (reg.verdict == Verdict::Holds) {
      tags.flags.insert(WeightClass::Regular);
      const auto& e = *reg.estimate;
      tags.L_v = e.trend == TrendKind::DivergesToInfinity ? kInf : (e.trend == TrendKind::DecaysToZero ? 0.0 : e.value);
    }
    tags.evidence.push_back(std::move(reg));
  } else {
    // CK: omega = r (log v)' = d phi/dx nondecreasing with omega(c r) - omega(r) >= 1 for r >= 1.
    if (log_convex && nondecreasing(s.slope, p.main_begin())) {
      const double x_max = p.xs.back();
      std::vector<double> xs, base;
      for (std::size_t i = 0; i < p.size(); ++i)
        if (p.xs[i] >= 0.0) {
          xs.push_back(p.xs[i]);
          base.push_back(s.slope[i]);
        }
      for (double c : {2.0, 4.0, 8.0, 16.0}) {
        const double lc = std::log(c);
        if (shift_gap_ok(xs, base, [&](double x) { return v.slope_at(x + lc); },
                         [&](double x) { return x + lc <= x_max; })) {
          tags.flags.insert(WeightClass::CKWeight);
          break;
        }
      }
    }
  }
  auto hl = check_hl_condition(v, {}, cfg);
  if (hl.verdict == Verdict::Holds) tags.flags.insert(WeightClass::HLCondition);
  tags.evidence.push_back(std::move(hl));
  return tags;
}

std::vector<std::string> lattice_violations(const std::vector<ConditionReport>& reports, bool log_convex) {
  std::vector<std::string> out;
  auto decided = [](const ConditionReport& r) { return r.verdict != Verdict::Inconclusive; };
  auto clash = [&](std::size_t a, std::size_t b, const char* why) {
    out.push_back(reports[a].id + " (" + to_string(reports[a].verdict) + ") vs " + reports[b].id + " (" +
                  to_string(reports[b].verdict) + "): " + why);
  };
  if (reports.size() < 3) return out;
  // (i) <=> (ii)
  if (decided(reports[0]) && decided(reports[1]) && reports[0].verdict != reports[1].verdict)
    clash(0, 1, "first two conditions are equivalent");
  // (i) or (ii) => (iii)
  for (std::size_t a : {0, 1})
    if (reports[a].verdict == Verdict::Holds && reports[2].verdict == Verdict::Fails) clash(a, 2, "forbidden implication");
  // (iii) onwards are equivalent; with log-convexity everything is.
  const std::size_t from = log_convex ? 0 : 2;
  for (std::size_t a = from; a < reports.size(); ++a)
    for (std::size_t b = std::max(a + 1, std::size_t{2}); b < reports.size(); ++b)
      if (decided(reports[a]) && decided(reports[b]) && reports[a].verdict != reports[b].verdict)
        clash(a, b, log_convex ? "conditions are equivalent for log-convex weights" : "conditions are equivalent");
  return out;
}

}  // namespace weightlab

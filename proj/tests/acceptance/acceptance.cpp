// One PASS/FAIL line per acceptance criterion; exit status is the number of failures.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "weightlab/convexity.hpp"
#include "weightlab/counterexamples.hpp"
#include "weightlab/criteria.hpp"
#include "weightlab/operators.hpp"
#include "weightlab/report.hpp"

using namespace weightlab;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::ostringstream note;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      note << " [" << what << "]";
    }
  }
};

AnalysisConfig depth(int J) {
  AnalysisConfig cfg;
  cfg.grid.depth = J;
  return cfg;
}

Outcome criterion1() {
  Outcome o;
  const auto t0 = Clock::now();
  auto b = build_example_d_disc(default_disc_sequences());
  GridSpec g;
  g.depth = 40;
  LogProfile p = sample_log_profile(b.v, g);
  auto hull = convex_minorant(p);
  double err = 0.0;
  int checked = 0;
  for (std::size_t n = 0; n < b.breakpoints.size(); ++n) {
    const double s = b.breakpoints[n];
    if (s < p.xs.front() || s > p.xs.back()) continue;
    err = std::max(err, std::abs(hull.value_at(s) - b.phi_bar_values[n]));
    ++checked;
  }
  const double dt = seconds_since(t0);
  o.require(checked == 30, "checked " + std::to_string(checked) + " breakpoints");
  o.require(err <= 1e-9, "max error " + format_number(err));
  o.require(dt < 1.0, "runtime " + format_number(dt) + " s");
  o.note << " max|hull(S_n)-2n|=" << format_number(err) << " over " << checked << " S_n, " << format_number(dt) << " s";
  return o;
}

Outcome criterion2() {
  Outcome o;
  auto b = build_example_d_disc(default_disc_sequences());
  auto reports = check_disc_d_conditions(b.v_bar, depth(30));
  const auto& r = find_report(reports, "disc_d.slope_limsup");
  o.require(r.estimate.has_value(), "no estimate");
  if (!r.estimate) return o;
  const auto& ws = r.estimate->windows;
  for (std::size_t j = ws.size() - 5; j < ws.size(); ++j)
    o.require(std::abs(ws[j].max - 4.0) <= 0.2, "window " + std::to_string(ws[j].level) + " max " + format_number(ws[j].max));
  o.require(std::abs(r.estimate->value - 4.0) <= 0.2, "estimate " + format_number(r.estimate->value));
  o.note << " last windows";
  for (std::size_t j = ws.size() - 5; j < ws.size(); ++j) o.note << " " << format_number(ws[j].max);
  o.note << "; estimate " << format_number(r.estimate->value) << " (" << to_string(r.estimate->trend) << ")";
  return o;
}

Outcome criterion3() {
  Outcome o;
  auto b = build_example_d_disc(default_disc_sequences());
  auto reports = check_disc_d_conditions(b.v, depth(30));
  const auto& i = find_report(reports, "disc_d.slope_limsup");
  const auto& iv = find_report(reports, "disc_d.dyadic_ratio");
  o.require(i.estimate && i.estimate->trend == TrendKind::DivergesToInfinity, "(i) not divergent");
  o.require(iv.scalar && std::isfinite(*iv.scalar) && iv.verdict == Verdict::Holds, "(iv) sup not finite");
  auto violations = lattice_violations(reports, false);
  o.require(violations.empty(), std::to_string(violations.size()) + " lattice violations");
  o.note << " (i) " << (i.estimate ? to_string(i.estimate->trend) : "none") << ", (iv) sup "
         << format_number(iv.scalar.value_or(NAN)) << ", verdicts";
  for (const auto& r : reports) o.note << " " << to_string(r.verdict);
  return o;
}

Outcome criterion4() {
  Outcome o;
  for (double a : {0.5, 1.0, 2.0, 5.0}) {
    RadialWeight v = make_builtin("power_disc", {a}, Domain::disc());
    auto d = check_disc_d_conditions(v);
    auto in = check_disc_i_conditions(v);
    const auto& i = find_report(d, "disc_d.slope_limsup");
    const auto& iv = find_report(d, "disc_d.dyadic_ratio");
    const auto* g2 = find_report(in, "disc_i.power_contraction").part("gamma=2");
    auto integral = check_integral_condition(divide_by_one_minus_r(v), v);
    const double e1 = i.estimate ? std::abs(i.estimate->value - a) : INFINITY;
    const double e4 = iv.scalar ? std::abs(*iv.scalar - std::pow(2.0, a)) : INFINITY;
    const double e6 = g2 && g2->estimate ? std::abs(g2->estimate->value - std::pow(2.0, -a)) : INFINITY;
    const double e7 = integral.estimate ? std::abs(integral.estimate->value - 1.0 / a) : INFINITY;
    const std::string tag = "alpha=" + format_number(a);
    o.require(e1 <= 1e-6, tag + " (i) err " + format_number(e1));
    o.require(e4 <= 1e-6, tag + " (iv) err " + format_number(e4));
    o.require(e6 <= 1e-4, tag + " gamma=2 err " + format_number(e6));
    o.require(e7 <= 1e-3, tag + " integral err " + format_number(e7));
    o.note << " " << tag << ":" << format_number(e1) << "/" << format_number(e4) << "/" << format_number(e6) << "/"
           << format_number(e7);
  }
  return o;
}

std::vector<RadialWeight> builtins() {
  return {make_builtin("power_disc", {0.5}, Domain::disc()),     make_builtin("power_disc", {2}, Domain::disc()),
          make_builtin("exp_inv_disc", {1, 1}, Domain::disc()),  make_builtin("log_power_disc", {2}, Domain::disc()),
          make_builtin("rapid_disc", {1}, Domain::disc()),       make_builtin("exp_plane", {0.5}, Domain::plane()),
          make_builtin("exp_plane", {1}, Domain::plane()),       make_builtin("exp_plane", {2}, Domain::plane()),
          make_builtin("power_exp_plane", {2, 1}, Domain::plane())};
}

Outcome criterion5() {
  Outcome o;
  RadialWeight v = make_builtin("exp_plane", {1}, Domain::plane());
  GridSpec g = GridSpec{}.refined();
  LogProfile p = sample_log_profile(v, g);
  MonomialNorms m = monomial_log_norms(p, 50, BoundaryPolicy::Flag);
  refine_monomial_log_norms(m, v, p);
  double err = 0.0;
  for (int n = 1; n <= 50; ++n) err = std::max(err, std::abs(m.A[n] - (n * std::log(n) - n)));
  o.require(err <= 1e-6, "Legendre error " + format_number(err));
  int mismatches = 0;
  for (const auto& w : builtins()) {
    LogProfile q = sample_log_profile(w, GridSpec{});
    auto direct = monomial_log_norms(q, 50, BoundaryPolicy::Flag);
    auto via_hull = monomial_log_norms(convex_minorant(q), w.domain(), 50, BoundaryPolicy::Flag);
    if (direct.A != via_hull.A) {
      ++mismatches;
      o.note << " mismatch on " << w.label();
    }
  }
  o.require(mismatches == 0, std::to_string(mismatches) + " hull mismatches");
  o.note << " max|A_n-(n log n-n)|=" << format_number(err) << ", hull agreement on " << builtins().size()
         << " built-ins";
  return o;
}

Outcome criterion6() {
  Outcome o;
  RadialWeight v = make_builtin("exp_plane", {1}, Domain::plane());
  auto d = monomial_norm_ratios(Operator::D, v, v, 200);
  auto i = monomial_norm_ratios(Operator::I, v, v, 200);
  const double r200 = std::exp(d.ratio[200]);
  o.require(std::abs(r200 - 1.0) <= 0.02, "exp(ratio_D(200)) = " + format_number(r200));
  double worst = 0.0;
  for (int n = 0; n <= 199; ++n) worst = std::max(worst, std::abs(std::exp(i.ratio[n]) * std::exp(d.ratio[n + 1]) - 1.0));
  o.require(worst <= 1e-12, "identity error " + format_number(worst));
  o.note << " exp(ratio_D(200))=" << format_number(r200) << ", max identity error " << format_number(worst);
  return o;
}

Outcome criterion7() {
  Outcome o;
  struct Case {
    Operator op;
    RadialWeight v;
    bool canonical_w;  // false: w = v
    Boundedness expected;
  };
  auto disc = [](const char* f, std::vector<double> p) { return make_builtin(f, p, Domain::disc()); };
  auto plane = [](double p) { return make_builtin("exp_plane", {p}, Domain::plane()); };
  std::vector<Case> cases = {
      {Operator::D, disc("power_disc", {1}), true, Boundedness::Bounded},
      {Operator::I, disc("power_disc", {1}), true, Boundedness::Bounded},
      {Operator::D, disc("exp_inv_disc", {1, 1}), true, Boundedness::Unbounded},
      {Operator::I, disc("exp_inv_disc", {1, 1}), true, Boundedness::Bounded},
      {Operator::D, disc("log_power_disc", {1}), true, Boundedness::Bounded},
      {Operator::I, disc("log_power_disc", {1}), true, Boundedness::Unbounded},
      {Operator::D, plane(0.5), false, Boundedness::Bounded},
      {Operator::I, plane(0.5), false, Boundedness::Unbounded},
      {Operator::D, plane(1), false, Boundedness::Bounded},
      {Operator::I, plane(1), false, Boundedness::Bounded},
      {Operator::D, plane(2), false, Boundedness::Unbounded},
      {Operator::I, plane(2), false, Boundedness::Bounded},
      {Operator::I, disc("power_disc", {1}), false, Boundedness::Bounded},
      {Operator::I, disc("exp_inv_disc", {1, 1}), false, Boundedness::Bounded},
      {Operator::I, disc("log_power_disc", {1}), false, Boundedness::Bounded},
  };
  int ok = 0;
  for (const auto& c : cases) {
    RadialWeight w = c.canonical_w ? divide_by_one_minus_r(c.v) : c.v;
    OperatorVerdict r = boundedness_verdict(c.op, c.v, w);
    if (r.verdict == c.expected) {
      ++ok;
    } else {
      o.require(false, std::string(to_string(c.op)) + " " + c.v.label() + " w=" + w.label() + ": " + to_string(r.verdict) +
                           " via " + r.theorem);
    }
  }
  o.note << " " << ok << "/" << cases.size() << " cases";
  return o;
}

Outcome criterion8() {
  Outcome o;
  const auto eps = default_eps_sequence();
  const double c30 = example_i_constant(eps, 30);
  const double c29 = example_i_constant(eps, 29);
  const double c60 = example_i_constant(eps, 60);
  o.require(format_number(c30) == format_number(c60), "C not stable at k=30: " + format_number(c30) + " vs " + format_number(c60));
  o.require(std::abs(c30 - 0.452826603472) <= 1e-12, "C = " + format_number(c30) + " differs from the summation oracle");
  auto b = build_example_i_plane(eps);
  AnalysisConfig cfg;
  cfg.grid = b.grid;
  LogProfile p = sample_log_profile(b.v, cfg.grid);
  double dev = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) dev = std::max(dev, std::abs(p.phis[i] - std::exp(p.xs[i])));
  o.require(dev <= c30 + 1e-9, "sandwich deviation " + format_number(dev));
  auto reports = check_plane_i_conditions(b.v, cfg);
  const auto& lim = find_report(reports, "plane_i.slope_liminf");
  o.require(lim.estimate && lim.estimate->trend == TrendKind::DecaysToZero, "liminf trace not DecaysToZero");
  OperatorVerdict vd = boundedness_verdict(Operator::I, b.v, b.v, cfg);
  o.require(vd.verdict == Boundedness::Bounded, std::string("verdict ") + to_string(vd.verdict));
  o.require(vd.justification.find("norm-equivalent") != std::string::npos, "not via a norm-equivalent weight");
  o.note << " C=" << format_number(c30) << " (k=29: " << format_number(c29) << "), max|phi-e^x|=" << format_number(dev)
         << ", liminf " << (lim.estimate ? to_string(lim.estimate->trend) : "none") << ", I(v,v) " << to_string(vd.verdict)
         << " via " << vd.theorem;
  return o;
}

RadialWeight random_weight(std::mt19937_64& rng, bool disc, int id) {
  std::uniform_int_distribution<int> count(4, 20);
  std::uniform_real_distribution<double> slope(0.05, 40.0);
  const int k = count(rng);
  std::vector<double> xs(k), slopes(k);
  if (disc) {
    std::uniform_real_distribution<double> t(0.05, 26.0);
    for (auto& x : xs) x = disc_x_from_t(t(rng));
  } else {
    std::uniform_real_distribution<double> u(-1.0, 30.0);
    for (auto& x : xs) x = u(rng);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  for (auto& s : slopes) s = slope(rng);
  std::sort(slopes.begin(), slopes.end());
  PiecewiseLogProfile pw;
  pw.breakpoints = xs;
  pw.values.assign(xs.size(), 0.0);
  std::uniform_real_distribution<double> v0(-2.0, 2.0);
  pw.values[0] = v0(rng);
  for (std::size_t i = 1; i < xs.size(); ++i) pw.values[i] = pw.values[i - 1] + slopes[i - 1] * (xs[i] - xs[i - 1]);
  pw.slopes.assign(slopes.begin(), slopes.begin() + xs.size());
  return RadialWeight(disc ? Domain::disc() : Domain::plane(), std::move(pw), "random" + std::to_string(id));
}

Outcome criterion9() {
  Outcome o;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20240601);
  std::vector<RadialWeight> weights = builtins();
  for (int i = 0; i < 200; ++i) weights.push_back(random_weight(rng, i % 2 == 0, i));
  int failures = 0;
  auto fail = [&](const RadialWeight& w, const std::string& what) {
    ++failures;
    if (failures <= 5) o.note << " [" << w.label() << ": " << what << "]";
  };
  for (const auto& w : weights) {
    AnalysisConfig cfg;
    LogProfile p = sample_log_profile(w, cfg.grid);
    auto hull = convex_minorant(p);
    LogProfile hp = minorant_profile(p, hull);
    // Hull idempotence and hull <= input.
    auto hull2 = convex_minorant(hp);
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (hp.phis[i] > p.phis[i] + 1e-12 * std::max(1.0, std::abs(p.phis[i]))) {
        fail(w, "hull above input");
        break;
      }
      if (std::abs(hull2.value_at(p.xs[i]) - hp.phis[i]) > 1e-9 * std::max(1.0, std::abs(hp.phis[i]))) {
        fail(w, "hull not idempotent");
        break;
      }
    }
    // A_n convex in n.
    auto m = monomial_log_norms(p, 60, BoundaryPolicy::Flag);
    for (int n = 1; n < 60; ++n) {
      if (m.grid_limited[n + 1]) break;
      double second = m.A[n + 1] - 2.0 * m.A[n] + m.A[n - 1];
      if (second < -1e-9 * std::max(1.0, std::abs(m.A[n]))) {
        fail(w, "A_n not convex at n=" + std::to_string(n));
        break;
      }
    }
    // Report determinism.
    auto battery = [&] {
      Json j = Json::array();
      auto reports = w.domain().is_disc() ? check_disc_d_conditions(w, cfg) : check_plane_d_conditions(w, cfg);
      for (const auto& r : reports) j.push_back(to_json(r));
      return j.dump();
    };
    if (battery() != battery()) fail(w, "report not deterministic");
  }
  // D(I(f)) = f on random nonnegative polynomials.
  std::uniform_real_distribution<double> c(0.0, 10.0);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> coeffs(1 + i % 12);
    for (auto& a : coeffs) a = c(rng);
    PolyFunction f(coeffs);
    PolyFunction g = apply_D(apply_I(f));
    bool same = g.coeffs.size() == f.coeffs.size();
    for (std::size_t k = 0; same && k < f.coeffs.size(); ++k)
      same = std::abs(g.coeffs[k] - f.coeffs[k]) <= 1e-12 * std::max(1.0, f.coeffs[k]);
    if (!same) {
      ++failures;
      o.note << " [D(I(f)) != f]";
    }
  }
  const double dt = seconds_since(t0);
  o.require(failures == 0, std::to_string(failures) + " failures");
  o.require(dt < 60.0, "runtime " + format_number(dt) + " s");
  o.note << " " << weights.size() << " weights, " << failures << " failures, " << format_number(dt) << " s";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"1 convex minorant vs closed form", criterion1},
      {"2 minorant slope limit 2(L+1)", criterion2},
      {"3 designed gap and implication lattice", criterion3},
      {"4 analytic condition values", criterion4},
      {"5 Legendre oracle and hull invariance", criterion5},
      {"6 monomial ratio asymptotics", criterion6},
      {"7 verdict suite", criterion7},
      {"8 integration example sandwich", criterion8},
      {"9 property suites", criterion9},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.note << " exception: " << e.what();
    }
    std::printf("%s criterion %s:%s\n", o.pass ? "PASS" : "FAIL", name, o.note.str().c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed;
}

#include "weightlab/counterexamples.hpp"

#include <algorithm>
#include <cmath>

namespace weightlab {

namespace {

constexpr int kTailK = 5;

struct Terms {
  std::vector<double> a, b;  // index n = 1..n_max+1 (index 0 unused)
};

Terms evaluate_terms(const SequencePair& s) {
  if (s.n_max < kTailK + 2) throw Error(ErrorCode::InvalidParams, "n_max must be at least " + std::to_string(kTailK + 2));
  Terms t;
  t.a.assign(s.n_max + 2, 0.0);
  t.b.assign(s.n_max + 2, 0.0);
  for (int n = 1; n <= s.n_max + 1; ++n) {
    t.a[n] = s.a(n);
    t.b[n] = s.b(n);
    if (!(t.a[n] > 0.0) || !std::isfinite(t.a[n]))
      throw SequencePropertyViolation(n, 0, "a_n must be a positive finite number");
    if (!(t.b[n] > 0.0) || !std::isfinite(t.b[n]))
      throw SequencePropertyViolation(n, 0, "b_n must be a positive finite number");
  }
  return t;
}

void check_shape(const Terms& t, int n_max) {
  for (int n = 2; n <= n_max; ++n)
    if (!(t.a[n] < t.b[n])) throw SequencePropertyViolation(n, 2, "a_n < b_n is required for n >= 2");
  for (int n = 2; n <= n_max; ++n)
    if (!(t.a[n] + t.b[n] < t.a[n - 1] + t.b[n - 1]))
      throw SequencePropertyViolation(n, 3, "a_n + b_n must decrease");
}

// Last-K values agree within 5% of their mean.
double stable_limit(const std::vector<double>& y, int property, const char* what) {
  const int n = static_cast<int>(y.size()) - 1;
  double lo = y[n], hi = y[n], sum = 0.0;
  for (int k = n - kTailK + 1; k <= n; ++k) {
    lo = std::min(lo, y[k]);
    hi = std::max(hi, y[k]);
    sum += y[k];
  }
  const double mean = sum / kTailK;
  if (!(mean > 0.0) || !std::isfinite(mean) || hi - lo > 0.05 * mean)
    throw SequencePropertyViolation(n, property, std::string(what) + " does not settle to a positive finite limit");
  return mean;
}

void check_ratio_to_zero(const std::vector<double>& y, int property, const char* what) {
  const int n = static_cast<int>(y.size()) - 1;
  if (!(y[n] < 0.1) || !(y[n] < y[n / 2]))
    throw SequencePropertyViolation(n, property, std::string(what) + " does not tend to 0");
}

// phi: 1 left of S_0 + a_1, then slopes 1/b_1 and, per block n >= 2, 1/a_n then 1/b_n, ending at S_n = 2n.
// Past S_{n_max} the next a-segment continues; v_bar either follows it (hull) or keeps its last slope.
std::pair<RadialWeight, RadialWeight> block_weights(Domain d, const std::vector<double>& S, const Terms& t, int n_max,
                                                    const std::string& name, bool bar_follows_tail) {
  PiecewiseLogProfile phi;
  phi.breakpoints = {S[0] + t.a[1], S[1]};
  phi.values = {1.0, 2.0};
  phi.slopes = {1.0 / t.b[1]};
  for (int n = 2; n <= n_max; ++n) {
    phi.slopes.push_back(1.0 / t.a[n]);
    phi.breakpoints.push_back(S[n - 1] + t.a[n]);
    phi.values.push_back(2.0 * n - 1.0);
    phi.slopes.push_back(1.0 / t.b[n]);
    phi.breakpoints.push_back(S[n]);
    phi.values.push_back(2.0 * n);
  }
  const double tail_slope = 1.0 / t.a[n_max + 1];
  phi.slopes.push_back(tail_slope);

  PiecewiseLogProfile bar;
  bar.breakpoints = {S[0] + t.a[1], S[1]};
  bar.values = {1.0, 2.0};
  bar.slopes = {1.0 / t.b[1]};
  for (int n = 2; n <= n_max; ++n) {
    bar.slopes.push_back(2.0 / (t.a[n] + t.b[n]));
    bar.breakpoints.push_back(S[n]);
    bar.values.push_back(2.0 * n);
  }
  bar.slopes.push_back(bar_follows_tail ? std::max(tail_slope, bar.slopes.back()) : bar.slopes.back());
  // Rounded breakpoints: take segment slopes from the stored points so phi stays continuous.
  for (auto* pw : {&phi, &bar})
    for (std::size_t i = 0; i + 1 < pw->breakpoints.size(); ++i)
      pw->slopes[i] = (pw->values[i + 1] - pw->values[i]) / (pw->breakpoints[i + 1] - pw->breakpoints[i]);
  return {RadialWeight(d, std::move(phi), name + ".v"), RadialWeight(d, std::move(bar), name + ".v_bar")};
}

}  // namespace

SequencePair default_disc_sequences() {
  return {SequenceExpr::parse("3^-n"), SequenceExpr::parse("2^-n - 3^-n"), 30};
}

SequencePair default_plane_sequences() {
  return {SequenceExpr::parse("3^-n"), SequenceExpr::parse("log(1+1/n) - 3^-n"), 20};
}

SequenceExpr default_eps_sequence() { return SequenceExpr::parse("e^(-2*n)"); }

double CounterexampleBundle::constant(const std::string& key) const {
  for (const auto& [k, v] : constants)
    if (k == key) return v;
  throw Error(ErrorCode::OutOfRange, "bundle " + name + " has no constant '" + key + "'");
}

CounterexampleBundle build_example_d_disc(const SequencePair& s) {
  Terms t = evaluate_terms(s);
  const int n_max = s.n_max;

  // Tails T_n = sum_{k>n}(a_k+b_k) by backward summation; convergence judged by doubling the cutoff.
  const int k1 = std::max(400, 8 * n_max), k2 = 2 * k1;
  std::vector<double> tail(k2 + 1, 0.0);
  for (int k = k2; k >= 1; --k) {
    double c = s.a(k) + s.b(k);
    if (!std::isfinite(c)) throw SequencePropertyViolation(k, 1, "a_k + b_k is not finite");
    tail[k - 1] = tail[k] + c;
  }
  double t1 = 0.0;
  for (int k = k1; k >= 1; --k) t1 += s.a(k) + s.b(k);
  if (!(std::abs(tail[0] - t1) <= 1e-12 * std::abs(tail[0])))
    throw SequencePropertyViolation(k1, 1, "sum of a_n + b_n does not converge");
  check_shape(t, n_max);

  std::vector<double> ratio_ab(n_max + 1, 0.0), tail_ratio(n_max + 1, 0.0);
  for (int n = 1; n <= n_max; ++n) {
    ratio_ab[n] = t.a[n] / t.b[n];
    tail_ratio[n] = tail[n] / (t.a[n] + t.b[n]);
  }
  check_ratio_to_zero(ratio_ab, 4, "a_n/b_n");
  const double L = stable_limit(tail_ratio, 5, "tail ratio");

  std::vector<double> S(n_max + 1);
  for (int n = 0; n <= n_max; ++n) S[n] = -tail[n];
  auto [v, v_bar] = block_weights(Domain::disc(), S, t, n_max, "ex1", true);

  GridSpec g;
  g.depth = n_max;
  CounterexampleBundle out{"ex1", v, v_bar, {}, {}, {}, g};
  for (int n = 1; n <= n_max; ++n) {
    out.breakpoints.push_back(S[n]);
    out.phi_bar_values.push_back(2.0 * n);
  }
  out.constants = {{"M", tail[0]}, {"L", L}, {"minorant_limit", 2.0 * (L + 1.0)}, {"n_max", double(n_max)}};
  return out;
}

CounterexampleBundle build_example_d_plane(const SequencePair& s) {
  Terms t = evaluate_terms(s);
  const int n_max = s.n_max;

  auto partial = [&](int n) {
    double sum = 0.0;
    for (int k = 1; k <= n; ++k) sum += s.a(k) + s.b(k);
    return sum;
  };
  const double s2 = partial(2 * std::max(n_max, 100)), s4 = partial(4 * std::max(n_max, 100));
  if (!(s4 - s2 >= 1e-3 * std::max(1.0, s2)))
    throw SequencePropertyViolation(4 * std::max(n_max, 100), 1, "sum of a_n + b_n must diverge");
  check_shape(t, n_max);

  std::vector<double> S(n_max + 1, 0.0);
  for (int n = 1; n <= n_max; ++n) S[n] = S[n - 1] + t.a[n] + t.b[n];
  std::vector<double> p4(n_max + 1, 0.0), p5(n_max + 1, 0.0);
  for (int n = 1; n <= n_max; ++n) {
    p4[n] = t.a[n] * std::exp(S[n - 1]);
    p5[n] = (t.a[n] + t.b[n]) * std::exp(S[n - 1]);
  }
  check_ratio_to_zero(p4, 4, "a_n exp(S_{n-1})");
  const double L = stable_limit(p5, 5, "(a_n+b_n) exp(S_{n-1})");

  auto [v, v_bar] = block_weights(Domain::plane(), S, t, n_max, "ex2", false);
  GridSpec g;
  g.depth = n_max;
  g.level_edges = S;
  CounterexampleBundle out{"ex2", v, v_bar, {}, {}, {}, g};
  for (int n = 1; n <= n_max; ++n) {
    out.breakpoints.push_back(S[n]);
    out.phi_bar_values.push_back(2.0 * n);
  }
  out.constants = {{"L", L}, {"S_n_max", S[n_max]}, {"last_minorant_slope", 2.0 / (t.a[n_max] + t.b[n_max])},
                   {"n_max", double(n_max)}};
  return out;
}

double example_i_constant(const SequenceExpr& eps, int k_max) {
  double c = 0.0;
  for (int k = 1; k <= k_max; ++k) {
    double e = eps(k);
    c += std::exp(static_cast<double>(k)) * std::expm1(e) - e;
  }
  return c;
}

CounterexampleBundle build_example_i_plane(const SequenceExpr& eps_expr, int n_max) {
  if (n_max < kTailK + 2) throw Error(ErrorCode::InvalidParams, "n_max must be at least " + std::to_string(kTailK + 2));
  std::vector<double> eps(n_max + 1, 0.0), D(n_max + 1, 0.0);
  for (int n = 1; n <= n_max; ++n) {
    eps[n] = eps_expr(n);
    if (!(eps[n] > 0.0) || !std::isfinite(eps[n])) throw SequencePropertyViolation(n, 0, "eps_n must be positive");
    if (n == 1 && !(eps[1] < 1.0)) throw SequencePropertyViolation(1, 1, "eps_1 < 1 is required");
    if (n > 1 && !(eps[n] < eps[n - 1])) throw SequencePropertyViolation(n, 2, "eps_n must decrease");
    D[n] = D[n - 1] + std::exp(static_cast<double>(n)) * std::expm1(eps[n]) - eps[n];
  }
  const int k_sum = std::max(30, n_max);
  const double C = example_i_constant(eps_expr, k_sum);
  const double C2 = example_i_constant(eps_expr, 2 * k_sum);
  if (!std::isfinite(C2) || !(std::abs(C2 - C) <= 1e-12 * std::max(1.0, std::abs(C2))))
    throw SequencePropertyViolation(2 * k_sum, 3, "sum of e^k (e^{eps_k} - 1) does not converge");

  auto phi = [eps, D, n_max](double x) {
    if (x <= 1.0) return std::exp(x);
    const double fl = std::floor(x);
    const int n = static_cast<int>(std::min(fl, static_cast<double>(n_max) + 1.0));
    if (n > n_max) return std::exp(x) - D[n_max];
    if (x < n + eps[n]) return x - n + std::exp(static_cast<double>(n)) - D[n - 1];
    return std::exp(x) - D[n];
  };
  auto slope = [eps, n_max](double x) {
    if (x < 1.0) return std::exp(x);
    const double fl = std::floor(x);
    if (fl > n_max) return std::exp(x);
    const int n = static_cast<int>(fl);
    return x < n + eps[n] ? 1.0 : std::exp(x);
  };
  std::vector<double> kinks;
  for (int n = 1; n <= n_max; ++n) {
    kinks.push_back(n);
    kinks.push_back(n + eps[n]);
  }
  RadialWeight v(Domain::plane(), ClosedForm{"ex3", phi, slope, kinks}, "ex3.v");
  RadialWeight v_bar = make_builtin("exp_plane", {1.0}, Domain::plane());

  GridSpec g;
  g.depth = n_max + 1;
  CounterexampleBundle out{"ex3", v, v_bar, {}, {}, {}, g};
  out.constants = {{"C", C}, {"C_truncated", D[n_max]}, {"C_sum_terms", double(k_sum)}, {"n_max", double(n_max)}};
  return out;
}

}  // namespace weightlab

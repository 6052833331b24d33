#include "weightlab/tail.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace weightlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Fit {
  TrendKind trend = TrendKind::Oscillating;
  double value = kNaN;
  Confidence confidence = Confidence::Unstable;
  double exponent = kNaN;
  double mean_last = kNaN;
};

// Exponent p of increments d(l) ~ l^-p from two averaged increments.
double increment_exponent(double d_early, double d_late, double l_early, double l_late) {
  if (!(d_early / d_late > 0.0)) return kNaN;
  return std::log(d_early / d_late) / std::log(l_late / l_early);
}

bool within(const std::vector<double>& y, std::size_t from, double c, double rel) {
  for (std::size_t j = from; j < y.size(); ++j)
    if (std::abs(y[j] - c) > rel * std::abs(c)) return false;
  return true;
}

Fit classify(const std::vector<double>& level, const std::vector<double>& y, EstimateKind kind, const TailOptions& opt) {
  Fit f;
  const std::size_t m = y.size();
  const std::size_t K = static_cast<std::size_t>(opt.K);
  const std::size_t first = m - K;
  for (std::size_t j = first; j < m; ++j)
    if (y[j] == kInf) {
      f.trend = TrendKind::DivergesToInfinity;
      f.value = kInf;
      f.confidence = Confidence::Stable;
      f.mean_last = kInf;
      return f;
    }
  for (double v : y)
    if (!std::isfinite(v)) {
      f.value = y.back();
      return f;
    }

  double mean = 0.0, lo = kInf, hi = -kInf, scale = 0.0;
  for (std::size_t j = first; j < m; ++j) {
    mean += y[j];
    lo = std::min(lo, y[j]);
    hi = std::max(hi, y[j]);
    scale = std::max(scale, std::abs(y[j]));
  }
  mean /= static_cast<double>(K);
  f.mean_last = mean;
  const double spread = hi - lo;
  if (spread == 0.0 || spread <= 1e-9 * std::abs(mean)) {
    f.trend = TrendKind::ConvergesTo;
    f.value = mean;
    f.confidence = Confidence::Stable;
    return f;
  }

  const std::size_t h = (m - 1) / 2;
  const std::size_t A = m - 1 - 2 * h, B = m - 1 - h, C = m - 1;
  const double E = y[B] - y[A], Lt = y[C] - y[B];
  double rng_lo = kInf, rng_hi = -kInf;
  for (std::size_t j = A; j <= C; ++j) {
    rng_lo = std::min(rng_lo, y[j]);
    rng_hi = std::max(rng_hi, y[j]);
  }
  const double slack = 1e-12 * std::max(scale, std::abs(rng_hi));
  const bool up = E > 0.0 && Lt > 0.0 && y[C] >= rng_hi - slack;
  const bool down = E < 0.0 && Lt < 0.0 && y[C] <= rng_lo + slack;
  const bool near_mean = within(y, first, mean, opt.rel_tol);

  if (up || down) {
    const double la = level[A], lb = level[B], lc = level[C];
    const double de = E / (lb - la), dl = Lt / (lc - lb);
    const double le = 0.5 * (la + lb), ll = 0.5 * (lb + lc);
    const double p = increment_exponent(de, dl, le, ll);
    f.exponent = p;
    double c_star = kNaN;
    if (p > 1.0) {
      double r_pow = dl * lc * std::pow(ll / lc, p) / (p - 1.0);
      double rho = Lt / E;
      double r_geo = rho < 1.0 ? Lt * rho / (1.0 - rho) : r_pow;
      double r = std::abs(r_pow) > std::abs(r_geo) ? r_pow : r_geo;
      c_star = y[C] + r;
    }
    if (up) {
      if (!(p > 1.0)) {
        if (y[C] > 0.0 && (y[C] - y[A]) >= 0.05 * std::abs(y[C])) {
          f.trend = TrendKind::DivergesToInfinity;
          f.value = kInf;
          f.confidence = Confidence::Stable;
          return f;
        }
        f.value = y[C];
        return f;
      }
      if (near_mean) {
        f.trend = TrendKind::ConvergesTo;
        f.value = c_star;
        bool agrees = std::abs(c_star - mean) <= opt.rel_tol * std::abs(mean) && p >= 1.5;
        // An increasing positive tail bounds the liminf from below.
        bool one_sided = kind == EstimateKind::Liminf && y[A] > 0.0;
        f.confidence = (agrees || one_sided) ? Confidence::Stable : Confidence::Unstable;
        return f;
      }
      f.value = y[C];
      return f;
    }
    // Decreasing tail.
    if (y[C] > 0.0) {
      bool decays = false;
      if (p > 1.0) {
        decays = c_star <= 0.1 * y[A];
      } else {
        // Non-summable decrease of a positive sequence: test 1/y for divergence.
        double ze = (1.0 / y[B] - 1.0 / y[A]) / (lb - la), zl = (1.0 / y[C] - 1.0 / y[B]) / (lc - lb);
        double pz = increment_exponent(ze, zl, le, ll);
        decays = ze > 0.0 && zl > 0.0 && !(pz > 1.0);
      }
      if (decays) {
        f.trend = TrendKind::DecaysToZero;
        f.value = 0.0;
        f.confidence = Confidence::Stable;
        return f;
      }
    }
    if (near_mean) {
      f.trend = TrendKind::ConvergesTo;
      f.value = std::isfinite(c_star) ? c_star : mean;
      bool agrees = std::isfinite(c_star) && std::abs(c_star - mean) <= opt.rel_tol * std::abs(mean) && p >= 1.5;
      // A decreasing tail bounds the limsup from above.
      bool one_sided = kind == EstimateKind::Limsup;
      f.confidence = (agrees || one_sided) ? Confidence::Stable : Confidence::Unstable;
      return f;
    }
    f.value = y[C];
    return f;
  }

  if (near_mean) {
    f.trend = TrendKind::ConvergesTo;
    f.value = mean;
    bool steady = true;
    if (m >= 2 * K) {
      double elo = kInf, ehi = -kInf;
      for (std::size_t j = m - 2 * K; j < first; ++j) {
        elo = std::min(elo, y[j]);
        ehi = std::max(ehi, y[j]);
      }
      steady = spread <= (ehi - elo) * (1.0 + opt.rel_tol) + 1e-12 * scale;
    }
    f.confidence = steady ? Confidence::Stable : Confidence::Unstable;
    return f;
  }
  f.value = y.back();
  return f;
}

AsymptoticEstimate finalize(std::vector<Window> windows, EstimateKind kind, const TailOptions& opt) {
  AsymptoticEstimate e;
  e.kind = kind;
  e.windows = std::move(windows);
  if (static_cast<int>(e.windows.size()) < opt.K + 2)
    throw Error(ErrorCode::TooFewLevels, "need at least " + std::to_string(opt.K + 2) + " tail windows, have " +
                                             std::to_string(e.windows.size()));
  std::vector<double> lv, ymax, ymin;
  for (const auto& w : e.windows) {
    lv.push_back(w.level + 1.0);
    ymax.push_back(w.max);
    ymin.push_back(w.min);
  }
  if (kind != EstimateKind::Limit) {
    Fit f = classify(lv, kind == EstimateKind::Liminf ? ymin : ymax, kind, opt);
    e.trend = f.trend;
    e.value = f.value;
    e.confidence = f.confidence;
    e.exponent = f.exponent;
    e.mean_last = f.mean_last;
    return e;
  }
  Fit a = classify(lv, ymax, EstimateKind::Limsup, opt);
  Fit b = classify(lv, ymin, EstimateKind::Liminf, opt);
  e.exponent = a.exponent;
  e.mean_last = 0.5 * (a.mean_last + b.mean_last);
  const bool stable = a.confidence == Confidence::Stable && b.confidence == Confidence::Stable;
  if (a.trend == TrendKind::ConvergesTo && b.trend == TrendKind::ConvergesTo &&
      std::abs(a.value - b.value) <= opt.rel_tol * std::max(std::abs(a.value), std::abs(b.value))) {
    e.trend = TrendKind::ConvergesTo;
    e.value = 0.5 * (a.value + b.value);
    e.confidence = stable ? Confidence::Stable : Confidence::Unstable;
  } else if (a.trend == b.trend && a.trend != TrendKind::ConvergesTo) {
    e.trend = a.trend;
    e.value = a.value;
    e.confidence = stable ? Confidence::Stable : Confidence::Unstable;
  } else {
    e.trend = TrendKind::Oscillating;
    e.value = a.value;
    e.confidence = Confidence::Unstable;
  }
  return e;
}

}  // namespace

const char* to_string(EstimateKind k) {
  switch (k) {
    case EstimateKind::Limsup: return "limsup";
    case EstimateKind::Liminf: return "liminf";
    case EstimateKind::Limit: return "limit";
  }
  return "";
}

const char* to_string(TrendKind k) {
  switch (k) {
    case TrendKind::ConvergesTo: return "ConvergesTo";
    case TrendKind::DivergesToInfinity: return "DivergesToInfinity";
    case TrendKind::DecaysToZero: return "DecaysToZero";
    case TrendKind::Oscillating: return "Oscillating";
  }
  return "";
}

const char* to_string(Confidence c) { return c == Confidence::Stable ? "Stable" : "Unstable"; }

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "Holds";
    case Verdict::Fails: return "Fails";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "";
}

double AsymptoticEstimate::overall() const {
  double best = kind == EstimateKind::Liminf ? kInf : -kInf;
  for (const auto& w : windows) {
    double v = extremal(w);
    if (std::isnan(v)) continue;
    best = kind == EstimateKind::Liminf ? std::min(best, v) : std::max(best, v);
  }
  return best;
}

AsymptoticEstimate estimate_tail(const LogProfile& grid, const std::vector<double>& values, EstimateKind kind,
                                 const TailOptions& opt) {
  if (values.size() != grid.size()) throw Error(ErrorCode::InvalidParams, "values must match the grid size");
  const int J = grid.depth;
  int tail = opt.tail_levels > 0 ? opt.tail_levels : std::max((J + 1) / 2, opt.K + 2);
  tail = std::min(tail, J);
  std::vector<Window> windows;
  for (int level = J - tail; level < J; ++level) {
    auto [b, e] = grid.level_range(level);
    Window w;
    w.level = level;
    w.max = -kInf;
    w.min = kInf;
    bool any = false;
    for (std::size_t i = b; i < e; ++i) {
      double v = values[i];
      if (std::isnan(v)) continue;
      if (!any) w.x_lo = grid.xs[i];
      w.x_hi = grid.xs[i];
      any = true;
      w.max = std::max(w.max, v);
      w.min = std::min(w.min, v);
    }
    if (any) windows.push_back(w);
  }
  return finalize(std::move(windows), kind, opt);
}

AsymptoticEstimate estimate_windows(std::vector<Window> windows, EstimateKind kind, const TailOptions& opt) {
  return finalize(std::move(windows), kind, opt);
}

Verdict verdict_finite_limsup(const AsymptoticEstimate& e) {
  if (e.trend == TrendKind::DivergesToInfinity) return Verdict::Fails;
  if (!e.stable()) return Verdict::Inconclusive;
  if (e.trend == TrendKind::ConvergesTo || e.trend == TrendKind::DecaysToZero) return Verdict::Holds;
  return Verdict::Inconclusive;
}

Verdict verdict_positive_liminf(const AsymptoticEstimate& e) {
  if (e.trend == TrendKind::DecaysToZero) return e.stable() ? Verdict::Fails : Verdict::Inconclusive;
  if (!e.stable()) return Verdict::Inconclusive;
  if (e.trend == TrendKind::DivergesToInfinity) return Verdict::Holds;
  if (e.trend == TrendKind::ConvergesTo) {
    if (e.value > 1e-6) return Verdict::Holds;
    if (e.value <= 1e-9) return Verdict::Fails;
  }
  return Verdict::Inconclusive;
}

Verdict verdict_limsup_below_one(const AsymptoticEstimate& e) {
  if (e.trend == TrendKind::DivergesToInfinity) return Verdict::Fails;
  if (!e.stable()) return Verdict::Inconclusive;
  if (e.trend == TrendKind::DecaysToZero) return Verdict::Holds;
  if (e.trend == TrendKind::ConvergesTo) {
    if (e.value <= 0.95) return Verdict::Holds;
    if (e.value >= 0.99) return Verdict::Fails;
  }
  return Verdict::Inconclusive;
}

std::string describe(const AsymptoticEstimate& e) {
  std::ostringstream os;
  os.precision(6);
  os << to_string(e.kind) << ' ' << to_string(e.trend);
  if (e.trend == TrendKind::ConvergesTo) os << '(' << e.value << ')';
  os << ", " << to_string(e.confidence) << ", " << e.windows.size() << " windows";
  return os.str();
}

}  // namespace weightlab

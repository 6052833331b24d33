#include "weightlab/convexity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace weightlab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_points(std::size_t n) {
  if (n < 2) throw Error(ErrorCode::DegenerateProfile, "profile needs at least two points");
}

// Index of the maximizer of n*x_i - y_i over vertices with nondecreasing chord slopes.
std::size_t vertex_argmax(const std::vector<double>& slopes, double n) {
  // g increases while the chord slope is below n.
  auto it = std::lower_bound(slopes.begin(), slopes.end(), n);
  return static_cast<std::size_t>(it - slopes.begin());
}

void finish(MonomialNorms& m, Domain domain, std::size_t last, BoundaryPolicy policy) {
  for (std::size_t n = 0; n < m.A.size(); ++n) {
    bool at_end = m.argmax[n] == last && n > 0;
    m.grid_limited[n] = at_end;
    if (at_end && !domain.is_disc() && policy == BoundaryPolicy::Strict)
      throw Error(ErrorCode::MaximizerAtBoundary,
                  "maximizer of " + std::to_string(n) + "x - phi(x) hits the grid end; extend the grid");
  }
}

}  // namespace

double PiecewiseLinearConvex::value_at(double x) const {
  if (x <= breakpoints.front()) return values.front() + slopes.front() * (x - breakpoints.front());
  auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), x);
  std::size_t i = std::min(static_cast<std::size_t>(it - breakpoints.begin()) - 1, slopes.size() - 1);
  return values[i] + slopes[i] * (x - breakpoints[i]);
}

PiecewiseLinearConvex convex_minorant(const LogProfile& p) {
  require_points(p.size());
  const auto& x = p.xs;
  const auto& y = p.phis;
  std::vector<std::size_t> h;
  h.reserve(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    while (h.size() >= 2) {
      std::size_t a = h[h.size() - 2], b = h.back();
      double cross = (x[b] - x[a]) * (y[i] - y[a]) - (y[b] - y[a]) * (x[i] - x[a]);
      if (cross > 0.0) break;
      h.pop_back();
    }
    h.push_back(i);
  }
  PiecewiseLinearConvex q;
  for (std::size_t k : h) {
    q.breakpoints.push_back(x[k]);
    q.values.push_back(y[k]);
  }
  for (std::size_t k = 0; k + 1 < h.size(); ++k) {
    double s = (q.values[k + 1] - q.values[k]) / (q.breakpoints[k + 1] - q.breakpoints[k]);
    if (k > 0) s = std::max(s, q.slopes.back());
    q.slopes.push_back(s);
  }
  return q;
}

LogProfile minorant_profile(const LogProfile& p, const PiecewiseLinearConvex& h) {
  LogProfile out = p;
  std::size_t seg = 0;
  std::size_t v = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double xi = p.xs[i];
    while (v < h.breakpoints.size() && h.breakpoints[v] < xi) ++v;
    if (v < h.breakpoints.size() && h.breakpoints[v] == xi) {
      out.phis[i] = h.values[v];
      continue;
    }
    while (seg + 1 < h.slopes.size() && h.breakpoints[seg + 1] <= xi) ++seg;
    out.phis[i] = h.values[seg] + h.slopes[seg] * (xi - h.breakpoints[seg]);
  }
  return out;
}

RadialWeight minorant_weight(const PiecewiseLinearConvex& h, Domain domain, std::string label) {
  PiecewiseLogProfile pw;
  pw.breakpoints = h.breakpoints;
  pw.values = h.values;
  pw.slopes = h.slopes;
  pw.slopes.push_back(h.slopes.empty() ? 0.0 : h.slopes.back());
  return RadialWeight(domain, std::move(pw), std::move(label));
}

ConvexityCheck is_log_convex(const LogProfile& p, double tol) {
  require_points(p.size());
  ConvexityCheck c;
  double prev = 0.0;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    double s = (p.phis[i + 1] - p.phis[i]) / (p.xs[i + 1] - p.xs[i]);
    if (i > 0) {
      double drop = prev - s;
      if (drop > c.max_violation) {
        c.max_violation = drop;
        c.at = i;
      }
      if (drop > tol * std::max(1.0, std::abs(prev))) c.convex = false;
    }
    prev = s;
  }
  return c;
}

MonomialNorms monomial_log_norms(const LogProfile& p, int N, BoundaryPolicy policy) {
  require_points(p.size());
  if (N < 0) throw Error(ErrorCode::InvalidParams, "N must be >= 0");
  MonomialNorms m;
  m.A.assign(N + 1, kNegInf);
  m.x.assign(N + 1, 0.0);
  m.argmax.assign(N + 1, 0);
  m.grid_limited.assign(N + 1, false);
  const bool convex = is_log_convex(p, 0.0).convex;
  std::vector<double> slopes;
  if (convex) {
    for (std::size_t i = 0; i + 1 < p.size(); ++i)
      slopes.push_back((p.phis[i + 1] - p.phis[i]) / (p.xs[i + 1] - p.xs[i]));
    for (std::size_t i = 1; i < slopes.size(); ++i) slopes[i] = std::max(slopes[i], slopes[i - 1]);
  }
  for (int n = 0; n <= N; ++n) {
    std::size_t best = 0;
    double a = kNegInf;
    if (convex) {
      best = vertex_argmax(slopes, n);
      a = n * p.xs[best] - p.phis[best];
    } else {
      for (std::size_t i = 0; i < p.size(); ++i) {
        double g = n * p.xs[i] - p.phis[i];
        if (g > a) {
          a = g;
          best = i;
        }
      }
    }
    m.A[n] = a;
    m.argmax[n] = best;
    m.x[n] = p.xs[best];
  }
  finish(m, p.domain, p.size() - 1, policy);
  return m;
}

MonomialNorms monomial_log_norms(const PiecewiseLinearConvex& h, Domain domain, int N, BoundaryPolicy policy) {
  LogProfile p;
  p.domain = domain;
  p.xs = h.breakpoints;
  p.phis = h.values;
  p.levels.assign(p.xs.size(), 0);
  require_points(p.size());
  MonomialNorms m;
  m.A.assign(N + 1, kNegInf);
  m.x.assign(N + 1, 0.0);
  m.argmax.assign(N + 1, 0);
  m.grid_limited.assign(N + 1, false);
  for (int n = 0; n <= N; ++n) {
    std::size_t best = vertex_argmax(h.slopes, n);
    m.A[n] = n * p.xs[best] - p.phis[best];
    m.argmax[n] = best;
    m.x[n] = p.xs[best];
  }
  finish(m, domain, p.size() - 1, policy);
  return m;
}

void refine_monomial_log_norms(MonomialNorms& m, const RadialWeight& w, const LogProfile& p) {
  if (!m.A.empty()) {
    double a0 = -w.log_at(kNegInf);
    if (a0 > m.A[0]) {
      m.A[0] = a0;
      m.x[0] = kNegInf;
    }
  }
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (std::size_t n = 1; n < m.A.size(); ++n) {
    if (m.grid_limited[n]) continue;
    std::size_t i = m.argmax[n];
    double lo = p.xs[i > 0 ? i - 1 : i];
    double hi = p.xs[std::min(i + 1, p.size() - 1)];
    auto f = [&](double x) { return static_cast<double>(n) * x - w.log_at(x); };
    double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
      if (fc >= fd) {
        hi = d;
        d = c;
        fd = fc;
        c = hi - g * (hi - lo);
        fc = f(c);
      } else {
        lo = c;
        c = d;
        fc = fd;
        d = lo + g * (hi - lo);
        fd = f(d);
      }
    }
    double xs = fc >= fd ? c : d;
    double best = std::max(fc, fd);
    if (best > m.A[n]) {
      m.A[n] = best;
      m.x[n] = xs;
    }
  }
}

LogProfile associated_envelope(const MonomialNorms& m, const LogProfile& p) {
  LogProfile out = p;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double best = kNegInf;
    for (std::size_t n = 0; n < m.A.size(); ++n) {
      if (m.grid_limited[n]) continue;
      best = std::max(best, static_cast<double>(n) * p.xs[i] - m.A[n]);
    }
    out.phis[i] = best;
  }
  return out;
}

double right_derivative(const PiecewiseLinearConvex& q, double x) {
  if (q.slopes.empty()) throw Error(ErrorCode::DegenerateProfile, "function has no segments");
  if (!(x >= q.breakpoints.front()) || !(x <= q.breakpoints.back()))
    throw Error(ErrorCode::OutOfRange, "x outside the breakpoint range");
  auto it = std::upper_bound(q.breakpoints.begin(), q.breakpoints.end(), x);
  std::size_t i = static_cast<std::size_t>(it - q.breakpoints.begin()) - 1;
  return q.slopes[std::min(i, q.slopes.size() - 1)];
}

}  // namespace weightlab

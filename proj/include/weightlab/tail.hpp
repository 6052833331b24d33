#pragma once

#include <string>
#include <vector>

#include "weightlab/weight.hpp"

namespace weightlab {

enum class EstimateKind { Limsup, Liminf, Limit };
enum class TrendKind { ConvergesTo, DivergesToInfinity, DecaysToZero, Oscillating };
enum class Confidence { Stable, Unstable };

const char* to_string(EstimateKind k);
const char* to_string(TrendKind k);
const char* to_string(Confidence c);

struct Window {
  int level = 0;
  double x_lo = 0.0;
  double x_hi = 0.0;
  double max = 0.0;
  double min = 0.0;
};

struct AsymptoticEstimate {
  EstimateKind kind = EstimateKind::Limsup;
  std::vector<Window> windows;
  TrendKind trend = TrendKind::Oscillating;
  // Limit for ConvergesTo, +inf for DivergesToInfinity, 0 for DecaysToZero, last value otherwise.
  double value = 0.0;
  Confidence confidence = Confidence::Unstable;
  // Fitted power-law decay exponent of the tail increments (NaN if not fitted).
  double exponent = 0.0;
  double mean_last = 0.0;

  double extremal(const Window& w) const { return kind == EstimateKind::Liminf ? w.min : w.max; }
  // Largest (Limsup) or smallest (Liminf) extremal value over all windows.
  double overall() const;
  bool stable() const { return confidence == Confidence::Stable; }
};

struct TailOptions {
  int tail_levels = 0;  // 0: max(ceil(J/2), K+2), capped at J
  int K = 5;
  double rel_tol = 0.05;
};

// Per-level extrema of values (NaN entries ignored) over the tail levels of grid.
AsymptoticEstimate estimate_tail(const LogProfile& grid, const std::vector<double>& values, EstimateKind kind,
                                 const TailOptions& opt = {});
// Classifies pre-built windows, all of which are used.
AsymptoticEstimate estimate_windows(std::vector<Window> windows, EstimateKind kind, const TailOptions& opt = {});

enum class Verdict { Holds, Fails, Inconclusive };
const char* to_string(Verdict v);

// limsup < inf
Verdict verdict_finite_limsup(const AsymptoticEstimate& e);
// liminf > 0
Verdict verdict_positive_liminf(const AsymptoticEstimate& e);
// limsup < 1
Verdict verdict_limsup_below_one(const AsymptoticEstimate& e);

std::string describe(const AsymptoticEstimate& e);

}  // namespace weightlab

#pragma once

#include <string>
#include <vector>

#include "weightlab/convexity.hpp"
#include "weightlab/criteria.hpp"

namespace weightlab {

enum class Operator { D, I };
const char* to_string(Operator op);
Operator parse_operator(const std::string& s);

// Polynomial with nonnegative Taylor coefficients, so M(f, r) = f(r).
struct PolyFunction {
  std::vector<double> coeffs;

  PolyFunction() = default;
  explicit PolyFunction(std::vector<double> c);
  static PolyFunction monomial(int n);
  bool is_zero() const;
};

PolyFunction apply_D(const PolyFunction& f);
PolyFunction apply_I(const PolyFunction& f);

// log sup_r f(r)/v(r) over the grid of v (plus r = 0 when f(0) > 0).
double weighted_log_norm(const PolyFunction& f, const RadialWeight& v, const GridSpec& g = {});

// Disc: (2/(1-r)) v((1+r)/2). Plane: v(r+1).
RadialWeight v_rho_weight(const RadialWeight& v);

// limsup v_rho/w < inf; Holds is sufficient for D: H_v -> H_w.
ConditionReport sufficient_boundedness_check(const RadialWeight& v, const RadialWeight& w, const AnalysisConfig& cfg = {});

struct MonomialRatios {
  Operator op = Operator::D;
  // ratio[n] = log ||op(z^n)||_w - log ||z^n||_v; NaN where undefined (n = 0 for D).
  std::vector<double> ratio;
  double sup = 0.0;
};

// Refined monomial norms of both weights; throws GridLimited if a needed maximizer sits at the grid end.
MonomialRatios monomial_norm_ratios(Operator op, const RadialWeight& v, const RadialWeight& w, int N,
                                    const GridSpec& g = {});
// Dyadic blocks [2^k, 2^{k+1}) of n, block maxima, classified as a limsup.
AsymptoticEstimate ratio_trend(const MonomialRatios& r, const TailOptions& opt = {});

enum class Boundedness { Bounded, Unbounded, Inconclusive };
const char* to_string(Boundedness b);

struct OperatorVerdict {
  Operator op = Operator::D;
  std::string v_label;
  std::string w_label;
  Boundedness verdict = Boundedness::Inconclusive;
  std::string theorem;
  std::string justification;
  double norm_lower_bound = 0.0;
  std::vector<ConditionReport> evidence;
  std::vector<std::string> warnings;
  std::optional<AsymptoticEstimate> ratio_estimate;
};

// D: H_v -> H_w. I: H_w -> H_v.
OperatorVerdict boundedness_verdict(Operator op, const RadialWeight& v, const RadialWeight& w,
                                    const AnalysisConfig& cfg = {}, int N = 1024);

}  // namespace weightlab

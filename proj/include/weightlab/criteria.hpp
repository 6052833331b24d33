#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "weightlab/tail.hpp"
#include "weightlab/weight.hpp"

namespace weightlab {

struct AnalysisConfig {
  GridSpec grid;
  TailOptions tail;
};

struct ConditionReport {
  std::string id;
  std::string statement;
  std::optional<AsymptoticEstimate> estimate;
  std::optional<double> scalar;
  Verdict verdict = Verdict::Inconclusive;
  std::string detail;
  // Named auxiliary values (chosen menu item, constants).
  std::vector<std::pair<std::string, double>> values;
  // (x, value) on the grid.
  std::vector<std::pair<double, double>> trace;
  // Menu items (delta, gamma, k, ...) for existence conditions.
  std::vector<ConditionReport> parts;

  const ConditionReport* part(const std::string& part_id) const;
};

const ConditionReport& find_report(const std::vector<ConditionReport>& reports, const std::string& id);

// Six reports in order: slope_limsup, power_decreasing, almost_decreasing, dyadic_ratio, mobius_shift, square_ratio.
std::vector<ConditionReport> check_disc_d_conditions(const RadialWeight& v, const AnalysisConfig& cfg = {});
// Seven reports: slope_liminf, power_increasing, almost_increasing, dyadic_contraction, mobius_contraction,
// power_contraction, integral.
std::vector<ConditionReport> check_disc_i_conditions(const RadialWeight& v, const AnalysisConfig& cfg = {});
// slope_limsup (v'/v) and log_growth_linear (log v(r)/r).
std::vector<ConditionReport> check_plane_d_conditions(const RadialWeight& v, const AnalysisConfig& cfg = {});
// slope_liminf (v'/v) and integral with w = v.
std::vector<ConditionReport> check_plane_i_conditions(const RadialWeight& v, const AnalysisConfig& cfg = {});

// limsup (1/v(r)) int_0^r w.
ConditionReport check_integral_condition(const RadialWeight& w, const RadialWeight& v, const AnalysisConfig& cfg = {});
// limsup log(1/(1-r)) / log v(r).
ConditionReport check_log_domination(const RadialWeight& v, const AnalysisConfig& cfg = {});
// (1/A) e^{r/C} <= v(r) <= A e^{Cr} for some C in 2^0..2^10.
ConditionReport check_epimorphism_plane(const RadialWeight& v, const AnalysisConfig& cfg = {});
// limsup v_bar'(r)/w(r) with v_bar = exp of the convex minorant of log v(e^x).
ConditionReport check_necessary_derivative_bound(const RadialWeight& v, const RadialWeight& w,
                                                 const AnalysisConfig& cfg = {});
// Empty n_grid: log-spaced over the chord slopes of the profile.
ConditionReport check_hl_condition(const RadialWeight& v, const std::vector<double>& n_grid = {},
                                   const AnalysisConfig& cfg = {});

enum class WeightClass { LogConvex, ModerateGrowth, RapidlyGrowing, HWeight, CKWeight, BBTWeight, Regular, HLCondition };
const char* to_string(WeightClass c);

struct WeightClassTags {
  std::set<WeightClass> flags;
  std::optional<double> L_v;
  std::vector<ConditionReport> evidence;

  bool has(WeightClass c) const { return flags.count(c) > 0; }
};

WeightClassTags classify_weight(const RadialWeight& v, const AnalysisConfig& cfg = {});

// Forbidden implications among lemma verdicts: (i) <=> (ii) => (iii) and agreement of (iii) onwards;
// all verdicts agree for log-convex weights. Returns one message per violation.
std::vector<std::string> lattice_violations(const std::vector<ConditionReport>& reports, bool log_convex);

}  // namespace weightlab

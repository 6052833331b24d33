#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "weightlab/counterexamples.hpp"
#include "weightlab/criteria.hpp"
#include "weightlab/operators.hpp"

namespace weightlab {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "1.0";

struct RunOptions {
  std::optional<int> grid_depth;
  std::optional<int> points_per_level;
  int N = 50;
};

struct CsvFile {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

struct ReportDocument {
  Json json;
  std::vector<CsvFile> csv;
  int exit_code = 0;
};

// 12 significant digits; non-finite values become "inf", "-inf" or "nan".
Json json_number(double v);
std::string format_number(double v);

Json to_json(const AsymptoticEstimate& e);
Json to_json(const ConditionReport& r);
Json to_json(const OperatorVerdict& v);

// family(...)@domain or piecewise:path; parameter errors surface as WeightInvalid.
RadialWeight resolve_weight(const std::string& spec);
// "same", "auto:v-over-1-minus-r" or a weight spec.
RadialWeight resolve_partner(const std::string& spec, const RadialWeight& v);

ReportDocument run_analyze(const std::string& spec, const RunOptions& opt = {});
// Exit code: 0 Bounded, 1 Unbounded, 2 Inconclusive.
ReportDocument run_verdict(Operator op, const std::string& spec_v, const std::string& spec_w, const RunOptions& opt = {});

struct CounterexampleParams {
  std::optional<std::string> a;
  std::optional<std::string> b;
  std::optional<std::string> eps;
  std::optional<int> n_max;
};
// Exit code 0 when every designed-gap assertion passes, 1 otherwise.
ReportDocument run_counterexample(const std::string& which, const CounterexampleParams& params = {},
                                  const RunOptions& opt = {});
ReportDocument run_norms(const std::string& spec_v, const std::optional<std::string>& spec_w,
                         const std::optional<Operator>& op, const RunOptions& opt = {});

std::string format_csv(const CsvFile& f);
// Writes report.json and <name>.csv files into dir (created if missing).
void write_report(const ReportDocument& doc, const std::string& dir, bool json, bool csv);

}  // namespace weightlab

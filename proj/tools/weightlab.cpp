#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "weightlab/report.hpp"

using namespace weightlab;

namespace {

constexpr int kErrorExit = 3;

struct Common {
  std::optional<int> grid_depth;
  std::optional<int> points_per_level;
  std::string out;
  bool json = false;
  bool csv = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--grid-depth", c.grid_depth, "number of dyadic (disc) or unit (plane) levels");
  cmd->add_option("--points-per-level", c.points_per_level, "grid points per level");
  cmd->add_option("--out", c.out, "directory for report.json (and CSV traces with --csv)");
  cmd->add_flag("--json", c.json, "print the JSON report to stdout (default without --out)");
  cmd->add_flag("--csv", c.csv, "write CSV traces into the --out directory (default .)");
}

RunOptions options(const Common& c, int N) {
  RunOptions o;
  o.grid_depth = c.grid_depth;
  o.points_per_level = c.points_per_level;
  o.N = N;
  if (!o.grid_depth) {
    if (const char* env = std::getenv("WEIGHTLAB_GRID_DEPTH")) {
      try {
        o.grid_depth = std::stoi(env);
      } catch (const std::exception&) {
        throw Error(ErrorCode::ParseError, std::string("WEIGHTLAB_GRID_DEPTH is not an integer: ") + env);
      }
    }
  }
  return o;
}

int emit(const ReportDocument& doc, const Common& c) {
  if (!c.out.empty() || c.csv) {
    const std::string dir = c.out.empty() ? "." : c.out;
    write_report(doc, dir, !c.out.empty(), c.csv);
  }
  if (c.out.empty() || c.json) std::cout << doc.json.dump(2) << '\n';
  return doc.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weightlab: weighted spaces of holomorphic functions, D and I operators"};
  app.require_subcommand(1);

  Common common;

  std::string analyze_spec;
  auto* analyze = app.add_subcommand("analyze", "condition batteries and class tags for one weight");
  analyze->add_option("spec", analyze_spec, "family(params)@disc|plane or piecewise:<file.json>")->required();
  add_common(analyze, common);

  std::string op_text, v_spec, w_spec;
  auto* verdict = app.add_subcommand("verdict", "boundedness verdict for D: H_v -> H_w or I: H_w -> H_v");
  verdict->add_option("op", op_text, "D or I")->required();
  verdict->add_option("v", v_spec, "weight spec")->required();
  verdict->add_option("w", w_spec, "weight spec, 'same' or 'auto:v-over-1-minus-r'")->required();
  add_common(verdict, common);

  std::string which;
  CounterexampleParams cx;
  auto* counter = app.add_subcommand("counterexample", "build ex1, ex2 or ex3 and check the designed gaps");
  counter->add_option("which", which, "ex1 | ex2 | ex3")->required();
  counter->add_option("--a", cx.a, "sequence a_n, e.g. \"3^-n\"");
  counter->add_option("--b", cx.b, "sequence b_n");
  counter->add_option("--eps", cx.eps, "sequence eps_n (ex3)");
  counter->add_option("--n-max", cx.n_max, "truncation depth");
  add_common(counter, common);

  std::string norms_spec;
  std::optional<std::string> norms_w, norms_op;
  int N = 50;
  auto* norms = app.add_subcommand("norms", "monomial log-norms A_n and operator ratio traces");
  norms->add_option("spec", norms_spec, "weight spec")->required();
  norms->add_option("--N", N, "largest monomial degree");
  norms->add_option("--w", norms_w, "target weight for --op ('same' by default)");
  norms->add_option("--op", norms_op, "D or I: also emit log ||op z^n||_w - log ||z^n||_v");
  add_common(norms, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*analyze) return emit(run_analyze(analyze_spec, options(common, N)), common);
    if (*verdict) return emit(run_verdict(parse_operator(op_text), v_spec, w_spec, options(common, N)), common);
    if (*counter) return emit(run_counterexample(which, cx, options(common, N)), common);
    std::optional<Operator> op;
    if (norms_op) op = parse_operator(*norms_op);
    return emit(run_norms(norms_spec, norms_w, op, options(common, N)), common);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kErrorExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kErrorExit;
  }
}

#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "weightlab/report.hpp"

using namespace weightlab;

TEST(Numbers, Formatting) {
  EXPECT_EQ(format_number(0.1 + 0.2), "0.3");
  EXPECT_EQ(format_number(1.0 / 0.0), "inf");
  EXPECT_EQ(format_number(-1.0 / 0.0), "-inf");
  EXPECT_EQ(json_number(std::nan("")), Json("nan"));
  EXPECT_DOUBLE_EQ(json_number(1.0 / 3.0).get<double>(), 0.333333333333);
}

TEST(Csv, Format) {
  CsvFile f{"t", {"x", "y"}, {{1.0, 0.5}, {2.0, 1.0 / 0.0}}};
  EXPECT_EQ(format_csv(f), "x,y\n1,0.5\n2,inf\n");
}

TEST(Resolve, InvalidParamsBecomesWeightInvalid) {
  try {
    resolve_weight("power_disc(-1)@disc");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::WeightInvalid);
  }
  RadialWeight v = resolve_weight("power_disc(1)@disc");
  EXPECT_EQ(resolve_partner("same", v).label(), v.label());
  EXPECT_NE(resolve_partner("auto:v-over-1-minus-r", v).label(), v.label());
}

TEST(Documents, AnalyzeSchema) {
  ReportDocument d = run_analyze("power_disc(2)@disc");
  EXPECT_EQ(d.json["schema_version"], kSchemaVersion);
  EXPECT_EQ(d.json["command"], "analyze");
  EXPECT_TRUE(d.json["classes"]["flags"].is_array());
  EXPECT_TRUE(d.json["conditions"].is_array());
  EXPECT_TRUE(d.json["lattice_violations"]["disc_d"].empty());
  EXPECT_FALSE(d.csv.empty());
}

TEST(Documents, VerdictExitCode) {
  EXPECT_EQ(run_verdict(Operator::D, "power_disc(1)@disc", "auto:v-over-1-minus-r").exit_code, 0);
  ReportDocument u = run_verdict(Operator::D, "exp_plane(2)@plane", "same");
  EXPECT_EQ(u.exit_code, 1);
  EXPECT_EQ(u.json["result"]["verdict"], "Unbounded");
}

TEST(Documents, Norms) {
  RunOptions o;
  o.N = 10;
  ReportDocument d = run_norms("power_disc(1)@disc", std::nullopt, std::nullopt, o);
  ASSERT_EQ(d.csv.size(), 1u);
  EXPECT_EQ(d.csv[0].rows.size(), 11u);
}

TEST(Documents, WriteReport) {
  const auto dir = std::filesystem::path(testing::TempDir()) / "weightlab_report";
  std::filesystem::remove_all(dir);
  RunOptions o;
  o.N = 5;
  write_report(run_norms("exp_plane(1)@plane", std::nullopt, std::nullopt, o), dir.string(), true, true);
  EXPECT_TRUE(std::filesystem::exists(dir / "report.json"));
  std::ifstream in(dir / "report.json");
  Json j = Json::parse(in);
  EXPECT_EQ(j["command"], "norms");
}

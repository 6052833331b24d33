#include <cmath>

#include <gtest/gtest.h>

#include "weightlab/criteria.hpp"

using namespace weightlab;

namespace {

LogProfile levels_profile(int depth, int per_level) {
  LogProfile p;
  p.domain = Domain::plane();
  p.depth = depth;
  for (int l = 0; l < depth; ++l)
    for (int k = 0; k < per_level; ++k) {
      p.xs.push_back(l + double(k) / per_level);
      p.levels.push_back(l);
      p.phis.push_back(0.0);
    }
  return p;
}

std::vector<double> per_level(const LogProfile& p, auto f) {
  std::vector<double> out;
  for (int l : p.levels) out.push_back(f(l));
  return out;
}

}  // namespace

TEST(Tail, ConvergentSequence) {
  LogProfile p = levels_profile(20, 4);
  AsymptoticEstimate e = estimate_tail(p, per_level(p, [](int l) { return 4.0 + std::pow(2.0, -l); }),
                                       EstimateKind::Limsup);
  EXPECT_EQ(e.trend, TrendKind::ConvergesTo);
  EXPECT_NEAR(e.value, 4.0, 1e-3);
  EXPECT_EQ(verdict_finite_limsup(e), Verdict::Holds);
  EXPECT_EQ(verdict_limsup_below_one(e), Verdict::Fails);
}

TEST(Tail, DivergentSequence) {
  LogProfile p = levels_profile(20, 4);
  AsymptoticEstimate e = estimate_tail(p, per_level(p, [](int l) { return std::pow(2.0, l); }), EstimateKind::Limsup);
  EXPECT_EQ(e.trend, TrendKind::DivergesToInfinity);
  EXPECT_EQ(verdict_finite_limsup(e), Verdict::Fails);
}

TEST(Tail, DecayingLiminf) {
  LogProfile p = levels_profile(20, 4);
  AsymptoticEstimate e = estimate_tail(p, per_level(p, [](int l) { return std::pow(2.0, -l); }), EstimateKind::Liminf);
  EXPECT_EQ(e.trend, TrendKind::DecaysToZero);
  EXPECT_EQ(verdict_positive_liminf(e), Verdict::Fails);
}

TEST(Tail, TooFewLevelsThrows) {
  LogProfile p = levels_profile(3, 4);
  try {
    estimate_tail(p, per_level(p, [](int) { return 1.0; }), EstimateKind::Limsup);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooFewLevels);
  }
}

TEST(DiscBatteries, PowerWeightAllHold) {
  RadialWeight v = parse_weight_spec("power_disc(1)@disc");
  auto d = check_disc_d_conditions(v);
  auto i = check_disc_i_conditions(v);
  for (const auto& r : d) EXPECT_EQ(r.verdict, Verdict::Holds) << r.id;
  for (const auto& r : i) EXPECT_EQ(r.verdict, Verdict::Holds) << r.id;
  EXPECT_NEAR(*find_report(d, "disc_d.slope_limsup").scalar, 1.0, 1e-6);
  EXPECT_NEAR(*find_report(d, "disc_d.dyadic_ratio").scalar, 2.0, 1e-6);
  ASSERT_NE(find_report(d, "disc_d.mobius_shift").part("delta=0.5"), nullptr);
  EXPECT_TRUE(lattice_violations(d, true).empty());
  EXPECT_TRUE(lattice_violations(i, true).empty());
}

TEST(DiscBatteries, RapidWeightFailsDerivativeSide) {
  RadialWeight v = parse_weight_spec("exp_inv_disc(1,1)@disc");
  auto d = check_disc_d_conditions(v);
  EXPECT_EQ(find_report(d, "disc_d.slope_limsup").verdict, Verdict::Fails);
  EXPECT_EQ(find_report(d, "disc_d.dyadic_ratio").verdict, Verdict::Fails);
  EXPECT_TRUE(lattice_violations(d, true).empty());
  EXPECT_EQ(check_log_domination(v).verdict, Verdict::Holds);
}

TEST(DiscBatteries, SlowWeightFailsIntegrationSide) {
  RadialWeight v = parse_weight_spec("log_power_disc(1)@disc");
  auto i = check_disc_i_conditions(v);
  EXPECT_EQ(find_report(i, "disc_i.slope_liminf").verdict, Verdict::Fails);
  EXPECT_EQ(check_log_domination(v).verdict, Verdict::Fails);
}

TEST(PlaneBatteries, ExpWeights) {
  auto one = check_plane_d_conditions(parse_weight_spec("exp_plane(1)@plane"));
  for (const auto& r : one) EXPECT_EQ(r.verdict, Verdict::Holds) << r.id;
  auto two = check_plane_d_conditions(parse_weight_spec("exp_plane(2)@plane"));
  EXPECT_EQ(find_report(two, "plane_d.slope_limsup").verdict, Verdict::Fails);
  auto integ = check_plane_i_conditions(parse_weight_spec("exp_plane(1)@plane"));
  EXPECT_EQ(find_report(integ, "plane_i.integral").verdict, Verdict::Holds);
  EXPECT_EQ(check_epimorphism_plane(parse_weight_spec("exp_plane(1)@plane")).verdict, Verdict::Holds);
}

TEST(FindReport, UnknownIdThrows) {
  auto d = check_disc_d_conditions(parse_weight_spec("power_disc(1)@disc"));
  EXPECT_THROW(find_report(d, "no_such_condition"), Error);
}

TEST(Classes, Tags) {
  WeightClassTags p = classify_weight(parse_weight_spec("power_disc(2)@disc"));
  EXPECT_TRUE(p.has(WeightClass::LogConvex));
  EXPECT_TRUE(p.has(WeightClass::HWeight));
  EXPECT_TRUE(p.has(WeightClass::Regular));
  ASSERT_TRUE(p.L_v);
  EXPECT_NEAR(*p.L_v, 2.0, 1e-3);
  WeightClassTags e = classify_weight(parse_weight_spec("exp_plane(1)@plane"));
  EXPECT_TRUE(e.has(WeightClass::CKWeight));
  EXPECT_FALSE(e.has(WeightClass::HWeight));
  EXPECT_TRUE(classify_weight(parse_weight_spec("rapid_disc(1)@disc")).has(WeightClass::RapidlyGrowing));
}

TEST(Lattice, FlagsDecidedContradiction) {
  auto d = check_disc_d_conditions(parse_weight_spec("power_disc(1)@disc"));
  for (auto& r : d)
    if (r.id == "disc_d.dyadic_ratio") r.verdict = Verdict::Fails;
  EXPECT_FALSE(lattice_violations(d, true).empty());
}

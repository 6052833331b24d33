#include <cmath>

#include <gtest/gtest.h>

#include "weightlab/operators.hpp"

using namespace weightlab;

TEST(PolyFunction, DAndI) {
  PolyFunction f({1.0, 2.0, 3.0});
  EXPECT_EQ(apply_D(f).coeffs, (std::vector<double>{2.0, 6.0}));
  EXPECT_EQ(apply_I(f).coeffs, (std::vector<double>{0.0, 1.0, 1.0, 1.0}));
  EXPECT_EQ(apply_D(apply_I(f)).coeffs, f.coeffs);
  EXPECT_TRUE(apply_D(PolyFunction({5.0})).is_zero());
  EXPECT_THROW(PolyFunction({1.0, -1.0}), Error);
  EXPECT_EQ(PolyFunction::monomial(3).coeffs, (std::vector<double>{0, 0, 0, 1}));
}

TEST(PolyFunction, ParseOperator) {
  EXPECT_EQ(parse_operator("D"), Operator::D);
  EXPECT_EQ(parse_operator("I"), Operator::I);
  EXPECT_THROW(parse_operator("X"), Error);
}

TEST(WeightedNorm, MonomialMatchesClosedForm) {
  RadialWeight v = parse_weight_spec("exp_plane(1)@plane");
  for (int n : {1, 5, 20}) EXPECT_NEAR(weighted_log_norm(PolyFunction::monomial(n), v), n * std::log(n) - n, 1e-3);
  EXPECT_NEAR(weighted_log_norm(PolyFunction({1.0}), v), 0.0, 1e-12);
}

TEST(VRho, DiscAndPlane) {
  RadialWeight v = parse_weight_spec("power_disc(1)@disc");
  RadialWeight r = v_rho_weight(v);
  // (2/(1-r)) v((1+r)/2) = 4/(1-r)^2
  EXPECT_NEAR(r.eval_log(0.5), std::log(16.0), 1e-9);
  RadialWeight p = v_rho_weight(parse_weight_spec("exp_plane(1)@plane"));
  EXPECT_NEAR(p.eval_log(2.0), 3.0, 1e-9);
}

TEST(MonomialRatios, PowerDiscDerivative) {
  RadialWeight v = parse_weight_spec("power_disc(1)@disc");
  MonomialRatios m = monomial_norm_ratios(Operator::D, v, divide_by_one_minus_r(v), 200);
  EXPECT_TRUE(std::isnan(m.ratio[0]));
  // ||n z^{n-1}||_w / ||z^n||_v -> 4/e for w = (1-r)^-2, v = (1-r)^-1
  EXPECT_NEAR(std::exp(m.ratio[200]), 4.0 / std::exp(1.0), 0.01);
  AsymptoticEstimate t = ratio_trend(m);
  EXPECT_NE(t.trend, TrendKind::DivergesToInfinity);
}

TEST(MonomialRatios, PlaneDerivativeDiverges) {
  RadialWeight v = parse_weight_spec("exp_plane(2)@plane");
  MonomialRatios m = monomial_norm_ratios(Operator::D, v, v, 256);
  EXPECT_GT(m.ratio[256], m.ratio[16]);
}

struct VerdictCase {
  Operator op;
  const char* v;
  const char* w;
  Boundedness expected;
  const char* theorem;
};

class VerdictTable : public testing::TestWithParam<VerdictCase> {};

TEST_P(VerdictTable, Matches) {
  const VerdictCase& c = GetParam();
  RadialWeight v = parse_weight_spec(c.v);
  RadialWeight w = std::string(c.w) == "auto" ? divide_by_one_minus_r(v) : std::string(c.w) == "same" ? v
                                                                                                     : parse_weight_spec(c.w);
  OperatorVerdict r = boundedness_verdict(c.op, v, w);
  EXPECT_EQ(r.verdict, c.expected) << r.justification;
  EXPECT_EQ(r.theorem, c.theorem);
  EXPECT_FALSE(r.justification.empty());
}

INSTANTIATE_TEST_SUITE_P(
    Cases, VerdictTable,
    testing::Values(VerdictCase{Operator::D, "power_disc(1)@disc", "auto", Boundedness::Bounded, "disc-derivative-criterion"},
                    VerdictCase{Operator::I, "power_disc(1)@disc", "auto", Boundedness::Bounded, "disc-integration-sufficient"},
                    VerdictCase{Operator::D, "exp_plane(2)@plane", "same", Boundedness::Unbounded, "plane-derivative-criterion"},
                    VerdictCase{Operator::I, "exp_plane(2)@plane", "same", Boundedness::Bounded, "plane-integration-criterion"},
                    VerdictCase{Operator::D, "exp_inv_disc(1,1)@disc", "auto", Boundedness::Unbounded, "monomial-witness"},
                    VerdictCase{Operator::D, "power_disc(1)@disc", "same", Boundedness::Unbounded, "derivative-necessity"},
                    VerdictCase{Operator::I, "log_power_disc(1)@disc", "same", Boundedness::Bounded,
                                "disc-integration-universal"}),
    [](const testing::TestParamInfo<VerdictCase>& info) {
      std::string name = std::string(to_string(info.param.op)) + "_" + info.param.theorem;
      for (char& c : name)
        if (c == '-') c = '_';
      return name;
    });

TEST(Verdict, DomainMismatchThrows) {
  try {
    boundedness_verdict(Operator::D, parse_weight_spec("power_disc(1)@disc"), parse_weight_spec("exp_plane(1)@plane"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DomainMismatch);
  }
}

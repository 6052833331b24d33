#include <cmath>

#include <gtest/gtest.h>

#include "weightlab/counterexamples.hpp"

using namespace weightlab;

TEST(ExampleDisc, HullHitsBreakpoints) {
  CounterexampleBundle b = build_example_d_disc(default_disc_sequences());
  ASSERT_EQ(b.breakpoints.size(), 30u);
  for (std::size_t k = 0; k < b.breakpoints.size(); ++k) {
    EXPECT_NEAR(b.v.log_at(b.breakpoints[k]), b.phi_bar_values[k], 1e-9);
    EXPECT_NEAR(b.v_bar.log_at(b.breakpoints[k]), b.phi_bar_values[k], 1e-9);
  }
  // v_bar is a minorant between breakpoints
  for (double x = b.breakpoints.front(); x < b.breakpoints.back(); x += 1e-4)
    EXPECT_LE(b.v_bar.log_at(x), b.v.log_at(x) + 1e-9);
  // sum of (2/3)^n ... L = lim T_n/(a_n+b_n) = 1 for 2^-n
  EXPECT_NEAR(b.constant("L"), 1.0, 1e-3);
  EXPECT_NEAR(b.constant("minorant_limit"), 4.0, 1e-2);
  EXPECT_NEAR(b.constant("M"), 1.0, 1e-12);
  EXPECT_THROW(b.constant("missing"), Error);
}

TEST(ExamplePlane, Builds) {
  CounterexampleBundle b = build_example_d_plane(default_plane_sequences());
  EXPECT_EQ(b.breakpoints.size(), 20u);
  EXPECT_NEAR(b.v.log_at(b.breakpoints.back()), 40.0, 1e-9);
  EXPECT_NEAR(b.constant("S_n_max"), std::log(21.0), 1e-6);
  EXPECT_GT(b.constant("L"), 0.0);
}

TEST(ExampleIntegration, Constant) {
  SequenceExpr eps = default_eps_sequence();
  EXPECT_NEAR(example_i_constant(eps, 30), 0.452826603472, 1e-11);
  CounterexampleBundle b = build_example_i_plane(eps);
  EXPECT_NEAR(b.constant("C"), 0.452826603472, 1e-11);
  // |log v - log v_bar| <= C on the main range
  for (double x = 0.0; x < 12.0; x += 0.01)
    EXPECT_LE(std::abs(b.v.log_at(x) - b.v_bar.log_at(x)), b.constant("C") + 1e-9) << x;
}

TEST(SequenceProperties, Violations) {
  auto expect_property = [](auto&& build, int property) {
    try {
      build();
      FAIL() << "expected violation of property " << property;
    } catch (const SequencePropertyViolation& e) {
      EXPECT_EQ(e.property(), property) << e.what();
    }
  };
  expect_property([] { build_example_d_disc({SequenceExpr::parse("3^-n"), SequenceExpr::parse("3^-n"), 30}); }, 2);
  expect_property([] { build_example_d_disc({SequenceExpr::parse("-1"), SequenceExpr::parse("2^-n"), 30}); }, 0);
  expect_property([] { build_example_d_disc({SequenceExpr::parse("3^-n"), SequenceExpr::parse("1/n"), 30}); }, 1);
  expect_property([] { build_example_d_plane({SequenceExpr::parse("3^-n"), SequenceExpr::parse("2^-n"), 20}); }, 1);
  expect_property([] { build_example_d_disc({SequenceExpr::parse("2^-n/2"), SequenceExpr::parse("2^-n"), 30}); }, 4);
}

TEST(SequenceProperties, SmallTruncationRejected) {
  EXPECT_THROW(build_example_d_disc({SequenceExpr::parse("3^-n"), SequenceExpr::parse("2^-n - 3^-n"), 3}), Error);
}

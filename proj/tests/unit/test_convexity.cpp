#include <cmath>

#include <gtest/gtest.h>

#include "weightlab/convexity.hpp"

using namespace weightlab;

namespace {

LogProfile profile(std::vector<double> xs, std::vector<double> phis) {
  LogProfile p;
  p.domain = Domain::plane();
  p.xs = std::move(xs);
  p.phis = std::move(phis);
  p.levels.assign(p.xs.size(), 0);
  p.depth = 1;
  return p;
}

}  // namespace

TEST(ConvexMinorant, DropsPointsAboveChords) {
  LogProfile p = profile({0, 1, 2, 3, 4}, {0, 3, 1, 4, 4});
  PiecewiseLinearConvex h = convex_minorant(p);
  EXPECT_EQ(h.breakpoints, (std::vector<double>{0, 2, 4}));
  EXPECT_DOUBLE_EQ(h.value_at(1.0), 0.5);
  EXPECT_DOUBLE_EQ(h.value_at(3.0), 2.5);
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_LE(h.value_at(p.xs[i]), p.phis[i] + 1e-15);
  EXPECT_DOUBLE_EQ(right_derivative(h, 2.0), 1.5);
}

TEST(ConvexMinorant, IdempotentOnConvexData) {
  LogProfile p = profile({0, 1, 2, 3}, {0, 1, 4, 9});
  PiecewiseLinearConvex h = convex_minorant(p);
  LogProfile q = minorant_profile(p, h);
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_DOUBLE_EQ(q.phis[i], p.phis[i]);
  EXPECT_TRUE(is_log_convex(p).convex);
}

TEST(LogConvexity, DetectsKink) {
  ConvexityCheck c = is_log_convex(profile({0, 1, 2}, {0, 2, 3}));
  EXPECT_FALSE(c.convex);
  EXPECT_NEAR(c.max_violation, 1.0, 1e-12);
}

TEST(MonomialNorms, PowerDiscClosedForm) {
  RadialWeight v = parse_weight_spec("power_disc(1)@disc");
  GridSpec g;
  LogProfile p = sample_log_profile(v, g);
  MonomialNorms m = monomial_log_norms(p, 40, BoundaryPolicy::Flag);
  refine_monomial_log_norms(m, v, p);
  for (int n = 1; n <= 40; ++n) {
    const double exact = n * std::log(n / (n + 1.0)) + std::log(1.0 / (n + 1.0));
    EXPECT_NEAR(m.A[n], exact, 1e-9) << n;
  }
}

TEST(MonomialNorms, ExpPlaneClosedForm) {
  RadialWeight v = parse_weight_spec("exp_plane(1)@plane");
  LogProfile p = sample_log_profile(v, GridSpec{});
  MonomialNorms m = monomial_log_norms(p, 30, BoundaryPolicy::Flag);
  refine_monomial_log_norms(m, v, p);
  for (int n = 1; n <= 30; ++n) EXPECT_NEAR(m.A[n], n * std::log(n) - n, 1e-8) << n;
}

TEST(MonomialNorms, StrictPolicyThrowsAtPlaneBoundary) {
  RadialWeight v = parse_weight_spec("exp_plane(1)@plane");
  GridSpec g;
  g.depth = 3;
  LogProfile p = sample_log_profile(v, g);
  try {
    monomial_log_norms(p, 200, BoundaryPolicy::Strict);
    FAIL() << "expected MaximizerAtBoundary";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MaximizerAtBoundary);
  }
}

TEST(AssociatedEnvelope, RecoversConvexWeight) {
  RadialWeight v = parse_weight_spec("power_disc(2)@disc");
  GridSpec g;
  g.depth = 12;
  LogProfile p = sample_log_profile(v, g);
  MonomialNorms m = monomial_log_norms(p, 4000, BoundaryPolicy::Flag);
  LogProfile e = associated_envelope(m, p);
  auto [lo, hi] = p.level_range(4);
  for (std::size_t i = lo; i < hi; ++i) EXPECT_NEAR(e.phis[i], p.phis[i], 1e-6);
}

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "weightlab/weight.hpp"

namespace weightlab {

// slopes[i] belongs to [breakpoints[i], breakpoints[i+1]].
struct PiecewiseLinearConvex {
  std::vector<double> breakpoints;
  std::vector<double> values;
  std::vector<double> slopes;

  double value_at(double x) const;
};

PiecewiseLinearConvex convex_minorant(const LogProfile& p);
// The minorant evaluated on p's grid.
LogProfile minorant_profile(const LogProfile& p, const PiecewiseLinearConvex& h);
// A piecewise weight whose log-profile is h, extended by its last slope.
RadialWeight minorant_weight(const PiecewiseLinearConvex& h, Domain domain, std::string label);

struct ConvexityCheck {
  bool convex = true;
  double max_violation = 0.0;
  std::size_t at = 0;
};

// Slope drops are measured relative to max(1, |slope|).
ConvexityCheck is_log_convex(const LogProfile& p, double tol = 1e-9);

struct MonomialNorms {
  std::vector<double> A;
  std::vector<double> x;
  std::vector<std::size_t> argmax;
  std::vector<bool> grid_limited;

  int N() const { return static_cast<int>(A.size()) - 1; }
};

enum class BoundaryPolicy { Strict, Flag };

// A_n = max_i (n x_i - phi_i). Strict throws MaximizerAtBoundary on the plane.
MonomialNorms monomial_log_norms(const LogProfile& p, int N, BoundaryPolicy policy = BoundaryPolicy::Strict);
MonomialNorms monomial_log_norms(const PiecewiseLinearConvex& h, Domain domain, int N,
                                 BoundaryPolicy policy = BoundaryPolicy::Strict);
// Local golden-section refinement around each grid maximizer using w itself.
void refine_monomial_log_norms(MonomialNorms& m, const RadialWeight& w, const LogProfile& p);

// phi_hat(x) = max_n (n x - A_n) on p's grid, ignoring grid-limited n.
LogProfile associated_envelope(const MonomialNorms& m, const LogProfile& p);

double right_derivative(const PiecewiseLinearConvex& q, double x);

}  // namespace weightlab

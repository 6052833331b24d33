#pragma once

#include <string>
#include <utility>
#include <vector>

#include "weightlab/expr.hpp"
#include "weightlab/weight.hpp"

namespace weightlab {

struct SequencePair {
  SequenceExpr a;
  SequenceExpr b;
  int n_max = 30;
};

// a_n = 3^-n, b_n = 2^-n - 3^-n.
SequencePair default_disc_sequences();
// a_n = 3^-n, b_n = log(1+1/n) - 3^-n.
SequencePair default_plane_sequences();
// eps_k = e^{-2k}
SequenceExpr default_eps_sequence();

struct CounterexampleBundle {
  std::string name;
  RadialWeight v;
  RadialWeight v_bar;
  // Points S_n (n >= 1) where phi_bar = phi, with the closed-form minorant value there.
  std::vector<double> breakpoints;
  std::vector<double> phi_bar_values;
  std::vector<std::pair<std::string, double>> constants;
  // Grid matched to the truncation depth.
  GridSpec grid;

  double constant(const std::string& key) const;
};

// Non-convex phi on (-inf, 0) with blocks of slopes 1/a_n, 1/b_n ending at S_n = -sum_{k>n}(a_k+b_k).
CounterexampleBundle build_example_d_disc(const SequencePair& s);
// Same blocks on the plane with S_n = sum_{k<=n}(a_k+b_k).
CounterexampleBundle build_example_d_plane(const SequencePair& s);
// phi = e^x up to bounded losses on unit-slope pieces (n, n+eps_n]; v_bar = e^r.
CounterexampleBundle build_example_i_plane(const SequenceExpr& eps, int n_max = 12);

// sum_{k<=k_max} (e^k (e^{eps_k} - 1) - eps_k)
double example_i_constant(const SequenceExpr& eps, int k_max);

}  // namespace weightlab

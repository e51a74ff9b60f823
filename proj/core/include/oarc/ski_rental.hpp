#pragma once

#include <vector>

#include "oarc/markov_tree.hpp"

namespace oarc {

/// Solution of the per-job buy-or-wait recursion at one capacity price gamma:
///   value(i)  = min(gamma, cost(i) + future(i))
///   future(i) = sum over children k of p(k) * value(k)
///   beta(i)   = max(0, cost(i) + future(i) - gamma)
///   index(i)  = cost(i) + future(i)
struct ValueTable {
  double gamma = 0.0;
  std::vector<double> value;
  std::vector<double> future;
  std::vector<double> beta;
  std::vector<double> index;
};

/// One bottom-up pass over the tree, O(|S|).
ValueTable value_functions(const MarkovTree& tree, double gamma);

/// Dual objective mu*gamma + lambda*(c^f(root) - V(gamma, root)).
double dual_value(const MarkovTree& tree, double lambda, double mu, double gamma);

struct GammaResult {
  double gamma_star = 0.0;  // left endpoint of the minimizing segment
  double objective = 0.0;   // mu*gamma_star - lambda*V(gamma_star, root)
  // The whole minimizing segment; segment_lo == segment_hi when the minimum
  // is a single kink.
  double segment_lo = 0.0;
  double segment_hi = 0.0;
  // One-sided derivatives of g at gamma_star; a certified minimum has
  // left_derivative <= 0 <= right_derivative (within tolerance). At
  // gamma_star = 0 there is no left side and the field mirrors the right.
  double left_derivative = 0.0;
  double right_derivative = 0.0;
  ValueTable table;  // value functions at gamma_star
};

/// Minimizes g(gamma) = mu*gamma - lambda*V(gamma, root) over gamma >= 0.
/// g is convex piecewise-linear (V is concave, nondecreasing, 1-Lipschitz in
/// gamma), so the minimizer is located by bisection on the one-sided
/// derivatives of g, computed by propagating dV/dgamma bottom-up.
GammaResult optimal_gamma(const MarkovTree& tree, double lambda, double mu);

struct IndexTable {
  std::vector<double> index;   // cost(i) + future(gamma_star, i)
  std::vector<StateId> order;  // index descending, ties by ascending state id
};

/// Index table and the induced priority order at a given capacity price.
IndexTable oarc_indices(const MarkovTree& tree, double gamma_star);

/// Priority order for an arbitrary index vector: descending index, ties by
/// ascending state id (the consistent tie-break used everywhere).
std::vector<StateId> index_order(const std::vector<double>& index);

}  // namespace oarc

#pragma once

#include <string>
#include <vector>

#include "oarc/markov_tree.hpp"
#include "oarc/ski_rental.hpp"

namespace oarc {

/// Permutation of state ids; position 0 is the highest priority.
struct PriorityOrdering {
  std::vector<StateId> order;
};

/// How a state is treated by the water-filling equilibrium.
enum class StateLabel : std::uint8_t {
  UnReduced,         // no service anywhere on its root path
  FullyBlocked,      // fully served, unserved ancestors
  Empty,             // an ancestor is fully served
  PartiallyServed,   // the unique state splitting the residual capacity
  PartiallyBlocked,  // fully served below the partially-served state
  PartiallyReduced,  // unserved below the partially-served state
};

const char* to_string(StateLabel label);

/// Fluid equilibrium (q, nu) induced by serving states down a priority
/// ordering. kappa is only meaningful when partial != kNoState; it is
/// reported as +inf otherwise and never used in arithmetic.
struct FluidEquilibrium {
  std::vector<double> q;
  std::vector<double> nu;
  int m = 0;                  // positions of the ordering that are fully servable
  StateId partial = kNoState; // rho, the partially-served state
  double kappa = 0.0;
  std::vector<StateLabel> label;
};

/// Water-filling construction. The cutoff m is the maximal position such
/// that the top set of the first m states fits in mu; ties (mass == mu up to
/// 1e-12) leave no partially-served state.
FluidEquilibrium water_fill(const MarkovTree& tree, double lambda, double mu,
                            const PriorityOrdering& ordering);

/// Objective sum c(i) (q(i) - nu(i)).
double fluid_cost(const MarkovTree& tree, const FluidEquilibrium& eq);

struct CheckReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Verifies the equilibrium invariants with tolerance 1e-9: flow balance,
/// 0 <= nu <= q, capacity, full capacity use when a partial state exists, and
/// the label partition rules.
CheckReport check_feasibility(const MarkovTree& tree, double lambda, double mu,
                              const FluidEquilibrium& eq);

/// Complementary-slackness conditions for a service vector nu at capacity
/// price gamma_star: (C-1) capacity binds when gamma_star > 0; (C-2) states
/// priced above gamma_star are fully served; (C-3) states priced below it get
/// nothing. q is recomputed from nu rather than trusted. Throws if nu is
/// infeasible.
CheckReport check_optimality(const MarkovTree& tree, double lambda, double mu,
                             const std::vector<double>& nu, double gamma_star,
                             const ValueTable& values);

struct CStarResult {
  double value = 0.0;       // optimal fluid cost
  double gamma_star = 0.0;
  PriorityOrdering ordering;  // the index ordering that attains it
  FluidEquilibrium eq;
};

/// Optimal fluid cost: water-fills the price-based index ordering and
/// certifies it via check_optimality (failure indicates a bug and throws).
CStarResult c_star(const MarkovTree& tree, double lambda, double mu);

}  // namespace oarc

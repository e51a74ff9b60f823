#include "oarc/fluid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace oarc {

namespace {

constexpr double kTieTol = 1e-12;
constexpr double kCheckTol = 1e-9;

void check_rates(double lambda, double mu) {
  if (!(lambda > 0.0) || lambda >= 1.0)
    throw std::invalid_argument("lambda must be in (0,1)");
  if (mu < 0.0 || mu > 1.0) throw std::invalid_argument("mu must be in [0,1]");
}

void check_ordering(const MarkovTree& tree, const PriorityOrdering& ordering) {
  if (static_cast<int>(ordering.order.size()) != tree.size())
    throw std::invalid_argument("ordering must cover every state");
  std::vector<char> seen(static_cast<std::size_t>(tree.size()), 0);
  for (StateId i : ordering.order) {
    if (i < 0 || i >= tree.size() || seen[static_cast<std::size_t>(i)])
      throw std::invalid_argument("ordering must be a permutation of states");
    seen[static_cast<std::size_t>(i)] = 1;
  }
}

// q implied by a service vector: q_i = lambda pi(i) - sum over proper
// ancestors a of nu_a pi(i)/pi(a). Computed top-down in one pass.
std::vector<double> implied_queue(const MarkovTree& tree, double lambda,
                                  const std::vector<double>& pi,
                                  const std::vector<double>& nu) {
  std::vector<double> q(pi.size(), 0.0);
  std::vector<double> served_frac(pi.size(), 0.0);  // sum nu_a / pi(a) over anc(i)\{i}
  std::vector<StateId> stack{tree.root()};
  q[static_cast<std::size_t>(tree.root())] = lambda;
  while (!stack.empty()) {
    const StateId i = stack.back();
    stack.pop_back();
    const auto ii = static_cast<std::size_t>(i);
    for (StateId k : tree.children(i)) {
      const auto kk = static_cast<std::size_t>(k);
      served_frac[kk] = served_frac[ii] + nu[ii] / pi[ii];
      q[kk] = lambda * pi[kk] - served_frac[kk] * pi[kk];
      stack.push_back(k);
    }
  }
  return q;
}

}  // namespace

const char* to_string(StateLabel label) {
  switch (label) {
    case StateLabel::UnReduced: return "unreduced";
    case StateLabel::FullyBlocked: return "fully-blocked";
    case StateLabel::Empty: return "empty";
    case StateLabel::PartiallyServed: return "partially-served";
    case StateLabel::PartiallyBlocked: return "partially-blocked";
    case StateLabel::PartiallyReduced: return "partially-reduced";
  }
  return "?";
}

FluidEquilibrium water_fill(const MarkovTree& tree, double lambda, double mu,
                            const PriorityOrdering& ordering) {
  check_rates(lambda, mu);
  check_ordering(tree, ordering);
  const auto n = static_cast<std::size_t>(tree.size());
  const auto pi = pass_prob(tree);

  // Scan positions keeping the running top set of the prefix. Inserting a
  // state either is absorbed by an ancestor already in the top set or enters
  // and evicts its own descendants.
  std::vector<char> in_top(n, 0);
  double mass = 0.0;  // sum of lambda*pi over the top set
  int m = 0;
  bool tie_at_m = std::abs(mass - mu) <= kTieTol;  // mu == 0 edge
  StateId partial = kNoState;
  std::vector<char> in_top_at_m(n, 0);
  double mass_at_m = 0.0;

  for (int pos = 0; pos < tree.size(); ++pos) {
    const StateId s = ordering.order[static_cast<std::size_t>(pos)];
    bool covered = false;
    for (StateId a = s; a != kNoState; a = tree.parent(a)) {
      if (in_top[static_cast<std::size_t>(a)]) {
        covered = true;
        break;
      }
    }
    if (!covered) {
      // Evict descendants of s from the top set.
      std::vector<StateId> stack{s};
      while (!stack.empty()) {
        const StateId i = stack.back();
        stack.pop_back();
        if (in_top[static_cast<std::size_t>(i)]) {
          in_top[static_cast<std::size_t>(i)] = 0;
          mass -= lambda * pi[static_cast<std::size_t>(i)];
        }
        for (StateId k : tree.children(i)) stack.push_back(k);
      }
      in_top[static_cast<std::size_t>(s)] = 1;
      mass += lambda * pi[static_cast<std::size_t>(s)];
    }
    if (mass <= mu + kTieTol) {
      m = pos + 1;
      tie_at_m = std::abs(mass - mu) <= kTieTol;
      in_top_at_m = in_top;
      mass_at_m = mass;
    } else {
      break;
    }
  }
  if (!tie_at_m && m < tree.size())
    partial = ordering.order[static_cast<std::size_t>(m)];

  FluidEquilibrium eq;
  eq.m = m;
  eq.partial = partial;
  eq.q.assign(n, 0.0);
  eq.nu.assign(n, 0.0);
  eq.label.assign(n, StateLabel::UnReduced);

  std::vector<char> under_partial(n, 0);
  double nu_partial = 0.0;
  if (partial != kNoState) {
    for (StateId i : subtree(tree, partial)) under_partial[static_cast<std::size_t>(i)] = 1;
    double kappa = 1.0;
    for (StateId i = 0; i < tree.size(); ++i) {
      if (in_top_at_m[static_cast<std::size_t>(i)] && under_partial[static_cast<std::size_t>(i)])
        kappa -= pi[static_cast<std::size_t>(i)] / pi[static_cast<std::size_t>(partial)];
    }
    eq.kappa = kappa;
    nu_partial = (mu - mass_at_m) / kappa;
  } else {
    eq.kappa = std::numeric_limits<double>::infinity();
  }

  // An ancestor in the top set makes a state empty.
  std::vector<char> under_top(n, 0);
  for (StateId i = 0; i < tree.size(); ++i) {
    if (!in_top_at_m[static_cast<std::size_t>(i)]) continue;
    for (StateId k : subtree(tree, i)) under_top[static_cast<std::size_t>(k)] = 1;
  }

  for (StateId i = 0; i < tree.size(); ++i) {
    const auto ii = static_cast<std::size_t>(i);
    const double arriving = lambda * pi[ii];
    const double reduced =
        under_partial[ii] ? nu_partial * pi[ii] / pi[static_cast<std::size_t>(partial)] : 0.0;
    if (i == partial) {
      eq.label[ii] = StateLabel::PartiallyServed;
      eq.q[ii] = arriving;
      eq.nu[ii] = nu_partial;
    } else if (in_top_at_m[ii]) {
      eq.label[ii] = under_partial[ii] ? StateLabel::PartiallyBlocked : StateLabel::FullyBlocked;
      eq.q[ii] = arriving - reduced;
      eq.nu[ii] = eq.q[ii];
    } else if (under_top[ii]) {
      eq.label[ii] = StateLabel::Empty;
      eq.q[ii] = 0.0;
      eq.nu[ii] = 0.0;
    } else if (under_partial[ii]) {
      eq.label[ii] = StateLabel::PartiallyReduced;
      eq.q[ii] = arriving - reduced;
      eq.nu[ii] = 0.0;
    } else {
      eq.label[ii] = StateLabel::UnReduced;
      eq.q[ii] = arriving;
      eq.nu[ii] = 0.0;
    }
  }
  return eq;
}

double fluid_cost(const MarkovTree& tree, const FluidEquilibrium& eq) {
  if (eq.q.size() != static_cast<std::size_t>(tree.size()))
    throw std::invalid_argument("equilibrium size mismatch");
  double cost = 0.0;
  for (StateId i = 0; i < tree.size(); ++i) {
    const auto ii = static_cast<std::size_t>(i);
    cost += tree.cost(i) * (eq.q[ii] - eq.nu[ii]);
  }
  return cost;
}

CheckReport check_feasibility(const MarkovTree& tree, double lambda, double mu,
                              const FluidEquilibrium& eq) {
  CheckReport report;
  auto fail = [&report](std::string msg) { report.violations.push_back(std::move(msg)); };
  const auto n = static_cast<std::size_t>(tree.size());
  if (eq.q.size() != n || eq.nu.size() != n) {
    fail("equilibrium size mismatch");
    return report;
  }
  if (std::abs(eq.q[static_cast<std::size_t>(tree.root())] - lambda) > kCheckTol)
    fail("q(root) != lambda");
  for (StateId i = 0; i < tree.size(); ++i) {
    const auto ii = static_cast<std::size_t>(i);
    if (i != tree.root()) {
      const auto pa = static_cast<std::size_t>(tree.parent(i));
      const double expect = (eq.q[pa] - eq.nu[pa]) * tree.p(i);
      if (std::abs(eq.q[ii] - expect) > kCheckTol)
        fail("flow balance violated at state " + std::to_string(i));
    }
    if (eq.nu[ii] < -kCheckTol) fail("negative service at state " + std::to_string(i));
    if (eq.nu[ii] > eq.q[ii] + kCheckTol)
      fail("service exceeds queue at state " + std::to_string(i));
  }
  double total = 0.0;
  for (double v : eq.nu) total += v;
  if (total > mu + kCheckTol) fail("total service exceeds capacity");
  if (eq.partial != kNoState && std::abs(total - mu) > kCheckTol)
    fail("capacity slack with partial state");

  // Labels must partition the states per the construction rules.
  const auto pi = pass_prob(tree);
  for (StateId i = 0; i < tree.size(); ++i) {
    const auto ii = static_cast<std::size_t>(i);
    const double arriving = lambda * pi[ii];
    switch (eq.label[ii]) {
      case StateLabel::UnReduced:
        if (std::abs(eq.q[ii] - arriving) > kCheckTol || eq.nu[ii] > kCheckTol)
          fail("unreduced state served or reduced: " + std::to_string(i));
        break;
      case StateLabel::FullyBlocked:
        if (std::abs(eq.q[ii] - arriving) > kCheckTol ||
            std::abs(eq.nu[ii] - eq.q[ii]) > kCheckTol)
          fail("fully-blocked state not fully served: " + std::to_string(i));
        break;
      case StateLabel::Empty:
        if (std::abs(eq.q[ii]) > kCheckTol || std::abs(eq.nu[ii]) > kCheckTol)
          fail("empty state has mass: " + std::to_string(i));
        break;
      case StateLabel::PartiallyServed:
        if (i != eq.partial) fail("partially-served label off the partial state");
        if (eq.nu[ii] > eq.q[ii] + kCheckTol)
          fail("partial state overserved: " + std::to_string(i));
        break;
      case StateLabel::PartiallyBlocked:
        if (std::abs(eq.nu[ii] - eq.q[ii]) > kCheckTol)
          fail("partially-blocked state not fully served: " + std::to_string(i));
        break;
      case StateLabel::PartiallyReduced:
        if (eq.nu[ii] > kCheckTol)
          fail("partially-reduced state served: " + std::to_string(i));
        break;
    }
  }
  if (eq.partial != kNoState) {
    if (!(eq.kappa > 0.0) || eq.kappa > 1.0 + kCheckTol)
      fail("degeneracy parameter outside (0,1]");
  }
  return report;
}

CheckReport check_optimality(const MarkovTree& tree, double lambda, double mu,
                             const std::vector<double>& nu, double gamma_star,
                             const ValueTable& values) {
  check_rates(lambda, mu);
  const auto n = static_cast<std::size_t>(tree.size());
  if (nu.size() != n) throw std::invalid_argument("nu size mismatch");
  const auto pi = pass_prob(tree);
  const auto q = implied_queue(tree, lambda, pi, nu);
  double total = 0.0;
  for (StateId i = 0; i < tree.size(); ++i) {
    const auto ii = static_cast<std::size_t>(i);
    if (nu[ii] < -kCheckTol || nu[ii] > q[ii] + kCheckTol)
      throw std::invalid_argument("nu infeasible at state " + std::to_string(i));
    total += nu[ii];
  }
  if (total > mu + kCheckTol) throw std::invalid_argument("nu exceeds capacity");

  CheckReport report;
  auto fail = [&report](std::string msg) { report.violations.push_back(std::move(msg)); };
  if (gamma_star > kCheckTol && std::abs(total - mu) > kCheckTol)
    fail("C-1: capacity not fully used at positive price");
  for (StateId i = 0; i < tree.size(); ++i) {
    const auto ii = static_cast<std::size_t>(i);
    const double index = values.index[ii];
    if (index > gamma_star + kCheckTol && std::abs(q[ii] - nu[ii]) > kCheckTol)
      fail("C-2: above-price state " + std::to_string(i) + " not fully served");
    if (index < gamma_star - kCheckTol && nu[ii] > kCheckTol)
      fail("C-3: below-price state " + std::to_string(i) + " served");
  }
  return report;
}

CStarResult c_star(const MarkovTree& tree, double lambda, double mu) {
  check_rates(lambda, mu);
  CStarResult res;
  auto gamma = optimal_gamma(tree, lambda, mu);
  res.gamma_star = gamma.gamma_star;
  res.ordering.order = index_order(gamma.table.index);
  res.eq = water_fill(tree, lambda, mu, res.ordering);
  res.value = fluid_cost(tree, res.eq);
  const auto check =
      check_optimality(tree, lambda, mu, res.eq.nu, res.gamma_star, gamma.table);
  if (!check.ok()) {
    std::string what = "c_star: optimality check failed:";
    for (const auto& v : check.violations) what += " [" + v + "]";
    throw std::logic_error(what);
  }
  return res;
}

}  // namespace oarc

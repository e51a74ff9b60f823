#include "oarc/ski_rental.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace oarc {

namespace {

constexpr double kGammaTol = 1e-12;
constexpr double kDerivTol = 1e-9;

std::vector<StateId> by_level_desc(const MarkovTree& tree) {
  std::vector<StateId> order(static_cast<std::size_t>(tree.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](StateId a, StateId b) {
    return tree.level(a) > tree.level(b);
  });
  return order;
}

void check_rates(double lambda, double mu) {
  if (!(lambda > 0.0) || lambda >= 1.0)
    throw std::invalid_argument("lambda must be in (0,1)");
  if (mu < 0.0 || mu > 1.0) throw std::invalid_argument("mu must be in [0,1]");
}

// One-sided derivatives of V(., root) w.r.t. gamma. The buy branch has slope
// 1, the rent branch slope sum p(k) dV(k). At a kink the rent branch is
// selected just above gamma and the buy branch just below, so ties toward
// rent give the right derivative and ties toward buy the left derivative.
struct RootDerivatives {
  double left, right;
};

RootDerivatives value_derivatives(const MarkovTree& tree, double gamma,
                                  const std::vector<StateId>& order) {
  const auto n = static_cast<std::size_t>(tree.size());
  std::vector<double> value(n), dleft(n), dright(n);
  for (StateId i : order) {
    double future = 0.0, fleft = 0.0, fright = 0.0;
    for (StateId k : tree.children(i)) {
      future += tree.p(k) * value[static_cast<std::size_t>(k)];
      fleft += tree.p(k) * dleft[static_cast<std::size_t>(k)];
      fright += tree.p(k) * dright[static_cast<std::size_t>(k)];
    }
    const double rent = tree.cost(i) + future;
    const auto idx = static_cast<std::size_t>(i);
    if (gamma < rent) {
      value[idx] = gamma;
      dleft[idx] = 1.0;
      dright[idx] = 1.0;
    } else if (gamma > rent) {
      value[idx] = rent;
      dleft[idx] = fleft;
      dright[idx] = fright;
    } else {
      value[idx] = gamma;
      dleft[idx] = 1.0;      // buy branch active from below
      dright[idx] = fright;  // rent branch active from above
    }
  }
  const auto r = static_cast<std::size_t>(tree.root());
  return {dleft[r], dright[r]};
}

}  // namespace

ValueTable value_functions(const MarkovTree& tree, double gamma) {
  if (gamma < 0.0) throw std::invalid_argument("gamma must be >= 0");
  const auto n = static_cast<std::size_t>(tree.size());
  ValueTable t;
  t.gamma = gamma;
  t.value.resize(n);
  t.future.resize(n);
  t.beta.resize(n);
  t.index.resize(n);
  for (StateId i : by_level_desc(tree)) {
    double future = 0.0;
    for (StateId k : tree.children(i))
      future += tree.p(k) * t.value[static_cast<std::size_t>(k)];
    const auto idx = static_cast<std::size_t>(i);
    t.future[idx] = future;
    t.index[idx] = tree.cost(i) + future;
    t.value[idx] = std::min(gamma, t.index[idx]);
    t.beta[idx] = std::max(0.0, t.index[idx] - gamma);
  }
  return t;
}

double dual_value(const MarkovTree& tree, double lambda, double mu, double gamma) {
  check_rates(lambda, mu);
  if (!(mu > 0.0)) throw std::invalid_argument("mu must be > 0 for the dual");
  const auto vt = value_functions(tree, gamma);
  const auto cf = future_cost(tree);
  const auto r = static_cast<std::size_t>(tree.root());
  return mu * gamma + lambda * (cf[r] - vt.value[r]);
}

GammaResult optimal_gamma(const MarkovTree& tree, double lambda, double mu) {
  check_rates(lambda, mu);
  const auto order = by_level_desc(tree);
  const auto cf = future_cost(tree);
  const double gamma_max = *std::max_element(cf.begin(), cf.end());

  // g'(gamma) one-sided; right derivative is nondecreasing in gamma.
  auto g_right = [&](double gamma) {
    return mu - lambda * value_derivatives(tree, gamma, order).right;
  };

  // Leftmost gamma with g'+(gamma) >= 0 is the left end of the minimizing
  // segment; leftmost gamma with g'+(gamma) > 0 is its right end.
  auto bisect = [&](auto pred) {
    if (pred(0.0)) return 0.0;
    double lo = 0.0, hi = gamma_max;
    if (!pred(hi)) return hi;  // g increasing beyond gamma_max regardless
    while (hi - lo > kGammaTol) {
      const double mid = 0.5 * (lo + hi);
      (pred(mid) ? hi : lo) = mid;
    }
    return hi;
  };

  GammaResult res;
  res.segment_lo = bisect([&](double g) { return g_right(g) >= -kDerivTol; });
  res.segment_hi = bisect([&](double g) { return g_right(g) > kDerivTol; });
  res.gamma_star = res.segment_lo;
  res.table = value_functions(tree, res.gamma_star);
  res.objective =
      mu * res.gamma_star - lambda * res.table.value[static_cast<std::size_t>(tree.root())];
  // gamma_star sits within kGammaTol of the true kink, so probe the slope of
  // the segment just left of it rather than relying on an exact tie.
  res.right_derivative = g_right(res.gamma_star);
  res.left_derivative = res.gamma_star > 0.0
                            ? g_right(std::max(0.0, res.gamma_star - 2.0 * kGammaTol))
                            : res.right_derivative;
  return res;
}

std::vector<StateId> index_order(const std::vector<double>& index) {
  std::vector<StateId> order(index.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](StateId a, StateId b) {
    const double ia = index[static_cast<std::size_t>(a)];
    const double ib = index[static_cast<std::size_t>(b)];
    if (ia != ib) return ia > ib;
    return a < b;
  });
  return order;
}

IndexTable oarc_indices(const MarkovTree& tree, double gamma_star) {
  auto vt = value_functions(tree, gamma_star);
  IndexTable t;
  t.order = index_order(vt.index);
  t.index = std::move(vt.index);
  return t;
}

}  // namespace oarc

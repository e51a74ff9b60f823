#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "oarc/fluid.hpp"
#include "oarc/markov_tree.hpp"
#include "oarc/rng.hpp"
#include "oarc/schedulers.hpp"

namespace oarc::testing {

// Exhaustive oracle for the buy-or-wait recursion: per-state minimum expected
// cost over every stationary buy/rent assignment (2^|S| of them). Each
// assignment is evaluated by plain expectation bottom-up, no min involved, so
// this shares nothing with the production recursion.
inline std::vector<double> enum_value_oracle(const MarkovTree& tree, double gamma) {
  const int n = tree.size();
  if (n > 20) throw std::invalid_argument("enum oracle: tree too large");
  std::vector<StateId> deep_first(static_cast<std::size_t>(n));
  std::iota(deep_first.begin(), deep_first.end(), 0);
  std::stable_sort(deep_first.begin(), deep_first.end(),
                   [&](StateId a, StateId b) { return tree.level(a) > tree.level(b); });

  std::vector<double> best(static_cast<std::size_t>(n),
                           std::numeric_limits<double>::infinity());
  std::vector<double> f(static_cast<std::size_t>(n), 0.0);
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    for (StateId i : deep_first) {
      const auto ii = static_cast<std::size_t>(i);
      if (mask & (1u << i)) {
        f[ii] = gamma;
      } else {
        double v = tree.cost(i);
        for (StateId k : tree.children(i)) v += tree.p(k) * f[static_cast<std::size_t>(k)];
        f[ii] = v;
      }
      best[ii] = std::min(best[ii], f[ii]);
    }
  }
  return best;
}

// 1-D grid search for the capacity price; resolution per the derived example.
inline double grid_gamma_oracle(const MarkovTree& tree, double lambda, double mu,
                                double resolution = 1e-4) {
  const auto cf = future_cost(tree);
  const double hi = *std::max_element(cf.begin(), cf.end());
  double best_gamma = 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (double g = 0.0; g <= hi + resolution; g += resolution) {
    const auto vt = value_functions(tree, g);
    const double obj = mu * g - lambda * vt.value[static_cast<std::size_t>(tree.root())];
    if (obj < best - 1e-15) {
      best = obj;
      best_gamma = g;
    }
  }
  return best_gamma;
}

// Monte Carlo estimates of pi and c^f from single-job chain rollouts.
struct ChainEstimates {
  std::vector<double> pi, pi_se;
  std::vector<double> cf, cf_se;
  std::vector<long> visits;
};

inline ChainEstimates mc_chain(const MarkovTree& tree, long trials, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(tree.size());
  ChainEstimates est;
  est.visits.assign(n, 0);
  std::vector<double> sum(n, 0.0), sumsq(n, 0.0);
  std::vector<StateId> path;
  for (long trial = 0; trial < trials; ++trial) {
    auto rng = RngStream::keyed(seed, static_cast<std::uint64_t>(trial));
    path.clear();
    StateId at = tree.root();
    for (;;) {
      path.push_back(at);
      const auto kids = tree.children(at);
      double u = rng.next_double();
      StateId next = kNoState;
      for (StateId k : kids) {
        if (u < tree.p(k)) {
          next = k;
          break;
        }
        u -= tree.p(k);
      }
      if (next == kNoState) break;
      at = next;
    }
    double remaining = 0.0;
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
      remaining += tree.cost(*it);
      const auto ii = static_cast<std::size_t>(*it);
      ++est.visits[ii];
      sum[ii] += remaining;
      sumsq[ii] += remaining * remaining;
    }
  }
  est.pi.resize(n);
  est.pi_se.resize(n);
  est.cf.resize(n);
  est.cf_se.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double phat = static_cast<double>(est.visits[i]) / static_cast<double>(trials);
    est.pi[i] = phat;
    est.pi_se[i] = std::sqrt(phat * (1.0 - phat) / static_cast<double>(trials));
    if (est.visits[i] > 1) {
      const auto m = static_cast<double>(est.visits[i]);
      est.cf[i] = sum[i] / m;
      const double var = std::max(0.0, (sumsq[i] - m * est.cf[i] * est.cf[i]) / (m - 1.0));
      est.cf_se[i] = std::sqrt(var / m);
    } else {
      est.cf[i] = est.visits[i] == 1 ? sum[i] : 0.0;
      est.cf_se[i] = std::numeric_limits<double>::infinity();
    }
  }
  return est;
}

// Independent optimum of the fluid relaxation: minimum water-filled cost over
// every priority ordering. Factorial in |S|.
inline double lp_oracle(const MarkovTree& tree, double lambda, double mu) {
  if (tree.size() > 8) throw std::invalid_argument("lp oracle: tree too large");
  std::vector<StateId> perm(static_cast<std::size_t>(tree.size()));
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    const auto eq = water_fill(tree, lambda, mu, PriorityOrdering{perm});
    best = std::min(best, fluid_cost(tree, eq));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Full-sort selection oracle matching select()'s contract.
inline std::vector<std::int64_t> sorted_select(const Policy& policy,
                                               std::vector<QueuedJob> queue,
                                               std::int64_t capacity) {
  std::stable_sort(queue.begin(), queue.end(), [&](const QueuedJob& a, const QueuedJob& b) {
    const double sa = policy.kind == PolicyKind::Custom
                          ? policy.score(a)
                          : policy.index[static_cast<std::size_t>(a.state)];
    const double sb = policy.kind == PolicyKind::Custom
                          ? policy.score(b)
                          : policy.index[static_cast<std::size_t>(b.state)];
    if (sa != sb) return sa > sb;
    if (a.state != b.state) return a.state < b.state;
    return a.job < b.job;
  });
  const auto take = static_cast<std::size_t>(
      std::min<std::int64_t>(capacity, static_cast<std::int64_t>(queue.size())));
  std::vector<std::int64_t> out;
  for (std::size_t i = 0; i < take; ++i) out.push_back(queue[i].job);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace oarc::testing

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oarc/fluid.hpp"
#include "oarc/ski_rental.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "support/random_trees.hpp"

using namespace oarc;
using namespace oarc::testing;

TEST_CASE("value_functions on a leaf and at gamma = 0") {
  const auto leaf = single_state(3.0);
  const auto vt = value_functions(leaf, 1.0);
  CHECK(vt.value[0] == doctest::Approx(1.0));
  CHECK(vt.future[0] == 0.0);
  CHECK(vt.index[0] == doctest::Approx(3.0));
  CHECK(vt.beta[0] == doctest::Approx(2.0));

  const auto tree = six_state_tree({1, 2, 3, 4, 5, 6});
  const auto zero = value_functions(tree, 0.0);
  for (StateId i = 0; i < tree.size(); ++i) {
    const auto ii = static_cast<std::size_t>(i);
    CHECK(zero.value[ii] == 0.0);
    CHECK(zero.future[ii] == 0.0);
    CHECK(zero.beta[ii] == doctest::Approx(tree.cost(i)));
  }
  CHECK_THROWS_AS(value_functions(tree, -1.0), std::invalid_argument);
}

TEST_CASE("value_functions on the two-state chain at gamma = 3") {
  const auto chain = chain_ab();
  const auto vt = value_functions(chain, 3.0);
  CHECK(vt.value[1] == doctest::Approx(3.0));
  CHECK(vt.future[0] == doctest::Approx(1.5));
  CHECK(vt.value[0] == doctest::Approx(3.0));
  CHECK(vt.index[0] == doctest::Approx(3.5));
  CHECK(vt.beta[0] == doctest::Approx(0.5));
}

TEST_CASE("value table invariants hold exactly") {
  auto rng = RngStream::keyed(21, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto tree = random_tree(rng, {.min_states = 1, .max_states = 14});
    const auto cf = future_cost(tree);
    const double gamma = rng.uniform(0.0, 1.2 * *std::max_element(cf.begin(), cf.end()));
    const auto vt = value_functions(tree, gamma);
    for (StateId i = 0; i < tree.size(); ++i) {
      const auto ii = static_cast<std::size_t>(i);
      CHECK(vt.value[ii] == std::min(gamma, tree.cost(i) + vt.future[ii]));
      CHECK(vt.beta[ii] == std::max(0.0, tree.cost(i) + vt.future[ii] - gamma));
      CHECK(vt.index[ii] == tree.cost(i) + vt.future[ii]);
      CHECK(vt.value[ii] >= -1e-12);
      CHECK(vt.value[ii] <= std::min(gamma, cf[ii]) + 1e-9);
    }
  }
}

TEST_CASE("value_functions matches exhaustive buy/rent enumeration") {
  auto rng = RngStream::keyed(22, 0);
  for (int trial = 0; trial < 60; ++trial) {
    const auto tree = random_tree(rng, {.min_states = 1, .max_states = 12});
    const auto cf = future_cost(tree);
    const double gmax = *std::max_element(cf.begin(), cf.end());
    for (int k = 0; k < 3; ++k) {
      const double gamma = rng.uniform(0.0, 1.1 * gmax);
      const auto vt = value_functions(tree, gamma);
      const auto oracle = enum_value_oracle(tree, gamma);
      for (StateId i = 0; i < tree.size(); ++i)
        CHECK(vt.value[static_cast<std::size_t>(i)] ==
              doctest::Approx(oracle[static_cast<std::size_t>(i)]).epsilon(1e-10));
    }
  }
}

TEST_CASE("dual_value closed forms") {
  const auto chain = chain_ab();  // c^f(root) = 4
  CHECK(dual_value(chain, 0.5, 0.25, 0.0) == doctest::Approx(0.5 * 4.0));
  // Renting everywhere once gamma dominates every c^f.
  CHECK(dual_value(chain, 0.5, 0.25, 10.0) == doctest::Approx(0.25 * 10.0));
  CHECK(dual_value(chain, 0.5, 0.25, 3.0) == doctest::Approx(1.25));
  CHECK_THROWS_AS(dual_value(chain, 1.5, 0.25, 1.0), std::invalid_argument);
}

TEST_CASE("optimal_gamma: zero when service outpaces arrivals") {
  auto rng = RngStream::keyed(23, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto tree = random_tree(rng, {.min_states = 1, .max_states = 10});
    const double mu = rng.uniform(0.3, 1.0);
    const double lambda = rng.uniform(0.05, mu - 0.05);
    if (lambda <= 0.0 || lambda >= mu) continue;
    const auto res = optimal_gamma(tree, lambda, mu);
    CHECK(res.gamma_star == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("optimal_gamma: single state against the grid oracle") {
  const auto tree = single_state(5.0);
  const auto res = optimal_gamma(tree, 0.8, 0.2);
  CHECK(res.gamma_star == doctest::Approx(5.0).epsilon(1e-9));
  CHECK(res.objective == doctest::Approx(-3.0));
  CHECK(grid_gamma_oracle(tree, 0.8, 0.2) == doctest::Approx(5.0).epsilon(1e-3));
  // Certification: nonpositive slope entering, nonnegative leaving.
  CHECK(res.left_derivative <= 1e-9);
  CHECK(res.right_derivative >= -1e-9);
}

TEST_CASE("optimal_gamma matches the grid oracle on random instances") {
  auto rng = RngStream::keyed(24, 0);
  for (int trial = 0; trial < 25; ++trial) {
    const auto tree = random_tree(rng, {.min_states = 1, .max_states = 8});
    const auto [lambda, mu] = random_rates(rng);
    const auto res = optimal_gamma(tree, lambda, mu);
    const auto root = static_cast<std::size_t>(tree.root());
    // The bisected optimum can only beat (or tie) every grid point.
    const double grid_best = [&] {
      const double g = grid_gamma_oracle(tree, lambda, mu, 1e-3);
      const auto vt = value_functions(tree, g);
      return mu * g - lambda * vt.value[root];
    }();
    CHECK(res.objective <= grid_best + 1e-6);
    if (res.gamma_star > 0.0) CHECK(res.left_derivative <= 1e-6);
    CHECK(res.right_derivative >= -1e-6);
    CHECK(res.segment_lo <= res.segment_hi + 1e-12);
  }
}

TEST_CASE("optimal_gamma scales with the costs") {
  const auto base = six_state_tree({1, 2, 3, 4, 5, 6});
  const double s = 3.7;
  std::vector<double> scaled;
  for (double c : base.costs()) scaled.push_back(s * c);
  const auto big = six_state_tree(std::move(scaled));
  const auto a = optimal_gamma(base, 0.8, 0.4);
  const auto b = optimal_gamma(big, 0.8, 0.4);
  CHECK(b.gamma_star == doctest::Approx(s * a.gamma_star).epsilon(1e-8));
}

TEST_CASE("indices: gamma = 0 reduces to instantaneous cost") {
  const auto tree = six_state_tree({3, 1, 4, 1, 5, 9});
  const auto idx = oarc_indices(tree, 0.0);
  for (StateId i = 0; i < tree.size(); ++i)
    CHECK(idx.index[static_cast<std::size_t>(i)] == doctest::Approx(tree.cost(i)));
}

TEST_CASE("indices on a uniform chain: flat at c + gamma, then decreasing") {
  MarkovTree chain({kNoState, 0, 1, 2, 3, 4, 5}, {1, 1, 1, 1, 1, 1, 1},
                   {1, 1, 1, 1, 1, 1, 1});
  const double gamma = 2.5;
  const auto idx = oarc_indices(chain, gamma);
  const auto oracle = enum_value_oracle(chain, gamma);
  for (StateId i = 0; i < chain.size(); ++i) {
    const auto ii = static_cast<std::size_t>(i);
    const double future = i + 1 < chain.size() ? oracle[ii + 1] : 0.0;
    CHECK(idx.index[ii] == doctest::Approx(1.0 + future).epsilon(1e-10));
    if (i + 1 < chain.size()) {
      // Nonincreasing root to leaf; strictly once below the cap.
      CHECK(idx.index[ii] >= idx.index[ii + 1] - 1e-12);
      if (idx.index[ii] < 1.0 + gamma - 1e-12)
        CHECK(idx.index[ii] > idx.index[ii + 1] + 1e-12);
    }
  }
}

TEST_CASE("two-class instance: the price flips the post/video order") {
  const auto inst = two_class_instance();
  // Below price 2 the video head outranks the post head, above it flips.
  const auto cheap = oarc_indices(inst.tree, 1.0);
  CHECK(cheap.index[static_cast<std::size_t>(inst.video_head)] >
        cheap.index[static_cast<std::size_t>(inst.post_head)]);
  const auto pricey = oarc_indices(inst.tree, 3.0);
  CHECK(pricey.index[static_cast<std::size_t>(inst.post_head)] >
        pricey.index[static_cast<std::size_t>(inst.video_head)]);
  // index(post head) = 2 + gamma while the chain still rents; index(video
  // head) = 3 + gamma/2.
  CHECK(pricey.index[static_cast<std::size_t>(inst.post_head)] == doctest::Approx(5.0));
  CHECK(pricey.index[static_cast<std::size_t>(inst.video_head)] == doctest::Approx(4.5));
}

TEST_CASE("property: V is nondecreasing, concave and 1-Lipschitz in gamma") {
  auto rng = RngStream::keyed(25, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto tree = random_tree(rng, {.min_states = 1, .max_states = 10});
    const auto cf = future_cost(tree);
    const double hi = 1.2 * *std::max_element(cf.begin(), cf.end());
    const int grid = 24;
    std::vector<double> v(grid + 1);
    for (int k = 0; k <= grid; ++k) {
      const double gamma = hi * k / grid;
      v[static_cast<std::size_t>(k)] =
          value_functions(tree, gamma).value[static_cast<std::size_t>(tree.root())];
    }
    const double step = hi / grid;
    for (int k = 0; k < grid; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      CHECK(v[kk + 1] >= v[kk] - 1e-12);             // nondecreasing
      CHECK(v[kk + 1] - v[kk] <= step + 1e-9);       // 1-Lipschitz
      if (k > 0)                                     // concave increments
        CHECK(v[kk + 1] - v[kk] <= v[kk] - v[kk - 1] + 1e-9);
    }
  }
}

TEST_CASE("property: state duals reconstruct the value function") {
  auto rng = RngStream::keyed(26, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto tree = random_tree(rng, {.min_states = 1, .max_states = 12});
    const auto pi = pass_prob(tree);
    const auto cf = future_cost(tree);
    const double gamma = rng.uniform(0.0, 1.2 * *std::max_element(cf.begin(), cf.end()));
    const auto vt = value_functions(tree, gamma);
    for (StateId a = 0; a < tree.size(); ++a) {
      const auto aa = static_cast<std::size_t>(a);
      double sub_beta = 0.0;
      for (StateId i : subtree(tree, a))
        sub_beta += vt.beta[static_cast<std::size_t>(i)] *
                    pi[static_cast<std::size_t>(i)] / pi[aa];
      CHECK(vt.value[aa] == doctest::Approx(cf[aa] - sub_beta).epsilon(1e-9));
    }
  }
}

TEST_CASE("property: weak duality against water-filled service plans") {
  auto rng = RngStream::keyed(27, 0);
  for (int trial = 0; trial < 150; ++trial) {
    const auto tree = random_tree(rng, {.min_states = 1, .max_states = 10});
    const auto [lambda, mu] = random_rates(rng);
    const auto ordering = random_ordering(rng, tree.size());
    const auto eq = water_fill(tree, lambda, mu, PriorityOrdering{ordering});
    const auto cf = future_cost(tree);
    double prevented = 0.0;
    for (StateId a = 0; a < tree.size(); ++a)
      prevented += eq.nu[static_cast<std::size_t>(a)] * cf[static_cast<std::size_t>(a)];
    for (const double frac : {0.0, 0.1, 0.5, 1.0, 2.0}) {
      const double gamma = frac * *std::max_element(cf.begin(), cf.end());
      const auto vt = value_functions(tree, gamma);
      const double dual = mu * gamma +
                          lambda * (cf[static_cast<std::size_t>(tree.root())] -
                                    vt.value[static_cast<std::size_t>(tree.root())]);
      CHECK(prevented <= dual + 1e-9);
    }
  }
}

TEST_CASE("index_order breaks ties by ascending state id") {
  const std::vector<double> index{1.0, 2.0, 2.0, 0.5};
  const auto order = index_order(index);
  CHECK(order == std::vector<StateId>{1, 2, 0, 3});
}

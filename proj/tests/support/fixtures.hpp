#pragma once

#include <vector>

#include "oarc/markov_tree.hpp"

namespace oarc::testing {

// Six-state tree used throughout: root 0 branches to 1 and 3 (p = 1/2 each),
// 1 leads to 2 (p = 1/2), 3 leads to 4 and 5 (p = 1/2 each).
inline MarkovTree six_state_tree(std::vector<double> costs = {1, 1, 1, 1, 1, 1}) {
  return MarkovTree({kNoState, 0, 1, 0, 3, 3}, {1, 0.5, 0.5, 0.5, 0.5, 0.5},
                    std::move(costs));
}

// Two-state chain a -> b with p(b) = 1/2, costs 2 and 4.
inline MarkovTree chain_ab() {
  return MarkovTree({kNoState, 0}, {1, 0.5}, {2, 4});
}

// Deterministic five-state chain, cost 2 per period.
inline MarkovTree post_chain() {
  return MarkovTree({kNoState, 0, 1, 2, 3}, {1, 1, 1, 1, 1}, {2, 2, 2, 2, 2});
}

inline MarkovTree single_state(double cost = 1.0) {
  return MarkovTree({kNoState}, {1}, {cost});
}

// Two job classes with different uncertainty profiles, glued under one
// arrival state. Ids:
//   0   arrival hub (tiny cost), splits 1/2 : 1/2
//   1-5 "post" chain, cost 2 per period, deterministic
//   6   "video" first period, cost 3, splits 1/2 : 1/2
//   7-10  quiet video tail, zero cost
//   11-14 viral video tail, cost 6 per period
struct TwoClassInstance {
  MarkovTree tree;
  StateId post_head;
  StateId video_head;
};

inline TwoClassInstance two_class_instance() {
  std::vector<StateId> parent{kNoState, 0, 1, 2, 3, 4, 0, 6, 7, 8, 9, 6, 11, 12, 13};
  std::vector<double> p{1, 0.5, 1, 1, 1, 1, 0.5, 0.5, 1, 1, 1, 0.5, 1, 1, 1};
  std::vector<double> cost{1e-9, 2, 2, 2, 2, 2, 3, 0, 0, 0, 0, 6, 6, 6, 6};
  return {MarkovTree(std::move(parent), std::move(p), std::move(cost)), 1, 6};
}

}  // namespace oarc::testing

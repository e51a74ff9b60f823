#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "oarc/fluid.hpp"
#include "oarc/markov_tree.hpp"
#include "oarc/rng.hpp"
#include "oarc/ski_rental.hpp"

namespace oarc {

enum class PolicyKind : std::uint8_t {
  OaRC,                   // cost + future prevented cost at the optimal price
  InstantaneousCost,      // cost(i)
  ExpectedRemainingCost,  // c^f(i)
  Fifo,                   // oldest jobs first (deeper levels first)
  Random,                 // uniform subset each period
  Custom,                 // per-job score hook
};

struct QueuedJob {
  std::int64_t job = 0;  // arrival-ordered id
  StateId state = 0;
};

/// An index policy over states plus the consistent tie-break (higher index
/// first, then ascending state id, then arrival order). Custom policies score
/// jobs instead of states, with the same tie-break contract.
struct Policy {
  PolicyKind kind = PolicyKind::InstantaneousCost;
  std::vector<double> index;  // per-state; unused by Fifo/Random/Custom
  std::function<double(const QueuedJob&)> score;  // Custom only
};

/// Builds a state-indexed policy. OaRC needs the value table at gamma_star;
/// the other kinds derive their index from the tree alone.
Policy builtin(PolicyKind kind, const MarkovTree& tree,
               const ValueTable* values = nullptr);

/// Serves min(capacity, queue size) jobs: the top of the queue under the
/// policy's order. Random draws a uniform subset from the supplied stream.
/// Returns served job ids.
std::vector<std::int64_t> select(const Policy& policy,
                                 std::span<const QueuedJob> queue,
                                 std::int64_t capacity, RngStream& rng);

/// State priority ordering induced by a policy (for the fluid machinery and
/// the count-based simulator). Fifo orders by level descending.
PriorityOrdering policy_order(const Policy& policy, const MarkovTree& tree);

}  // namespace oarc

#include "oarc/schedulers.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace oarc {

Policy builtin(PolicyKind kind, const MarkovTree& tree, const ValueTable* values) {
  Policy p;
  p.kind = kind;
  switch (kind) {
    case PolicyKind::OaRC:
      if (values == nullptr)
        throw std::invalid_argument("OaRC policy needs a value table");
      p.index = values->index;
      break;
    case PolicyKind::InstantaneousCost:
      p.index.assign(tree.costs().begin(), tree.costs().end());
      break;
    case PolicyKind::ExpectedRemainingCost:
      p.index = future_cost(tree);
      break;
    case PolicyKind::Fifo:
      // Deeper levels are older jobs.
      p.index.resize(static_cast<std::size_t>(tree.size()));
      for (StateId i = 0; i < tree.size(); ++i)
        p.index[static_cast<std::size_t>(i)] = static_cast<double>(tree.level(i));
      break;
    case PolicyKind::Random:
      break;
    case PolicyKind::Custom:
      throw std::invalid_argument("Custom policies are built by the caller");
  }
  return p;
}

std::vector<std::int64_t> select(const Policy& policy,
                                 std::span<const QueuedJob> queue,
                                 std::int64_t capacity, RngStream& rng) {
  if (capacity < 0) throw std::invalid_argument("capacity must be >= 0");
  const auto take = static_cast<std::size_t>(
      std::min<std::int64_t>(capacity, static_cast<std::int64_t>(queue.size())));
  if (take == 0) return {};

  std::vector<std::size_t> pos(queue.size());
  std::iota(pos.begin(), pos.end(), 0);

  if (policy.kind == PolicyKind::Random) {
    // Partial Fisher-Yates for the first `take` positions.
    for (std::size_t i = 0; i < take; ++i) {
      const auto j = static_cast<std::size_t>(
          rng.uniform_int(static_cast<std::int64_t>(i),
                          static_cast<std::int64_t>(pos.size()) - 1));
      std::swap(pos[i], pos[j]);
    }
  } else {
    auto job_score = [&](std::size_t a) {
      const QueuedJob& j = queue[a];
      if (policy.kind == PolicyKind::Custom) return policy.score(j);
      return policy.index[static_cast<std::size_t>(j.state)];
    };
    auto before = [&](std::size_t a, std::size_t b) {
      const double sa = job_score(a), sb = job_score(b);
      if (sa != sb) return sa > sb;
      if (queue[a].state != queue[b].state) return queue[a].state < queue[b].state;
      return queue[a].job < queue[b].job;
    };
    std::nth_element(pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(take) - 1,
                     pos.end(), before);
  }

  std::vector<std::int64_t> served(take);
  for (std::size_t i = 0; i < take; ++i) served[i] = queue[pos[i]].job;
  std::sort(served.begin(), served.end());
  return served;
}

PriorityOrdering policy_order(const Policy& policy, const MarkovTree& tree) {
  if (policy.kind == PolicyKind::Random || policy.kind == PolicyKind::Custom)
    throw std::invalid_argument("policy has no fixed state ordering");
  if (policy.index.size() != static_cast<std::size_t>(tree.size()))
    throw std::invalid_argument("policy index size mismatch");
  return PriorityOrdering{index_order(policy.index)};
}

}  // namespace oarc

#include "oarc/simulator.hpp"

#include <cmath>
#include <stdexcept>

#include "oarc/parallel.hpp"

namespace oarc {

namespace {

enum Event : std::uint64_t {
  EvCapacity = 1,
  EvService = 2,
  EvTransition = 3,
  EvArrival = 4,
};

void check_config(const SimConfig& c) {
  if (c.n <= 0) throw std::invalid_argument("sim: n must be positive");
  if (c.lambda < 0.0 || c.lambda >= 1.0)
    throw std::invalid_argument("sim: lambda must be in [0,1)");
  if (c.mu < 0.0 || c.mu > 1.0) throw std::invalid_argument("sim: mu must be in [0,1]");
  if (c.horizon <= 0) throw std::invalid_argument("sim: horizon must be positive");
  if (c.replications <= 0) throw std::invalid_argument("sim: replications must be positive");
  const int warmup = c.warmup < 0 ? c.horizon / 5 : c.warmup;
  if (warmup >= c.horizon) throw std::invalid_argument("sim: warmup must be < horizon");
}

struct RepResult {
  std::vector<PeriodRow> periods;
  std::vector<TraceRow> trace;
  double avg_cost = 0.0;
  std::vector<double> sum_queue, sum_served, sum_remaining;
};

RepResult run_replication(const MarkovTree& tree, const SimConfig& config,
                          const Policy& policy, const PriorityOrdering* order,
                          int rep) {
  const auto n_states = static_cast<std::size_t>(tree.size());
  const int warmup = config.warmup < 0 ? config.horizon / 5 : config.warmup;

  RepResult out;
  out.periods.reserve(static_cast<std::size_t>(config.horizon));
  out.sum_queue.assign(n_states, 0.0);
  out.sum_served.assign(n_states, 0.0);
  out.sum_remaining.assign(n_states, 0.0);

  std::vector<std::int64_t> queue(n_states, 0), next(n_states, 0), served(n_states, 0);
  std::vector<std::int64_t> split;
  std::vector<double> child_p;
  double cost_sum = 0.0;
  int cost_periods = 0;

  const auto urep = static_cast<std::uint64_t>(rep);
  for (int t = 1; t <= config.horizon; ++t) {
    const auto ut = static_cast<std::uint64_t>(t);
    auto capacity_rng = RngStream::keyed(config.seed, urep, ut, EvCapacity);
    const std::int64_t capacity = capacity_rng.binomial(config.n, config.mu);

    std::int64_t queue_len = 0;
    for (std::int64_t q : queue) queue_len += q;

    // Service per the fixed priority ordering, or a uniform subset for the
    // Random policy.
    std::fill(served.begin(), served.end(), 0);
    std::int64_t remaining_capacity = std::min(capacity, queue_len);
    std::int64_t total_served = 0;
    if (policy.kind == PolicyKind::Random) {
      auto rng = RngStream::keyed(config.seed, urep, ut, EvService);
      std::int64_t population = queue_len;
      std::int64_t draws = remaining_capacity;
      for (std::size_t i = 0; i < n_states && draws > 0; ++i) {
        const std::int64_t x = rng.hypergeometric(population, queue[i], draws);
        served[i] = x;
        draws -= x;
        population -= queue[i];
        total_served += x;
      }
    } else {
      for (StateId s : order->order) {
        if (remaining_capacity == 0) break;
        const auto si = static_cast<std::size_t>(s);
        const std::int64_t x = std::min(queue[si], remaining_capacity);
        served[si] = x;
        remaining_capacity -= x;
        total_served += x;
      }
    }

    // Holding cost of jobs that remain after service, then their transition.
    double cost = 0.0;
    std::fill(next.begin(), next.end(), 0);
    for (StateId i = 0; i < tree.size(); ++i) {
      const auto ii = static_cast<std::size_t>(i);
      const std::int64_t remaining = queue[ii] - served[ii];
      cost += tree.cost(i) * static_cast<double>(remaining);
      if (remaining == 0) continue;
      const auto children = tree.children(i);
      if (children.empty()) continue;  // all abandon
      child_p.resize(children.size());
      split.resize(children.size());
      for (std::size_t k = 0; k < children.size(); ++k) child_p[k] = tree.p(children[k]);
      auto rng = RngStream::keyed(config.seed, urep, ut, EvTransition,
                                  static_cast<std::uint64_t>(i));
      rng.multinomial(remaining, child_p, split);
      for (std::size_t k = 0; k < children.size(); ++k)
        next[static_cast<std::size_t>(children[k])] += split[k];
    }

    auto arrival_rng = RngStream::keyed(config.seed, urep, ut, EvArrival);
    const std::int64_t arrivals = arrival_rng.binomial(config.n, config.lambda);
    next[static_cast<std::size_t>(tree.root())] += arrivals;

    out.periods.push_back({rep, t, cost, total_served, queue_len, arrivals});
    if (config.record_trace) {
      for (StateId i = 0; i < tree.size(); ++i) {
        const auto ii = static_cast<std::size_t>(i);
        out.trace.push_back({rep, t, i, queue[ii], served[ii]});
      }
    }
    if (t > warmup) {
      cost_sum += cost;
      ++cost_periods;
      for (std::size_t i = 0; i < n_states; ++i) {
        out.sum_queue[i] += static_cast<double>(queue[i]);
        out.sum_served[i] += static_cast<double>(served[i]);
        out.sum_remaining[i] += static_cast<double>(queue[i] - served[i]);
      }
    }
    queue.swap(next);
  }
  out.avg_cost = cost_sum / static_cast<double>(cost_periods);
  for (std::size_t i = 0; i < n_states; ++i) {
    out.sum_queue[i] /= static_cast<double>(cost_periods);
    out.sum_served[i] /= static_cast<double>(cost_periods);
    out.sum_remaining[i] /= static_cast<double>(cost_periods);
  }
  return out;
}

}  // namespace

SimMetrics run(const MarkovTree& tree, const SimConfig& config, const Policy& policy) {
  check_config(config);
  if (policy.kind == PolicyKind::Custom)
    throw std::invalid_argument("sim: custom per-job policies are not state-indexed");
  PriorityOrdering order;
  if (policy.kind != PolicyKind::Random) order = policy_order(policy, tree);

  const auto reps = static_cast<std::size_t>(config.replications);
  std::vector<RepResult> results(reps);
  parallel_for(reps, config.threads, [&](std::size_t r) {
    results[r] = run_replication(tree, config, policy,
                                 policy.kind == PolicyKind::Random ? nullptr : &order,
                                 static_cast<int>(r));
  });

  const auto n_states = static_cast<std::size_t>(tree.size());
  SimMetrics m;
  m.theta = tree.theta();
  m.mean_queue.assign(n_states, 0.0);
  m.mean_served.assign(n_states, 0.0);
  m.mean_remaining.assign(n_states, 0.0);
  m.rep_avg_cost.reserve(reps);
  for (auto& r : results) {
    m.periods.insert(m.periods.end(), r.periods.begin(), r.periods.end());
    m.trace.insert(m.trace.end(), r.trace.begin(), r.trace.end());
    m.rep_avg_cost.push_back(r.avg_cost);
    for (std::size_t i = 0; i < n_states; ++i) {
      m.mean_queue[i] += r.sum_queue[i] / static_cast<double>(reps);
      m.mean_served[i] += r.sum_served[i] / static_cast<double>(reps);
      m.mean_remaining[i] += r.sum_remaining[i] / static_cast<double>(reps);
    }
  }
  double sum = 0.0;
  for (double v : m.rep_avg_cost) sum += v;
  m.avg_cost = sum / static_cast<double>(reps);
  if (reps > 1) {
    double ss = 0.0;
    for (double v : m.rep_avg_cost) ss += (v - m.avg_cost) * (v - m.avg_cost);
    m.avg_cost_se = std::sqrt(ss / static_cast<double>(reps - 1) / static_cast<double>(reps));
  }
  return m;
}

RegretEstimate regret(const SimMetrics& metrics, int n, double c_star) {
  RegretEstimate r;
  r.value = metrics.avg_cost - static_cast<double>(n) * c_star;
  r.se = metrics.avg_cost_se;
  r.ci_lo = r.value - 1.96 * r.se;
  r.ci_hi = r.value + 1.96 * r.se;
  return r;
}

std::vector<SteadyStateRow> steady_state_report(const SimMetrics& metrics) {
  std::vector<SteadyStateRow> rows;
  rows.reserve(metrics.mean_queue.size());
  for (std::size_t i = 0; i < metrics.mean_queue.size(); ++i) {
    rows.push_back({static_cast<StateId>(i), metrics.mean_queue[i],
                    metrics.mean_served[i], metrics.mean_remaining[i]});
  }
  return rows;
}

}  // namespace oarc

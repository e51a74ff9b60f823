#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "oarc/markov_tree.hpp"
#include "oarc/schedulers.hpp"

namespace oarc {

struct SimConfig {
  int n = 100;             // system size
  double lambda = 0.5;     // arrival rate, Bin(n, lambda) per period
  double mu = 0.5;         // service rate, Bin(n, mu) servers per period
  int horizon = 1000;      // periods per replication
  int warmup = -1;         // periods excluded from averages; -1 = horizon/5
  std::uint64_t seed = 1;
  int replications = 1;
  int threads = 0;         // replication workers; 0 = logical cores
  bool record_trace = false;
};

struct PeriodRow {
  int replication = 0;
  int period = 0;
  double total_cost = 0.0;
  std::int64_t served = 0;
  std::int64_t queue_len = 0;  // jobs waiting at the start of the period
  std::int64_t arrivals = 0;
};

struct TraceRow {
  int replication = 0;
  int period = 0;
  StateId state = 0;
  std::int64_t queue = 0;
  std::int64_t served = 0;
};

struct SteadyStateRow {
  StateId state = 0;
  double mean_queue = 0.0;
  double mean_served = 0.0;
  double mean_remaining = 0.0;
};

struct SimMetrics {
  std::vector<PeriodRow> periods;  // all replications, ordered
  std::vector<TraceRow> trace;     // only when record_trace

  double avg_cost = 0.0;     // mean per-period cost over post-warmup periods
  double avg_cost_se = 0.0;  // standard error across replications
  std::vector<double> rep_avg_cost;

  std::vector<double> mean_queue;      // per state, post-warmup
  std::vector<double> mean_served;
  std::vector<double> mean_remaining;

  double theta = 0.0;  // tree's minimum abandonment probability; 0 flags
                       // that the unique-stationary-distribution premise fails
};

/// Discrete-time engine. Each period: draw capacity Bin(n, mu), serve by
/// the policy, charge cost of remaining jobs, transition the remainder down
/// the tree (or out), then admit Bin(n, lambda) arrivals at the root.
/// State is tracked as per-state counts; transitions are multinomial splits.
/// Randomness comes from streams keyed (seed, replication, period, event), so
/// runs with equal seeds share arrival/capacity draws across policies.
SimMetrics run(const MarkovTree& tree, const SimConfig& config, const Policy& policy);

struct RegretEstimate {
  double value = 0.0;
  double se = 0.0;
  double ci_lo = 0.0;  // 95% normal interval across replications
  double ci_hi = 0.0;
};

/// avg_cost - n * c_star with replication uncertainty.
RegretEstimate regret(const SimMetrics& metrics, int n, double c_star);

std::vector<SteadyStateRow> steady_state_report(const SimMetrics& metrics);

}  // namespace oarc

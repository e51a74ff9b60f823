#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "oarc/regressor.hpp"

namespace oarc {

/// One piece of content: the violation predictor, the ground-truth label and
/// the full per-period view trajectory (length = dataset horizon).
struct TrajectoryRecord {
  std::int64_t id = 0;
  double pviolating = 0.0;
  std::uint8_t violating = 0;
  std::vector<double> views;
};

struct TrajectoryDataset {
  int horizon = 0;  // trajectory length L
  std::vector<TrajectoryRecord> records;
};

/// Scheduler-visible state of queued content at age d (1-based): the
/// violation predictor, the age, total views before this period and the
/// per-period views of the last three periods (zero-padded for young
/// content).
struct ContentState {
  double pviolating = 0.0;
  int age = 0;
  double cum_views = 0.0;
  double lag1 = 0.0, lag2 = 0.0, lag3 = 0.0;

  FeatureVec features() const {
    return {pviolating, static_cast<double>(age), cum_views, lag1, lag2, lag3};
  }
};

ContentState content_state(const TrajectoryRecord& record, int age);

// --- synthetic datasets ---------------------------------------------------

struct AdsConfig {
  int campaigns = 5000;
  int ads_per_campaign = 5;
  int horizon = 100;
  double budget_pareto_shape = 0.8;
  double budget_pareto_scale = 1.0;  // the shape is prescribed, the scale is ours
};

/// Ad campaigns promoted by a UCB1 bandit: per campaign, one shared
/// violation probability Beta(1,3) and a per-period budget Pareto(0.8); each
/// ad has a Bernoulli(Beta(1,5)) reward, the promoted ad's views are
/// Poisson(budget) and all others get zero views that period.
TrajectoryDataset gen_ads(const AdsConfig& config, std::uint64_t seed);

struct UgcConfig {
  int count = 20000;
  int horizon = 200;
  double alpha_lo = 0.8, alpha_hi = 2.0;
  // Excitation bursts Y are Pareto-tailed with index tail_numerator / alpha
  // (Lomax: support starts at 0). Slow-decaying content gets lighter bursts
  // more often; fast-decaying content gets rare huge ones.
  double excitation_tail_numerator = 4.0;
  double mean_cap = 5000.0;
  bool excitation = true;  // test hook: false forces the burst factors to 0
};

/// Self-exciting view trajectories: one view in period one; afterwards the
/// period-d view count is Poisson with mean
///   min(cap, sum_{d'<d} (1 + Y_{d',d}) view(d') e^{-alpha (d-d')}),
/// Y heavy-tailed with index 4/alpha. pviolating ~ Beta(alpha + 4/alpha, 6).
TrajectoryDataset gen_ugc(const UgcConfig& config, std::uint64_t seed);

// --- dataset io and preparation -------------------------------------------

/// CSV with header content_id,pviolating,violating,v1..vL. Rows shorter than
/// L are zero-filled when allowed, rejected otherwise.
TrajectoryDataset load_dataset(const std::filesystem::path& path, bool zero_fill = false);
void save_dataset(const TrajectoryDataset& dataset, const std::filesystem::path& path,
                  const std::string& manifest_comment = {});

/// Seeded 50/50 random partition; the halves are disjoint.
std::pair<TrajectoryDataset, TrajectoryDataset> split_dataset(
    const TrajectoryDataset& dataset, std::uint64_t seed);

/// Nearest-rank percentile of per-content total views, p in (0,100].
double gamma_percentile(const TrajectoryDataset& dataset, double percent);

/// Uniform [-epsilon, epsilon] calibration noise on pviolating, clipped to
/// [0,1]. Violation labels are untouched.
TrajectoryDataset perturb_pviolating(const TrajectoryDataset& dataset, double epsilon,
                                     std::uint64_t seed);

/// Builds the regression samples (state at age tau -> min(cap, views after
/// tau)) over all records and 1 <= tau <= L, then fits the capped model.
CappedViewRegressor train_regressor(const TrajectoryDataset& train, double cap,
                                    RegressorBackend backend = RegressorBackend::Forest,
                                    const ForestConfig& config = {});

/// Trains the capped model at the percentile cap and the uncapped companion.
ModelBundle train_models(const TrajectoryDataset& train, double gamma_percent = 99.0,
                         const ForestConfig& config = {});

// --- scheduling indices and simulation ------------------------------------

enum class ContentPolicy : std::uint8_t { PViolating, Velocity, PIv, OarcH };

const char* to_string(ContentPolicy policy);
std::optional<ContentPolicy> content_policy_from_string(const std::string& name);

/// Per-period index. Velocity and OarcH read the last-period views (zero for
/// brand-new content); PIv and OarcH need the fitted models.
double content_index(ContentPolicy policy, const ContentState& state,
                     const ModelBundle* models);

struct ContentSimConfig {
  int n = 1000;
  double lambda = 0.1;
  double review_ratio = 0.05;  // mu = lambda * review_ratio
  int horizon = 500;
  int replications = 10;
  int threads = 0;
  // Test hook: score reviewed content's IV with its actual remaining
  // in-window views instead of the model prediction.
  bool iv_actual_remaining = false;
};

struct ContentMetrics {
  double vioviews = 0.0;   // views of truly violating content before review
  double pvioviews = 0.0;  // same, weighted by pviolating instead of the label
  double iv = 0.0;         // integrity value credited to reviews
  double reviews = 0.0;    // human reviews performed
  double review_ratio = 0.0;
  // Counterfactual: views the violating arrivals would have accrued inside
  // the window had nothing been reviewed. With the actual-remaining IV hook,
  // vioviews + iv equals this exactly.
  double vioviews_if_unreviewed = 0.0;
  std::vector<double> rep_vioviews;  // per replication, for pairing and SEs
  std::vector<double> rep_pvioviews;
};

/// Queueing simulation over the test set: Bin(n, mu) reviews per period,
/// arrivals sampled i.i.d. with replacement from the test set, content
/// leaves after L periods. Metrics are averaged over replications.
ContentMetrics content_sim(const ContentSimConfig& config, const TrajectoryDataset& test,
                           ContentPolicy policy, const ModelBundle* models,
                           std::uint64_t seed);

/// Precomputed per-(record, age) review priorities, ages 1..L. Lets callers
/// run the simulation under custom per-job scores.
struct ContentIndexTable {
  std::vector<std::vector<double>> value;
};

ContentIndexTable build_content_index_table(const TrajectoryDataset& test,
                                            ContentPolicy policy,
                                            const ModelBundle* models);

/// content_sim with an externally supplied index table. `models` is only
/// used for the integrity-value metric and may be null.
ContentMetrics content_sim_indexed(const ContentSimConfig& config,
                                   const TrajectoryDataset& test,
                                   const ContentIndexTable& index,
                                   const ModelBundle* models, std::uint64_t seed);

struct SweepPoint {
  ContentPolicy policy;
  double ratio = 0.0;
  double vioviews = 0.0;
  double pvioviews = 0.0;
  double iv = 0.0;
  double reviews = 0.0;
  std::vector<double> rep_vioviews;
  std::vector<double> rep_pvioviews;
};

/// Runs content_sim for every (policy, ratio) pair with shared seeds.
std::vector<SweepPoint> sweep(const ContentSimConfig& config,
                              const TrajectoryDataset& test,
                              const std::vector<ContentPolicy>& policies,
                              const std::vector<double>& ratios,
                              const ModelBundle* models, std::uint64_t seed);

struct SavingsRow {
  ContentPolicy policy;  // the baseline being replaced
  double ratio = 0.0;
  std::optional<double> savings;  // 1 - r'/r; empty when no r' in the grid works
};

/// Reviewer-hour savings of `better` against each other policy in the sweep:
/// the smallest ratio r' at which `better` matches the baseline's vioviews at
/// ratio r, reported as 1 - r'/r. All policies must share the ratio grid.
std::vector<SavingsRow> reviewer_hour_savings(const std::vector<SweepPoint>& points,
                                              ContentPolicy better = ContentPolicy::OarcH);

}  // namespace oarc

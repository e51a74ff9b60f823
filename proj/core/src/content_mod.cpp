#include "oarc/content_mod.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "oarc/parallel.hpp"
#include "oarc/rng.hpp"

namespace oarc {

namespace {

enum ContentEvent : std::uint64_t {
  EvReviewers = 1,
  EvArrivals = 2,
};

double bernoulli(RngStream& rng, double p) { return rng.next_double() < p ? 1.0 : 0.0; }

}  // namespace

ContentState content_state(const TrajectoryRecord& record, int age) {
  if (age < 1) throw std::invalid_argument("content_state: age is 1-based");
  ContentState s;
  s.pviolating = record.pviolating;
  s.age = age;
  const auto view_at = [&record](int d) {
    return d >= 1 && d <= static_cast<int>(record.views.size())
               ? record.views[static_cast<std::size_t>(d - 1)]
               : 0.0;
  };
  for (int d = 1; d < age; ++d) s.cum_views += view_at(d);
  s.lag1 = view_at(age - 1);
  s.lag2 = view_at(age - 2);
  s.lag3 = view_at(age - 3);
  return s;
}

TrajectoryDataset gen_ads(const AdsConfig& config, std::uint64_t seed) {
  if (config.campaigns <= 0 || config.ads_per_campaign <= 0 || config.horizon <= 0)
    throw std::invalid_argument("gen_ads: sizes must be positive");
  TrajectoryDataset ds;
  ds.horizon = config.horizon;
  ds.records.reserve(static_cast<std::size_t>(config.campaigns) *
                     static_cast<std::size_t>(config.ads_per_campaign));
  const int arms = config.ads_per_campaign;
  for (int u = 0; u < config.campaigns; ++u) {
    auto rng = RngStream::keyed(seed, static_cast<std::uint64_t>(u));
    const double budget = rng.pareto(config.budget_pareto_scale, config.budget_pareto_shape);
    const double pviolating = rng.beta(1.0, 3.0);
    std::vector<double> reward(static_cast<std::size_t>(arms));
    for (auto& r : reward) r = rng.beta(1.0, 5.0);

    std::vector<TrajectoryRecord> ads(static_cast<std::size_t>(arms));
    for (int k = 0; k < arms; ++k) {
      auto& ad = ads[static_cast<std::size_t>(k)];
      ad.id = static_cast<std::int64_t>(u) * arms + k;
      ad.pviolating = pviolating;
      ad.violating = bernoulli(rng, pviolating) > 0.5 ? 1 : 0;
      ad.views.assign(static_cast<std::size_t>(config.horizon), 0.0);
    }

    // UCB1 promotion: each arm once, then mean + sqrt(2 ln t / pulls),
    // ties to the lowest arm index.
    std::vector<double> total(static_cast<std::size_t>(arms), 0.0);
    std::vector<int> pulls(static_cast<std::size_t>(arms), 0);
    for (int t = 1; t <= config.horizon; ++t) {
      int arm;
      if (t <= arms) {
        arm = t - 1;
      } else {
        arm = 0;
        double best = -std::numeric_limits<double>::infinity();
        for (int k = 0; k < arms; ++k) {
          const auto kk = static_cast<std::size_t>(k);
          const double bonus = std::sqrt(2.0 * std::log(static_cast<double>(t)) /
                                         static_cast<double>(pulls[kk]));
          const double score = total[kk] / static_cast<double>(pulls[kk]) + bonus;
          if (score > best) {
            best = score;
            arm = k;
          }
        }
      }
      const auto ak = static_cast<std::size_t>(arm);
      total[ak] += bernoulli(rng, reward[ak]);
      ++pulls[ak];
      ads[ak].views[static_cast<std::size_t>(t - 1)] =
          static_cast<double>(rng.poisson(budget));
    }
    for (auto& ad : ads) ds.records.push_back(std::move(ad));
  }
  return ds;
}

TrajectoryDataset gen_ugc(const UgcConfig& config, std::uint64_t seed) {
  if (config.count <= 0 || config.horizon <= 0)
    throw std::invalid_argument("gen_ugc: sizes must be positive");
  TrajectoryDataset ds;
  ds.horizon = config.horizon;
  ds.records.resize(static_cast<std::size_t>(config.count));
  parallel_for(ds.records.size(), 0, [&](std::size_t j) {
    auto rng = RngStream::keyed(seed, static_cast<std::uint64_t>(j));
    auto& rec = ds.records[j];
    rec.id = static_cast<std::int64_t>(j);
    const double alpha = rng.uniform(config.alpha_lo, config.alpha_hi);
    const double tail = config.excitation_tail_numerator / alpha;
    rec.pviolating = rng.beta(alpha + tail, 6.0);
    rec.violating = bernoulli(rng, rec.pviolating) > 0.5 ? 1 : 0;
    rec.views.assign(static_cast<std::size_t>(config.horizon), 0.0);
    rec.views[0] = 1.0;
    for (int d = 2; d <= config.horizon; ++d) {
      double mean = 0.0;
      for (int dp = 1; dp < d; ++dp) {
        const double past = rec.views[static_cast<std::size_t>(dp - 1)];
        if (past == 0.0) continue;
        const double excite =
            config.excitation ? rng.pareto(1.0, tail) - 1.0 : 0.0;
        mean += (1.0 + excite) * past * std::exp(-alpha * static_cast<double>(d - dp));
      }
      mean = std::min(config.mean_cap, mean);
      rec.views[static_cast<std::size_t>(d - 1)] = static_cast<double>(rng.poisson(mean));
    }
  });
  return ds;
}

TrajectoryDataset load_dataset(const std::filesystem::path& path, bool zero_fill) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset: " + path.string());
  TrajectoryDataset ds;
  std::string line;
  bool header_seen = false;
  int columns = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      // header: content_id,pviolating,violating,v1..vL
      columns = 1 + static_cast<int>(std::count(line.begin(), line.end(), ','));
      if (columns < 4) throw std::runtime_error("dataset header too short");
      ds.horizon = columns - 3;
      header_seen = true;
      continue;
    }
    std::istringstream ls(line);
    std::string cell;
    TrajectoryRecord rec;
    if (!std::getline(ls, cell, ',')) throw std::runtime_error("dataset: empty row");
    rec.id = std::stoll(cell);
    if (!std::getline(ls, cell, ',')) throw std::runtime_error("dataset: missing pviolating");
    rec.pviolating = std::stod(cell);
    if (rec.pviolating < 0.0 || rec.pviolating > 1.0)
      throw std::runtime_error("dataset: pviolating outside [0,1] in row " +
                               std::to_string(rec.id));
    if (!std::getline(ls, cell, ',')) throw std::runtime_error("dataset: missing violating");
    const int label = std::stoi(cell);
    if (label != 0 && label != 1)
      throw std::runtime_error("dataset: violating must be 0 or 1");
    rec.violating = static_cast<std::uint8_t>(label);
    while (std::getline(ls, cell, ',')) rec.views.push_back(std::stod(cell));
    if (static_cast<int>(rec.views.size()) < ds.horizon) {
      if (!zero_fill)
        throw std::runtime_error("dataset: short row " + std::to_string(rec.id) +
                                 " (pass zero-fill to pad)");
      rec.views.resize(static_cast<std::size_t>(ds.horizon), 0.0);
    }
    if (static_cast<int>(rec.views.size()) > ds.horizon)
      throw std::runtime_error("dataset: row longer than header");
    ds.records.push_back(std::move(rec));
  }
  if (!header_seen) throw std::runtime_error("dataset: missing header");
  return ds;
}

void save_dataset(const TrajectoryDataset& dataset, const std::filesystem::path& path,
                  const std::string& manifest_comment) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write dataset: " + path.string());
  if (!manifest_comment.empty()) out << "# manifest: " << manifest_comment << "\n";
  out << "content_id,pviolating,violating";
  for (int d = 1; d <= dataset.horizon; ++d) out << ",v" << d;
  out << "\n";
  char buf[32];
  for (const auto& rec : dataset.records) {
    out << rec.id << ',';
    std::snprintf(buf, sizeof(buf), "%.17g", rec.pviolating);
    out << buf << ',' << static_cast<int>(rec.violating);
    for (double v : rec.views) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << ',' << buf;
    }
    out << "\n";
  }
}

std::pair<TrajectoryDataset, TrajectoryDataset> split_dataset(
    const TrajectoryDataset& dataset, std::uint64_t seed) {
  auto rng = RngStream::keyed(seed, 0x5f17);
  std::vector<std::size_t> idx(dataset.records.size());
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = idx.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
    std::swap(idx[i - 1], idx[j]);
  }
  TrajectoryDataset train, test;
  train.horizon = test.horizon = dataset.horizon;
  const std::size_t half = dataset.records.size() / 2;
  for (std::size_t i = 0; i < idx.size(); ++i)
    (i < half ? train : test).records.push_back(dataset.records[idx[i]]);
  return {std::move(train), std::move(test)};
}

double gamma_percentile(const TrajectoryDataset& dataset, double percent) {
  if (dataset.records.empty()) throw std::invalid_argument("gamma_percentile: empty dataset");
  if (!(percent > 0.0) || percent > 100.0)
    throw std::invalid_argument("gamma_percentile: percent must be in (0,100]");
  std::vector<double> totals;
  totals.reserve(dataset.records.size());
  for (const auto& rec : dataset.records)
    totals.push_back(std::accumulate(rec.views.begin(), rec.views.end(), 0.0));
  std::sort(totals.begin(), totals.end());
  const auto n = totals.size();
  auto rank = static_cast<std::size_t>(
      std::ceil(percent / 100.0 * static_cast<double>(n)));
  rank = std::clamp<std::size_t>(rank, 1, n);
  return totals[rank - 1];
}

TrajectoryDataset perturb_pviolating(const TrajectoryDataset& dataset, double epsilon,
                                     std::uint64_t seed) {
  if (epsilon < 0.0) throw std::invalid_argument("perturb: epsilon must be >= 0");
  TrajectoryDataset out = dataset;
  if (epsilon == 0.0) return out;
  for (std::size_t j = 0; j < out.records.size(); ++j) {
    auto rng = RngStream::keyed(seed, 0xca11b8, j);
    const double noise = rng.uniform(-epsilon, epsilon);
    out.records[j].pviolating =
        std::clamp(out.records[j].pviolating + noise, 0.0, 1.0);
  }
  return out;
}

namespace {

// Regression samples over all (record, age) pairs. Targets are the raw
// future views; CappedViewRegressor::fit applies the cap.
void regression_samples(const TrajectoryDataset& train, std::vector<FeatureVec>& x,
                        std::vector<double>& y) {
  const int horizon = train.horizon;
  x.reserve(train.records.size() * static_cast<std::size_t>(horizon));
  y.reserve(x.capacity());
  for (const auto& rec : train.records) {
    double cum = 0.0;
    double future = std::accumulate(rec.views.begin(), rec.views.end(), 0.0);
    for (int age = 1; age <= horizon; ++age) {
      const auto view_at = [&rec](int d) {
        return d >= 1 && d <= static_cast<int>(rec.views.size())
                   ? rec.views[static_cast<std::size_t>(d - 1)]
                   : 0.0;
      };
      future -= view_at(age);  // views after this period
      x.push_back({rec.pviolating, static_cast<double>(age), cum, view_at(age - 1),
                   view_at(age - 2), view_at(age - 3)});
      y.push_back(future);
      cum += view_at(age);
    }
  }
}

}  // namespace

CappedViewRegressor train_regressor(const TrajectoryDataset& train, double cap,
                                    RegressorBackend backend, const ForestConfig& config) {
  if (train.records.empty()) throw std::invalid_argument("train_regressor: empty training set");
  std::vector<FeatureVec> x;
  std::vector<double> y;
  regression_samples(train, x, y);
  return CappedViewRegressor::fit(x, y, cap, backend, config);
}

ModelBundle train_models(const TrajectoryDataset& train, double gamma_percent,
                         const ForestConfig& config) {
  ModelBundle b;
  b.gamma_star = gamma_percentile(train, gamma_percent);
  std::vector<FeatureVec> x;
  std::vector<double> y;
  regression_samples(train, x, y);
  b.capped = CappedViewRegressor::fit(x, y, b.gamma_star, RegressorBackend::Forest, config);
  b.uncapped = CappedViewRegressor::fit(x, y, std::numeric_limits<double>::infinity(),
                                        RegressorBackend::Forest, config);
  return b;
}

const char* to_string(ContentPolicy policy) {
  switch (policy) {
    case ContentPolicy::PViolating: return "pviolating";
    case ContentPolicy::Velocity: return "velocity";
    case ContentPolicy::PIv: return "piv";
    case ContentPolicy::OarcH: return "oarch";
  }
  return "?";
}

std::optional<ContentPolicy> content_policy_from_string(const std::string& name) {
  if (name == "pviolating") return ContentPolicy::PViolating;
  if (name == "velocity") return ContentPolicy::Velocity;
  if (name == "piv") return ContentPolicy::PIv;
  if (name == "oarch") return ContentPolicy::OarcH;
  return std::nullopt;
}

double content_index(ContentPolicy policy, const ContentState& state,
                     const ModelBundle* models) {
  switch (policy) {
    case ContentPolicy::PViolating:
      return state.pviolating;
    case ContentPolicy::Velocity:
      return state.pviolating * state.lag1;
    case ContentPolicy::PIv:
      if (models == nullptr) throw std::invalid_argument("piv index needs a model");
      return state.pviolating * models->uncapped.predict(state.features());
    case ContentPolicy::OarcH:
      if (models == nullptr) throw std::invalid_argument("oarch index needs a model");
      return state.pviolating *
             (state.lag1 + models->capped.predict(state.features()));
  }
  throw std::invalid_argument("unknown content policy");
}

namespace {

struct ViewTables {
  // suffix[record][age-1] = views from age..L; suffix[record][L] = 0
  std::vector<std::vector<double>> suffix;
  // prefix totals for the counterfactual metric: prefix[record][d] = views of
  // ages 1..d
  std::vector<std::vector<double>> prefix;
};

ViewTables build_view_tables(const TrajectoryDataset& test) {
  const auto n = test.records.size();
  const int horizon = test.horizon;
  ViewTables t;
  t.suffix.resize(n);
  t.prefix.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto& rec = test.records[j];
    auto& suf = t.suffix[j];
    suf.assign(static_cast<std::size_t>(horizon) + 1, 0.0);
    auto& pre = t.prefix[j];
    pre.assign(static_cast<std::size_t>(horizon) + 1, 0.0);
    for (int d = horizon; d >= 1; --d)
      suf[static_cast<std::size_t>(d - 1)] =
          suf[static_cast<std::size_t>(d)] + rec.views[static_cast<std::size_t>(d - 1)];
    for (int d = 1; d <= horizon; ++d)
      pre[static_cast<std::size_t>(d)] =
          pre[static_cast<std::size_t>(d - 1)] + rec.views[static_cast<std::size_t>(d - 1)];
  }
  return t;
}

struct QueueItem {
  std::int32_t record;
  std::int32_t age;
  std::int64_t seq;  // arrival order
};

struct RepOutcome {
  double vioviews = 0.0;
  double pvioviews = 0.0;
  double iv = 0.0;
  double reviews = 0.0;
  double vioviews_if_unreviewed = 0.0;
};

RepOutcome run_content_rep(const ContentSimConfig& config, const TrajectoryDataset& test,
                           const ContentIndexTable& index, const ViewTables& tables,
                           const ModelBundle* models, std::uint64_t seed, int rep) {
  const double mu = config.lambda * config.review_ratio;
  const int horizon = test.horizon;
  RepOutcome out;
  std::vector<QueueItem> queue;
  std::vector<std::size_t> pos;
  std::int64_t seq = 0;
  const auto urep = static_cast<std::uint64_t>(rep);

  for (int t = 1; t <= config.horizon; ++t) {
    const auto ut = static_cast<std::uint64_t>(t);
    auto reviewer_rng = RngStream::keyed(seed, urep, ut, EvReviewers);
    const std::int64_t reviewers = reviewer_rng.binomial(config.n, mu);
    const auto take = static_cast<std::size_t>(std::min<std::int64_t>(
        reviewers, static_cast<std::int64_t>(queue.size())));

    // Review the top `take` items by index; ties by record id then arrival.
    pos.resize(queue.size());
    std::iota(pos.begin(), pos.end(), 0);
    if (take > 0 && take < queue.size()) {
      auto before = [&](std::size_t a, std::size_t b) {
        const QueueItem& ja = queue[a];
        const QueueItem& jb = queue[b];
        const double ia = index.value[static_cast<std::size_t>(ja.record)]
                                     [static_cast<std::size_t>(ja.age - 1)];
        const double ib = index.value[static_cast<std::size_t>(jb.record)]
                                     [static_cast<std::size_t>(jb.age - 1)];
        if (ia != ib) return ia > ib;
        if (ja.record != jb.record) return ja.record < jb.record;
        return ja.seq < jb.seq;
      };
      std::nth_element(pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(take) - 1,
                       pos.end(), before);
    }
    std::vector<char> reviewed(queue.size(), 0);
    for (std::size_t i = 0; i < take; ++i) {
      reviewed[pos[i]] = 1;
      const QueueItem& item = queue[pos[i]];
      const auto& rec = test.records[static_cast<std::size_t>(item.record)];
      out.reviews += 1.0;
      if (rec.violating) {
        if (config.iv_actual_remaining) {
          // Views the content would still accrue inside the simulation window.
          const int last_age = std::min(horizon, item.age + (config.horizon - t));
          const auto& suf = tables.suffix[static_cast<std::size_t>(item.record)];
          out.iv += suf[static_cast<std::size_t>(item.age - 1)] -
                    suf[static_cast<std::size_t>(last_age)];
        } else if (models != nullptr) {
          out.iv += models->uncapped.predict(content_state(rec, item.age).features());
        }
      }
    }

    // Unreviewed content accrues this period's views, then ages.
    std::size_t keep = 0;
    for (std::size_t i = 0; i < queue.size(); ++i) {
      if (reviewed[i]) continue;
      QueueItem item = queue[i];
      const auto& rec = test.records[static_cast<std::size_t>(item.record)];
      const double views = rec.views[static_cast<std::size_t>(item.age - 1)];
      if (rec.violating) out.vioviews += views;
      out.pvioviews += rec.pviolating * views;
      ++item.age;
      if (item.age <= horizon) queue[keep++] = item;
    }
    queue.resize(keep);

    auto arrival_rng = RngStream::keyed(seed, urep, ut, EvArrivals);
    const std::int64_t arrivals = arrival_rng.binomial(config.n, config.lambda);
    for (std::int64_t a = 0; a < arrivals; ++a) {
      const auto record = static_cast<std::int32_t>(arrival_rng.uniform_int(
          0, static_cast<std::int64_t>(test.records.size()) - 1));
      queue.push_back({record, 1, seq++});
      const auto& rec = test.records[static_cast<std::size_t>(record)];
      if (rec.violating) {
        const int window = std::min(horizon, config.horizon - t);
        out.vioviews_if_unreviewed +=
            tables.prefix[static_cast<std::size_t>(record)][static_cast<std::size_t>(window)];
      }
    }
  }
  return out;
}

ContentMetrics run_content_sim(const ContentSimConfig& config,
                               const TrajectoryDataset& test,
                               const ContentIndexTable& index, const ViewTables& tables,
                               const ModelBundle* models, std::uint64_t seed) {
  if (test.records.empty()) throw std::invalid_argument("content_sim: empty test set");
  if (config.n <= 0 || config.horizon <= 0 || config.replications <= 0)
    throw std::invalid_argument("content_sim: sizes must be positive");
  if (config.lambda <= 0.0 || config.lambda >= 1.0)
    throw std::invalid_argument("content_sim: lambda must be in (0,1)");
  const double mu = config.lambda * config.review_ratio;
  if (mu < 0.0 || mu > 1.0)
    throw std::invalid_argument("content_sim: lambda * ratio must be in [0,1]");

  const auto reps = static_cast<std::size_t>(config.replications);
  std::vector<RepOutcome> outcomes(reps);
  parallel_for(reps, config.threads, [&](std::size_t r) {
    outcomes[r] =
        run_content_rep(config, test, index, tables, models, seed, static_cast<int>(r));
  });

  ContentMetrics m;
  m.review_ratio = config.review_ratio;
  for (const auto& o : outcomes) {
    m.vioviews += o.vioviews / static_cast<double>(reps);
    m.pvioviews += o.pvioviews / static_cast<double>(reps);
    m.iv += o.iv / static_cast<double>(reps);
    m.reviews += o.reviews / static_cast<double>(reps);
    m.vioviews_if_unreviewed += o.vioviews_if_unreviewed / static_cast<double>(reps);
    m.rep_vioviews.push_back(o.vioviews);
    m.rep_pvioviews.push_back(o.pvioviews);
  }
  return m;
}

}  // namespace

ContentIndexTable build_content_index_table(const TrajectoryDataset& test,
                                            ContentPolicy policy,
                                            const ModelBundle* models) {
  const auto n = test.records.size();
  const int horizon = test.horizon;
  ContentIndexTable t;
  t.value.resize(n);
  parallel_for(n, 0, [&](std::size_t j) {
    const auto& rec = test.records[j];
    auto& idx = t.value[j];
    idx.resize(static_cast<std::size_t>(horizon));
    for (int age = 1; age <= horizon; ++age)
      idx[static_cast<std::size_t>(age - 1)] =
          content_index(policy, content_state(rec, age), models);
  });
  return t;
}

ContentMetrics content_sim_indexed(const ContentSimConfig& config,
                                   const TrajectoryDataset& test,
                                   const ContentIndexTable& index,
                                   const ModelBundle* models, std::uint64_t seed) {
  if (index.value.size() != test.records.size())
    throw std::invalid_argument("content_sim: index table size mismatch");
  const auto tables = build_view_tables(test);
  return run_content_sim(config, test, index, tables, models, seed);
}

ContentMetrics content_sim(const ContentSimConfig& config, const TrajectoryDataset& test,
                           ContentPolicy policy, const ModelBundle* models,
                           std::uint64_t seed) {
  const auto index = build_content_index_table(test, policy, models);
  const auto tables = build_view_tables(test);
  return run_content_sim(config, test, index, tables, models, seed);
}

std::vector<SweepPoint> sweep(const ContentSimConfig& config, const TrajectoryDataset& test,
                              const std::vector<ContentPolicy>& policies,
                              const std::vector<double>& ratios, const ModelBundle* models,
                              std::uint64_t seed) {
  std::vector<SweepPoint> points;
  const auto tables = build_view_tables(test);
  for (ContentPolicy policy : policies) {
    const auto index = build_content_index_table(test, policy, models);
    for (double ratio : ratios) {
      ContentSimConfig c = config;
      c.review_ratio = ratio;
      auto metrics = run_content_sim(c, test, index, tables, models, seed);
      SweepPoint p;
      p.policy = policy;
      p.ratio = ratio;
      p.vioviews = metrics.vioviews;
      p.pvioviews = metrics.pvioviews;
      p.iv = metrics.iv;
      p.reviews = metrics.reviews;
      p.rep_vioviews = std::move(metrics.rep_vioviews);
      p.rep_pvioviews = std::move(metrics.rep_pvioviews);
      points.push_back(std::move(p));
    }
  }
  return points;
}

std::vector<SavingsRow> reviewer_hour_savings(const std::vector<SweepPoint>& points,
                                              ContentPolicy better) {
  // Group by policy, require the same ratio grid everywhere.
  std::vector<ContentPolicy> policies;
  std::vector<std::vector<const SweepPoint*>> grids;
  for (const auto& p : points) {
    auto it = std::find(policies.begin(), policies.end(), p.policy);
    if (it == policies.end()) {
      policies.push_back(p.policy);
      grids.emplace_back();
      it = policies.end() - 1;
    }
    grids[static_cast<std::size_t>(it - policies.begin())].push_back(&p);
  }
  const auto better_at = std::find(policies.begin(), policies.end(), better);
  if (better_at == policies.end())
    throw std::invalid_argument("savings: reference policy missing from sweep");
  auto sort_grid = [](std::vector<const SweepPoint*>& g) {
    std::sort(g.begin(), g.end(),
              [](const SweepPoint* a, const SweepPoint* b) { return a->ratio < b->ratio; });
  };
  for (auto& g : grids) sort_grid(g);
  const auto& ref = grids[static_cast<std::size_t>(better_at - policies.begin())];
  for (const auto& g : grids) {
    if (g.size() != ref.size())
      throw std::invalid_argument("savings: ratio grids differ across policies");
    for (std::size_t i = 0; i < g.size(); ++i)
      if (std::abs(g[i]->ratio - ref[i]->ratio) > 1e-12)
        throw std::invalid_argument("savings: ratio grids differ across policies");
  }

  std::vector<SavingsRow> rows;
  for (std::size_t pi = 0; pi < policies.size(); ++pi) {
    if (policies[pi] == better) continue;
    for (const SweepPoint* base : grids[pi]) {
      SavingsRow row;
      row.policy = policies[pi];
      row.ratio = base->ratio;
      for (const SweepPoint* cand : ref) {
        if (cand->vioviews <= base->vioviews) {
          row.savings = 1.0 - cand->ratio / base->ratio;
          break;
        }
      }
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace oarc

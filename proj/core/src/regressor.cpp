#include "oarc/regressor.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace oarc {

namespace {

constexpr char kModelMagic[8] = {'O', 'A', 'R', 'C', 'M', 'L', '0', '1'};

template <typename T>
void write_pod(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("model file truncated");
  return v;
}

// Histogram bin edges: midpoints between up to max_bins quantile values.
std::vector<double> bin_edges(std::vector<double> values, int max_bins) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  std::vector<double> edges;
  if (values.size() <= 1) return edges;
  if (static_cast<int>(values.size()) <= max_bins) {
    edges.reserve(values.size() - 1);
    for (std::size_t i = 0; i + 1 < values.size(); ++i)
      edges.push_back(0.5 * (values[i] + values[i + 1]));
    return edges;
  }
  edges.reserve(static_cast<std::size_t>(max_bins) - 1);
  for (int b = 1; b < max_bins; ++b) {
    const auto at = values.size() * static_cast<std::size_t>(b) / static_cast<std::size_t>(max_bins);
    const double e = 0.5 * (values[at - 1] + values[at]);
    if (edges.empty() || e > edges.back()) edges.push_back(e);
  }
  return edges;
}

std::uint16_t bin_of(const std::vector<double>& edges, double v) {
  return static_cast<std::uint16_t>(
      std::upper_bound(edges.begin(), edges.end(), v) - edges.begin());
}

}  // namespace

BoostedForest BoostedForest::fit(const std::vector<FeatureVec>& x,
                                 const std::vector<double>& y,
                                 const ForestConfig& config) {
  if (x.empty() || x.size() != y.size())
    throw std::invalid_argument("forest fit: empty or mismatched data");
  const std::size_t n = x.size();

  BoostedForest f;
  f.base_ = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);

  // Pre-bin features once.
  std::array<std::vector<double>, kContentFeatures> edges;
  std::array<std::vector<std::uint16_t>, kContentFeatures> binned;
  int max_bin_count = 1;
  for (int fidx = 0; fidx < kContentFeatures; ++fidx) {
    std::vector<double> col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = x[i][static_cast<std::size_t>(fidx)];
    edges[static_cast<std::size_t>(fidx)] = bin_edges(col, config.max_bins);
    auto& bc = binned[static_cast<std::size_t>(fidx)];
    bc.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      bc[i] = bin_of(edges[static_cast<std::size_t>(fidx)], col[i]);
    max_bin_count = std::max(
        max_bin_count, static_cast<int>(edges[static_cast<std::size_t>(fidx)].size()) + 1);
  }

  std::vector<double> residual(y);
  for (double& r : residual) r -= f.base_;
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  std::vector<double> hist_sum(static_cast<std::size_t>(max_bin_count));
  std::vector<std::uint32_t> hist_cnt(static_cast<std::size_t>(max_bin_count));

  struct Work {
    std::int32_t node;
    std::uint32_t lo, hi;  // index range in `order`
    int depth;
  };

  for (int t = 0; t < config.trees; ++t) {
    std::vector<Node> nodes;
    nodes.push_back({});
    std::vector<Work> stack{{0, 0, static_cast<std::uint32_t>(n), 0}};
    while (!stack.empty()) {
      const Work w = stack.back();
      stack.pop_back();
      const std::uint32_t count = w.hi - w.lo;
      double sum = 0.0;
      for (std::uint32_t i = w.lo; i < w.hi; ++i) sum += residual[order[i]];
      const double mean = sum / count;

      bool make_leaf = w.depth >= config.max_depth ||
                       count < 2 * static_cast<std::uint32_t>(config.min_samples_leaf);
      std::int32_t best_feature = -1;
      std::uint16_t best_bin = 0;
      double best_gain = 1e-12;
      if (!make_leaf) {
        for (int fidx = 0; fidx < kContentFeatures; ++fidx) {
          const auto& fedges = edges[static_cast<std::size_t>(fidx)];
          if (fedges.empty()) continue;
          const auto bins = fedges.size() + 1;
          std::fill(hist_sum.begin(), hist_sum.begin() + static_cast<std::ptrdiff_t>(bins), 0.0);
          std::fill(hist_cnt.begin(), hist_cnt.begin() + static_cast<std::ptrdiff_t>(bins), 0u);
          const auto& bc = binned[static_cast<std::size_t>(fidx)];
          for (std::uint32_t i = w.lo; i < w.hi; ++i) {
            hist_sum[bc[order[i]]] += residual[order[i]];
            ++hist_cnt[bc[order[i]]];
          }
          double lsum = 0.0;
          std::uint32_t lcnt = 0;
          for (std::size_t b = 0; b + 1 < bins; ++b) {
            lsum += hist_sum[b];
            lcnt += hist_cnt[b];
            const std::uint32_t rcnt = count - lcnt;
            if (lcnt < static_cast<std::uint32_t>(config.min_samples_leaf) ||
                rcnt < static_cast<std::uint32_t>(config.min_samples_leaf))
              continue;
            const double rsum = sum - lsum;
            const double gain = lsum * lsum / lcnt + rsum * rsum / rcnt - sum * sum / count;
            if (gain > best_gain) {
              best_gain = gain;
              best_feature = fidx;
              best_bin = static_cast<std::uint16_t>(b);
            }
          }
        }
      }
      if (best_feature < 0) {
        nodes[static_cast<std::size_t>(w.node)].feature = -1;
        nodes[static_cast<std::size_t>(w.node)].value = config.learning_rate * mean;
        continue;
      }
      // Partition `order[lo,hi)` on the chosen bin.
      const auto& bc = binned[static_cast<std::size_t>(best_feature)];
      auto mid_it = std::partition(order.begin() + w.lo, order.begin() + w.hi,
                                   [&](std::uint32_t i) { return bc[i] <= best_bin; });
      const auto mid = static_cast<std::uint32_t>(mid_it - order.begin());
      const auto left = static_cast<std::int32_t>(nodes.size());
      const auto right = left + 1;
      nodes.push_back({});
      nodes.push_back({});
      Node& node = nodes[static_cast<std::size_t>(w.node)];
      node.feature = best_feature;
      node.threshold = edges[static_cast<std::size_t>(best_feature)][best_bin];
      node.left = left;
      node.right = right;
      stack.push_back({left, w.lo, mid, w.depth + 1});
      stack.push_back({right, mid, w.hi, w.depth + 1});
    }
    // Update residuals with this tree's predictions.
    for (std::size_t i = 0; i < n; ++i) {
      const auto& tree = nodes;
      std::int32_t at = 0;
      while (tree[static_cast<std::size_t>(at)].feature >= 0) {
        const Node& nd = tree[static_cast<std::size_t>(at)];
        at = x[i][static_cast<std::size_t>(nd.feature)] <= nd.threshold ? nd.left : nd.right;
      }
      residual[i] -= tree[static_cast<std::size_t>(at)].value;
    }
    f.trees_.push_back(std::move(nodes));
  }
  return f;
}

double BoostedForest::predict(const FeatureVec& x) const {
  double out = base_;
  for (const auto& tree : trees_) {
    std::int32_t at = 0;
    while (tree[static_cast<std::size_t>(at)].feature >= 0) {
      const Node& nd = tree[static_cast<std::size_t>(at)];
      at = x[static_cast<std::size_t>(nd.feature)] <= nd.threshold ? nd.left : nd.right;
    }
    out += tree[static_cast<std::size_t>(at)].value;
  }
  return out;
}

void BoostedForest::write(std::ostream& out) const {
  write_pod(out, base_);
  write_pod(out, static_cast<std::uint32_t>(trees_.size()));
  for (const auto& tree : trees_) {
    write_pod(out, static_cast<std::uint32_t>(tree.size()));
    for (const Node& nd : tree) {
      write_pod(out, nd.feature);
      write_pod(out, nd.threshold);
      write_pod(out, nd.left);
      write_pod(out, nd.right);
      write_pod(out, nd.value);
    }
  }
}

BoostedForest BoostedForest::read(std::istream& in) {
  BoostedForest f;
  f.base_ = read_pod<double>(in);
  const auto trees = read_pod<std::uint32_t>(in);
  f.trees_.resize(trees);
  for (auto& tree : f.trees_) {
    const auto count = read_pod<std::uint32_t>(in);
    tree.resize(count);
    for (Node& nd : tree) {
      nd.feature = read_pod<std::int32_t>(in);
      nd.threshold = read_pod<double>(in);
      nd.left = read_pod<std::int32_t>(in);
      nd.right = read_pod<std::int32_t>(in);
      nd.value = read_pod<double>(in);
    }
  }
  return f;
}

BinnedAgeModel BinnedAgeModel::fit(const std::vector<FeatureVec>& x,
                                   const std::vector<double>& y) {
  if (x.empty() || x.size() != y.size())
    throw std::invalid_argument("binned fit: empty or mismatched data");
  BinnedAgeModel m;
  int max_age = 0;
  for (const auto& row : x) max_age = std::max(max_age, static_cast<int>(row[1]));
  std::vector<double> sum(static_cast<std::size_t>(max_age) + 1, 0.0);
  std::vector<std::uint32_t> cnt(static_cast<std::size_t>(max_age) + 1, 0);
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto age = static_cast<std::size_t>(std::clamp(
        static_cast<int>(x[i][1]), 0, max_age));
    sum[age] += y[i];
    ++cnt[age];
    total += y[i];
  }
  m.overall_ = total / static_cast<double>(x.size());
  m.mean_by_age_.resize(sum.size());
  for (std::size_t a = 0; a < sum.size(); ++a)
    m.mean_by_age_[a] = cnt[a] > 0 ? sum[a] / cnt[a] : m.overall_;
  return m;
}

double BinnedAgeModel::predict(const FeatureVec& x) const {
  if (mean_by_age_.empty()) return overall_;
  const auto age = static_cast<std::size_t>(std::clamp(
      static_cast<int>(x[1]), 0, static_cast<int>(mean_by_age_.size()) - 1));
  return mean_by_age_[age];
}

void BinnedAgeModel::write(std::ostream& out) const {
  write_pod(out, overall_);
  write_pod(out, static_cast<std::uint32_t>(mean_by_age_.size()));
  for (double v : mean_by_age_) write_pod(out, v);
}

BinnedAgeModel BinnedAgeModel::read(std::istream& in) {
  BinnedAgeModel m;
  m.overall_ = read_pod<double>(in);
  const auto count = read_pod<std::uint32_t>(in);
  m.mean_by_age_.resize(count);
  for (auto& v : m.mean_by_age_) v = read_pod<double>(in);
  return m;
}

CappedViewRegressor CappedViewRegressor::fit(const std::vector<FeatureVec>& x,
                                             const std::vector<double>& y, double cap,
                                             RegressorBackend backend,
                                             const ForestConfig& config) {
  if (x.empty()) throw std::invalid_argument("regressor fit: empty training data");
  if (cap < 0.0) throw std::invalid_argument("regressor fit: cap must be >= 0");
  CappedViewRegressor r;
  r.cap_ = cap;
  r.backend_ = backend;
  std::vector<double> capped(y.size());
  double max_target = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    capped[i] = std::min(cap, y[i]);
    max_target = std::max(max_target, capped[i]);
  }
  r.clamp_hi_ = std::isfinite(cap) ? cap : max_target;
  if (backend == RegressorBackend::Forest)
    r.forest_ = BoostedForest::fit(x, capped, config);
  else
    r.binned_ = BinnedAgeModel::fit(x, capped);
  double mse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double err = r.predict(x[i]) - capped[i];
    mse += err * err;
  }
  r.training_mse_ = mse / static_cast<double>(x.size());
  return r;
}

double CappedViewRegressor::predict(const FeatureVec& x) const {
  const double raw = backend_ == RegressorBackend::Forest ? forest_.predict(x)
                                                          : binned_.predict(x);
  return std::clamp(raw, 0.0, clamp_hi_);
}

void CappedViewRegressor::write(std::ostream& out) const {
  write_pod(out, cap_);
  write_pod(out, clamp_hi_);
  write_pod(out, training_mse_);
  write_pod(out, static_cast<std::uint8_t>(backend_));
  if (backend_ == RegressorBackend::Forest)
    forest_.write(out);
  else
    binned_.write(out);
}

CappedViewRegressor CappedViewRegressor::read(std::istream& in) {
  CappedViewRegressor r;
  r.cap_ = read_pod<double>(in);
  r.clamp_hi_ = read_pod<double>(in);
  r.training_mse_ = read_pod<double>(in);
  r.backend_ = static_cast<RegressorBackend>(read_pod<std::uint8_t>(in));
  if (r.backend_ == RegressorBackend::Forest)
    r.forest_ = BoostedForest::read(in);
  else
    r.binned_ = BinnedAgeModel::read(in);
  return r;
}

void ModelBundle::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write model file: " + path.string());
  out.write(kModelMagic, sizeof(kModelMagic));
  write_pod(out, static_cast<std::uint32_t>(1));  // container version
  write_pod(out, gamma_star);
  capped.write(out);
  uncapped.write(out);
}

ModelBundle ModelBundle::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model file: " + path.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kModelMagic, sizeof(magic)) != 0)
    throw std::runtime_error("not a model file: " + path.string());
  const auto version = read_pod<std::uint32_t>(in);
  if (version != 1) throw std::runtime_error("unsupported model version");
  ModelBundle b;
  b.gamma_star = read_pod<double>(in);
  b.capped = CappedViewRegressor::read(in);
  b.uncapped = CappedViewRegressor::read(in);
  return b;
}

}  // namespace oarc

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

namespace oarc {

inline constexpr int kContentFeatures = 6;
using FeatureVec = std::array<double, kContentFeatures>;

struct ForestConfig {
  int trees = 100;
  int max_depth = 10;
  int max_bins = 256;
  double learning_rate = 0.2;
  int min_samples_leaf = 8;
};

/// Gradient-boosted regression trees with per-feature histogram splits.
/// Squared loss; each tree fits the running residual and leaves predict the
/// shrunken residual mean.
class BoostedForest {
 public:
  static BoostedForest fit(const std::vector<FeatureVec>& x,
                           const std::vector<double>& y, const ForestConfig& config);

  double predict(const FeatureVec& x) const;
  std::size_t tree_count() const { return trees_.size(); }

  void write(std::ostream& out) const;
  static BoostedForest read(std::istream& in);

 private:
  struct Node {
    std::int32_t feature = -1;  // -1 marks a leaf
    double threshold = 0.0;     // go left when x[feature] <= threshold
    std::int32_t left = -1;
    std::int32_t right = -1;
    double value = 0.0;         // leaf increment (already shrunken)
  };
  double base_ = 0.0;
  std::vector<std::vector<Node>> trees_;
};

/// Lookup fallback: mean target per integer age (feature 1), linear tail.
class BinnedAgeModel {
 public:
  static BinnedAgeModel fit(const std::vector<FeatureVec>& x,
                            const std::vector<double>& y);
  double predict(const FeatureVec& x) const;
  void write(std::ostream& out) const;
  static BinnedAgeModel read(std::istream& in);

 private:
  std::vector<double> mean_by_age_;
  double overall_ = 0.0;
};

enum class RegressorBackend : std::uint8_t { Forest = 0, BinnedAge = 1 };

/// Predictor of min(cap, future views) from a content state. Predictions are
/// clamped to [0, cap]; an uncapped model (cap = +inf) clamps to the largest
/// target seen in training.
class CappedViewRegressor {
 public:
  CappedViewRegressor() = default;

  static CappedViewRegressor fit(const std::vector<FeatureVec>& x,
                                 const std::vector<double>& y, double cap,
                                 RegressorBackend backend = RegressorBackend::Forest,
                                 const ForestConfig& config = {});

  double predict(const FeatureVec& x) const;
  double cap() const { return cap_; }
  double training_mse() const { return training_mse_; }

  void write(std::ostream& out) const;
  static CappedViewRegressor read(std::istream& in);

 private:
  double cap_ = 0.0;
  double clamp_hi_ = 0.0;
  double training_mse_ = 0.0;
  RegressorBackend backend_ = RegressorBackend::Forest;
  BoostedForest forest_;
  BinnedAgeModel binned_;
};

/// Versioned container bundling the capped model (index scoring), the
/// uncapped model (remaining-view prediction) and the cap used in training.
struct ModelBundle {
  double gamma_star = 0.0;
  CappedViewRegressor capped;
  CappedViewRegressor uncapped;

  void save(const std::filesystem::path& path) const;
  static ModelBundle load(const std::filesystem::path& path);
};

}  // namespace oarc

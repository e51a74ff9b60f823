#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>

#include "oarc/regressor.hpp"
#include "oarc/rng.hpp"

using namespace oarc;

namespace {

// y = 3*x0 + x1 with noise-free samples on a grid.
void grid_data(std::vector<FeatureVec>& x, std::vector<double>& y) {
  for (int a = 0; a < 40; ++a) {
    for (int b = 0; b < 25; ++b) {
      FeatureVec f{};
      f[0] = a * 0.1;
      f[1] = static_cast<double>(b);
      x.push_back(f);
      y.push_back(3.0 * f[0] + f[1]);
    }
  }
}

}  // namespace

TEST_CASE("boosted forest fits a smooth function on two features") {
  std::vector<FeatureVec> x;
  std::vector<double> y;
  grid_data(x, y);
  const auto forest = BoostedForest::fit(x, y, {.trees = 80, .max_depth = 6});
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    worst = std::max(worst, std::abs(forest.predict(x[i]) - y[i]));
  CHECK(worst < 0.5);
}

TEST_CASE("capped regressor clamps to [0, cap]") {
  std::vector<FeatureVec> x;
  std::vector<double> y;
  grid_data(x, y);
  const double cap = 10.0;
  const auto reg = CappedViewRegressor::fit(x, y, cap);
  auto rng = RngStream::keyed(61, 0);
  for (int trial = 0; trial < 2000; ++trial) {
    FeatureVec f{};
    f[0] = rng.uniform(-5.0, 20.0);
    f[1] = rng.uniform(-5.0, 60.0);
    const double p = reg.predict(f);
    CHECK(p >= 0.0);
    CHECK(p <= cap);
  }
  CHECK(reg.training_mse() < 1.0);
}

TEST_CASE("cap zero forces the zero predictor") {
  std::vector<FeatureVec> x;
  std::vector<double> y;
  grid_data(x, y);
  const auto reg = CappedViewRegressor::fit(x, y, 0.0);
  for (std::size_t i = 0; i < x.size(); i += 17) CHECK(reg.predict(x[i]) == 0.0);
}

TEST_CASE("uncapped regressor clamps to the observed target range") {
  std::vector<FeatureVec> x;
  std::vector<double> y;
  grid_data(x, y);
  const double max_y = *std::max_element(y.begin(), y.end());
  const auto reg =
      CappedViewRegressor::fit(x, y, std::numeric_limits<double>::infinity());
  FeatureVec wild{};
  wild[0] = 1e6;
  wild[1] = 1e6;
  CHECK(reg.predict(wild) <= max_y);
  CHECK(reg.predict(wild) >= 0.0);
}

TEST_CASE("binned-age fallback predicts per-age means") {
  std::vector<FeatureVec> x;
  std::vector<double> y;
  for (int age = 1; age <= 30; ++age) {
    for (int rep = 0; rep < 5; ++rep) {
      FeatureVec f{};
      f[1] = static_cast<double>(age);
      x.push_back(f);
      y.push_back(2.0 * age);
    }
  }
  const auto reg =
      CappedViewRegressor::fit(x, y, std::numeric_limits<double>::infinity(),
                               RegressorBackend::BinnedAge);
  FeatureVec probe{};
  probe[1] = 7.0;
  CHECK(reg.predict(probe) == doctest::Approx(14.0));
}

TEST_CASE("model bundle round-trips through the container file") {
  std::vector<FeatureVec> x;
  std::vector<double> y;
  grid_data(x, y);
  ModelBundle bundle;
  bundle.gamma_star = 12.5;
  bundle.capped = CappedViewRegressor::fit(x, y, 12.5, RegressorBackend::Forest,
                                           {.trees = 10, .max_depth = 4});
  bundle.uncapped = CappedViewRegressor::fit(x, y, std::numeric_limits<double>::infinity(),
                                             RegressorBackend::Forest,
                                             {.trees = 10, .max_depth = 4});
  namespace fs = std::filesystem;
  const auto path = fs::temp_directory_path() / "oarc_model_test.bin";
  bundle.save(path);
  const auto back = ModelBundle::load(path);
  CHECK(back.gamma_star == bundle.gamma_star);
  for (std::size_t i = 0; i < x.size(); i += 13) {
    CHECK(back.capped.predict(x[i]) == bundle.capped.predict(x[i]));
    CHECK(back.uncapped.predict(x[i]) == bundle.uncapped.predict(x[i]));
  }
  fs::remove(path);
  CHECK_THROWS(ModelBundle::load(fs::temp_directory_path() / "missing.bin"));
}

TEST_CASE("empty training data is rejected") {
  std::vector<FeatureVec> x;
  std::vector<double> y;
  CHECK_THROWS_AS(CappedViewRegressor::fit(x, y, 1.0), std::invalid_argument);
}

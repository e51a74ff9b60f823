#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace oarc {

/// Counter-based random stream. Each stream is an independent SplitMix64
/// sequence whose starting point is derived by hashing a key tuple, so
/// streams keyed by (seed, replication, period, event) are reproducible and
/// can be created on the fly without carrying generator state around.
///
/// All samplers draw from the exact distribution (no Gaussian approximation
/// of discrete laws): binomial uses inverse-CDF for small n and an
/// order-statistic (beta) recursion for large n, Poisson uses inverse-CDF
/// for small means and a gamma-arrival recursion for large means.
class RngStream {
 public:
  explicit RngStream(std::uint64_t key) : state_(key) {}

  /// Stream for a key tuple. Extra distinguishes sub-streams of one event
  /// (e.g. the per-state transition draws of a period).
  static RngStream keyed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                         std::uint64_t c = 0, std::uint64_t d = 0);

  std::uint64_t next_u64();
  /// Uniform in [0, 1).
  double next_double();
  double uniform(double lo, double hi);
  /// Uniform integer in [lo, hi] inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  /// Standard normal (Marsaglia polar).
  double normal();
  /// Gamma(shape, 1) via Marsaglia-Tsang, exact for any shape > 0.
  double gamma(double shape);
  double beta(double a, double b);
  /// Pareto with density shape*scale^shape / x^(shape+1) on [scale, inf).
  double pareto(double scale, double shape);
  double exponential(double rate = 1.0);

  std::int64_t binomial(std::int64_t n, double p);
  std::int64_t poisson(double mean);
  /// Number of marked items in a size-`draws` uniform subset of a population
  /// with `marked` marked items.
  std::int64_t hypergeometric(std::int64_t population, std::int64_t marked,
                              std::int64_t draws);

  /// Splits n items over len(probs)+1 cells: out[k] ~ multinomial given
  /// probs, the remainder (n - sum(out)) is the residual cell. Requires
  /// sum(probs) <= 1. out must have probs.size() entries.
  void multinomial(std::int64_t n, std::span<const double> probs,
                   std::span<std::int64_t> out);

 private:
  std::int64_t binomial_inverse(std::int64_t n, double p);
  std::int64_t poisson_inverse(double mean);

  std::uint64_t state_;
};

}  // namespace oarc

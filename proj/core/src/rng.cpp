#include "oarc/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace oarc {
namespace {

constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t combine(std::uint64_t h, std::uint64_t v) {
  return mix64(h ^ (v + kGamma + (h << 6) + (h >> 2)));
}

}  // namespace

RngStream RngStream::keyed(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                           std::uint64_t c, std::uint64_t d) {
  std::uint64_t h = mix64(seed + kGamma);
  h = combine(h, a);
  h = combine(h, b);
  h = combine(h, c);
  h = combine(h, d);
  return RngStream(h);
}

std::uint64_t RngStream::next_u64() {
  state_ += kGamma;
  return mix64(state_);
}

double RngStream::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
  return lo + (hi - lo) * next_double();
}

std::int64_t RngStream::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw std::invalid_argument("uniform_int: empty range");
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  // Rejection to avoid modulo bias.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  std::uint64_t r;
  do {
    r = next_u64();
  } while (r >= limit);
  return lo + static_cast<std::int64_t>(r % span);
}

double RngStream::normal() {
  // Marsaglia polar method; one variate per call, spare discarded.
  double u, v, s;
  do {
    u = 2.0 * next_double() - 1.0;
    v = 2.0 * next_double() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  return u * std::sqrt(-2.0 * std::log(s) / s);
}

double RngStream::gamma(double shape) {
  if (shape <= 0.0) throw std::invalid_argument("gamma: shape must be > 0");
  if (shape < 1.0) {
    // Boost: Gamma(a) = Gamma(a+1) * U^{1/a}.
    const double u = next_double();
    return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = next_double();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double RngStream::beta(double a, double b) {
  const double x = gamma(a);
  const double y = gamma(b);
  return x / (x + y);
}

double RngStream::pareto(double scale, double shape) {
  if (scale <= 0.0 || shape <= 0.0)
    throw std::invalid_argument("pareto: scale and shape must be > 0");
  double u;
  do {
    u = next_double();
  } while (u == 0.0);
  return scale * std::pow(u, -1.0 / shape);
}

double RngStream::exponential(double rate) {
  double u;
  do {
    u = next_double();
  } while (u == 0.0);
  return -std::log(u) / rate;
}

std::int64_t RngStream::binomial_inverse(std::int64_t n, double p) {
  // Sequential inverse-CDF; expected work O(np).
  const double q = 1.0 - p;
  double pmf = std::pow(q, static_cast<double>(n));
  if (pmf <= 0.0) {
    // n ln q underflowed; fall back to counting successes by blocks.
    std::int64_t count = 0;
    for (std::int64_t i = 0; i < n; ++i) count += (next_double() < p);
    return count;
  }
  double cdf = pmf;
  const double u = next_double();
  std::int64_t k = 0;
  while (u > cdf && k < n) {
    ++k;
    pmf *= (static_cast<double>(n - k + 1) / static_cast<double>(k)) * (p / q);
    cdf += pmf;
  }
  return k;
}

std::int64_t RngStream::binomial(std::int64_t n, double p) {
  if (n < 0) throw std::invalid_argument("binomial: n must be >= 0");
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("binomial: p out of [0,1]");
  if (n == 0 || p == 0.0) return 0;
  if (p == 1.0) return n;
  if (p > 0.5) return n - binomial(n, 1.0 - p);
  std::int64_t base = 0;
  // Order-statistic recursion (Devroye): split on the median uniform, which
  // is Beta(i, n+1-i) distributed, until n is small enough for inversion.
  while (n > 64 && n * p > 16.0) {
    const std::int64_t i = (n + 1) / 2;
    const double v = beta(static_cast<double>(i), static_cast<double>(n + 1 - i));
    if (v <= p) {
      base += i;
      p = (p - v) / (1.0 - v);
      n -= i;
    } else {
      p = p / v;
      n = i - 1;
    }
    if (p <= 0.0) return base;
    if (p >= 1.0) return base + n;
  }
  return base + binomial_inverse(n, p);
}

std::int64_t RngStream::poisson_inverse(double mean) {
  double pmf = std::exp(-mean);
  double cdf = pmf;
  const double u = next_double();
  std::int64_t k = 0;
  while (u > cdf) {
    ++k;
    pmf *= mean / static_cast<double>(k);
    cdf += pmf;
    if (k > 10000000) break;  // unreachable for mean <= 64
  }
  return k;
}

std::int64_t RngStream::poisson(double mean) {
  if (mean < 0.0) throw std::invalid_argument("poisson: mean must be >= 0");
  if (mean == 0.0) return 0;
  std::int64_t base = 0;
  // Gamma-arrival recursion: the m-th arrival time of a unit Poisson process
  // is Gamma(m). Condition on it landing before or after `mean`.
  while (mean > 64.0) {
    const std::int64_t m = static_cast<std::int64_t>(0.875 * mean);
    const double g = gamma(static_cast<double>(m));
    if (g <= mean) {
      base += m;
      mean -= g;
    } else {
      return base + binomial(m - 1, mean / g);
    }
  }
  return base + poisson_inverse(mean);
}

std::int64_t RngStream::hypergeometric(std::int64_t population, std::int64_t marked,
                                       std::int64_t draws) {
  if (marked > population || draws > population || marked < 0 || draws < 0)
    throw std::invalid_argument("hypergeometric: invalid parameters");
  if (draws == 0 || marked == 0) return 0;
  if (draws > population / 2) {
    // Complement on draws keeps the inversion loop short.
    return marked - hypergeometric(population, marked, population - draws);
  }
  const std::int64_t lo = std::max<std::int64_t>(0, draws + marked - population);
  const std::int64_t hi = std::min(draws, marked);
  // pmf at lo via log-factorials would be overkill at library scale; build the
  // unnormalized recurrence and normalize on the fly.
  std::vector<double> pmf(static_cast<std::size_t>(hi - lo + 1));
  pmf[0] = 1.0;
  double total = 1.0;
  for (std::int64_t k = lo; k < hi; ++k) {
    const double ratio =
        static_cast<double>(marked - k) * static_cast<double>(draws - k) /
        (static_cast<double>(k + 1) *
         static_cast<double>(population - marked - draws + k + 1));
    pmf[static_cast<std::size_t>(k - lo + 1)] =
        pmf[static_cast<std::size_t>(k - lo)] * ratio;
    total += pmf[static_cast<std::size_t>(k - lo + 1)];
  }
  double u = next_double() * total;
  for (std::int64_t k = lo; k <= hi; ++k) {
    u -= pmf[static_cast<std::size_t>(k - lo)];
    if (u <= 0.0) return k;
  }
  return hi;
}

void RngStream::multinomial(std::int64_t n, std::span<const double> probs,
                            std::span<std::int64_t> out) {
  if (out.size() != probs.size())
    throw std::invalid_argument("multinomial: output size mismatch");
  double rest = 1.0;
  std::int64_t remaining = n;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    if (remaining == 0) {
      out[k] = 0;
      continue;
    }
    const double cond = rest > 0.0 ? std::min(1.0, probs[k] / rest) : 1.0;
    out[k] = binomial(remaining, cond);
    remaining -= out[k];
    rest -= probs[k];
  }
}

}  // namespace oarc

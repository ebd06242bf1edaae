#include "advlab/zeta.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace advlab {

namespace {

constexpr std::int64_t kPartialTerms = 1'000'000;

}  // namespace

long double zeta_tail(double gamma, long double j) {
  const long double g = gamma;
  const long double f = std::pow(j, -g);
  return j * f / (g - 1.0L) - f / 2.0L + g * f / (12.0L * j) -
         g * (g + 1.0L) * (g + 2.0L) * f / (720.0L * j * j * j);
}

ZetaSum zeta_sum(double gamma) {
  if (!(gamma > 1.0)) throw std::invalid_argument("zeta_sum requires gamma > 1");
  // Summed smallest-first to keep the long double error near one ulp.
  long double partial = 0.0L;
  for (std::int64_t i = kPartialTerms; i >= 1; --i) {
    partial += std::pow(static_cast<long double>(i), -static_cast<long double>(gamma));
  }
  const long double n = kPartialTerms;
  const long double g = gamma;
  ZetaSum out{};
  out.value = static_cast<double>(partial + zeta_tail(gamma, n));
  out.lower = static_cast<double>(partial + std::pow(n + 1.0L, 1.0L - g) / (g - 1.0L));
  out.upper = static_cast<double>(partial + std::pow(n, 1.0L - g) / (g - 1.0L));
  return out;
}

double zeta_normalizer(double gamma) {
  static std::mutex mutex;
  static std::map<double, double> cache;
  std::lock_guard lock(mutex);
  if (auto it = cache.find(gamma); it != cache.end()) return it->second;
  double value = 1.0 / zeta_sum(gamma).value;
  cache.emplace(gamma, value);
  return value;
}

ZetaDistribution::ZetaDistribution(double gamma) : gamma_(gamma) {
  if (!(gamma > 1.0 && gamma < 2.0)) throw std::invalid_argument("gamma must lie in (1, 2)");
  normalizer_ = zeta_normalizer(gamma);
  zeta_ = 1.0 / normalizer_;
  extend_to(1024);
}

void ZetaDistribution::extend_to(std::size_t pairs) {
  pairs = std::min(pairs, kHeadPairs);
  pair_cdf_.reserve(pairs);
  for (std::size_t j = pair_cdf_.size() + 1; j <= pairs; ++j) {
    running_sum_ += std::pow(static_cast<long double>(j), -static_cast<long double>(gamma_));
    pair_cdf_.push_back(static_cast<double>(running_sum_ / static_cast<long double>(zeta_)));
  }
}

double ZetaDistribution::mass(std::int64_t k) const {
  if (k < 1) return 0.0;
  const std::int64_t j = (k + 1) / 2;
  return 0.5 * normalizer_ * std::pow(static_cast<double>(j), -gamma_);
}

double ZetaDistribution::cdf(std::int64_t k) {
  if (k < 1) return 0.0;
  const std::int64_t j = (k + 1) / 2;
  const bool odd = (k % 2) == 1;
  if (static_cast<std::size_t>(j) <= kHeadPairs) {
    extend_to(std::max<std::size_t>(static_cast<std::size_t>(j), pair_cdf_.size()));
    const double below = j > 1 ? pair_cdf_[static_cast<std::size_t>(j) - 2] : 0.0;
    return odd ? below + mass(k) : pair_cdf_[static_cast<std::size_t>(j) - 1];
  }
  const long double tail = zeta_tail(gamma_, static_cast<long double>(j));
  const long double half = 0.5L * std::pow(static_cast<long double>(j), -static_cast<long double>(gamma_));
  return static_cast<double>(1.0L - normalizer_ * (odd ? tail + half : tail));
}

std::int64_t ZetaDistribution::quantile(double u) {
  if (!(u >= 0.0 && u < 1.0)) throw std::invalid_argument("quantile requires u in [0, 1)");
  while (pair_cdf_.back() <= u && pair_cdf_.size() < kHeadPairs) extend_to(pair_cdf_.size() * 2);
  if (pair_cdf_.back() <= u) return tail_quantile(u);

  auto it = std::upper_bound(pair_cdf_.begin(), pair_cdf_.end(), u);
  const auto j = static_cast<std::int64_t>(it - pair_cdf_.begin()) + 1;
  const double below = j > 1 ? pair_cdf_[static_cast<std::size_t>(j) - 2] : 0.0;
  return u < below + mass(2 * j - 1) ? 2 * j - 1 : 2 * j;
}

std::int64_t ZetaDistribution::tail_quantile(double u) const {
  // Smallest pair index j with tail(j) < t, where P(X > 2j) = C * tail(j).
  const long double t = (1.0L - static_cast<long double>(u)) / normalizer_;
  const long double g = gamma_;
  const long double guess = std::pow((g - 1.0L) * t, -1.0L / (g - 1.0L));
  if (!(guess < static_cast<long double>(kMaxPairIndex) / 4)) return 2 * kMaxPairIndex;

  auto lo = std::max<std::int64_t>(static_cast<std::int64_t>(kHeadPairs), static_cast<std::int64_t>(guess / 2) - 1);
  auto hi = static_cast<std::int64_t>(guess * 2) + 2;
  while (zeta_tail(gamma_, static_cast<long double>(hi)) >= t) hi *= 2;
  // Invariant: tail(lo) >= t > tail(hi), unless lo is already below the answer.
  if (zeta_tail(gamma_, static_cast<long double>(lo)) < t) {
    lo = static_cast<std::int64_t>(kHeadPairs);
  }
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (zeta_tail(gamma_, static_cast<long double>(mid)) < t) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  const std::int64_t j = hi;
  const long double half = 0.5L * std::pow(static_cast<long double>(j), -g);
  return t > zeta_tail(gamma_, static_cast<long double>(j)) + half ? 2 * j - 1 : 2 * j;
}

}  // namespace advlab

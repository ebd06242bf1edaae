#ifndef ADVLAB_ZETA_HPP_
#define ADVLAB_ZETA_HPP_

#include <cstdint>
#include <vector>

#include "advlab/rng.hpp"

namespace advlab {

/// zeta(gamma) = sum_j j^-gamma from a 10^6-term partial sum plus a tail
/// that is bracketed by the integrals over [N+1, inf) and [N, inf).
struct ZetaSum {
  double value;  // partial sum + Euler-Maclaurin tail (inside the bracket)
  double lower;  // partial sum + integral from N+1
  double upper;  // partial sum + integral from N
};

ZetaSum zeta_sum(double gamma);

/// C_zeta(gamma) = 1 / zeta(gamma).
double zeta_normalizer(double gamma);

/// sum_{i > j} i^-gamma via Euler-Maclaurin; accurate for j >= 1000.
long double zeta_tail(double gamma, long double j);

/// Distribution P on k = 1, 2, ... with p_{2j-1} = p_{2j} = C_zeta(gamma) j^-gamma / 2.
///
/// Sampling is by inverse CDF. Partial sums of the pair masses are tabulated
/// lazily (doubling) up to a fixed head; beyond the head the CDF is inverted
/// through the Euler-Maclaurin tail, so no truncation is needed. The table
/// grows on demand and is not synchronised: give each thread its own copy.
class ZetaDistribution {
 public:
  explicit ZetaDistribution(double gamma);

  double gamma() const { return gamma_; }
  double normalizer() const { return normalizer_; }

  /// p_k.
  double mass(std::int64_t k) const;

  /// P(X <= k).
  double cdf(std::int64_t k);

  /// Smallest k with P(X <= k) > u, for u in [0, 1).
  std::int64_t quantile(double u);

  std::int64_t sample(Rng& rng) { return quantile(uniform01(rng)); }

  /// Tabulates the whole head so later sampling never writes. A prepared
  /// object may be copied into worker threads cheaply.
  void prepare() { extend_to(kHeadPairs); }

  /// Number of tabulated pair partial sums.
  std::size_t table_size() const { return pair_cdf_.size(); }

  static constexpr std::size_t kHeadPairs = std::size_t{1} << 20;
  static constexpr std::int64_t kMaxPairIndex = std::int64_t{1} << 61;

 private:
  void extend_to(std::size_t pairs);
  std::int64_t tail_quantile(double u) const;

  double gamma_;
  double zeta_;
  double normalizer_;
  long double running_sum_ = 0.0L;
  // pair_cdf_[j-1] = C * sum_{i <= j} i^-gamma = P(X <= 2j).
  std::vector<double> pair_cdf_;
};

}  // namespace advlab

#endif  // ADVLAB_ZETA_HPP_

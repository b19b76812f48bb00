#pragma once

// Log-domain primitives. All logarithms are natural.

#include <cstdint>
#include <limits>
#include <span>

namespace bregret {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();

// A quantity on the natural-log scale. -inf encodes exact zero mass; +inf and
// NaN are rejected at construction.
class LogWeight {
 public:
  constexpr LogWeight() = default;
  explicit LogWeight(double value);

  static constexpr LogWeight zero() { return LogWeight(Raw{}, kNegInf); }
  static constexpr LogWeight one() { return LogWeight(Raw{}, 0.0); }

  constexpr double value() const { return value_; }
  double probability() const;
  constexpr bool is_zero() const { return value_ == kNegInf; }

  friend constexpr auto operator<=>(LogWeight, LogWeight) = default;

 private:
  struct Raw {};
  constexpr LogWeight(Raw, double v) : value_(v) {}
  double value_ = kNegInf;
};

// Below this distance from 1 a Renyi order is evaluated as KL divergence:
// 1/(alpha - 1) cancels catastrophically there.
inline constexpr double kRenyiKlCutoff = 1e-6;

inline bool renyi_uses_kl(double alpha) { return alpha - 1.0 < kRenyiKlCutoff; }

// log sum_i exp(terms_i) with max-shift stabilization; empty input gives -inf.
LogWeight log_sum_exp(std::span<const double> terms);
LogWeight log_sum_exp(std::span<const LogWeight> terms);

// log C(n, k) via log-gamma.
LogWeight log_binomial(std::int64_t n, std::int64_t k);

// log of total! / prod_s counts[s]!.
double log_multinomial(std::span<const int> counts);

// sum p log(p/q) with 0 log 0 = 0; +inf when p is not absolutely continuous w.r.t. q.
double kl_divergence(std::span<const double> p, std::span<const double> q);

// Renyi divergence of order alpha >= 1. Orders within kRenyiKlCutoff of 1 use the
// KL branch; alpha = +inf gives log max p/q.
double renyi_divergence(std::span<const double> p, std::span<const double> q, double alpha);

}  // namespace bregret

#include "bregret/log_math.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "bregret/error.hpp"
#include "bregret/kernels.hpp"

namespace bregret {

LogWeight::LogWeight(double value) : value_(value) {
  if (std::isnan(value) || value == kPosInf) {
    throw DomainError("LogWeight: value must be finite or -inf, got " + std::to_string(value));
  }
}

double LogWeight::probability() const { return std::exp(value_); }

LogWeight log_sum_exp(std::span<const double> terms) {
  const double shift = kernels::reduce_max(terms);
  if (shift == kNegInf) return LogWeight::zero();
  if (std::isnan(shift) || shift == kPosInf) {
    throw DomainError("log_sum_exp: +inf or NaN term");
  }
  return LogWeight(shift + std::log(kernels::sum_exp_shifted(terms, shift)));
}

LogWeight log_sum_exp(std::span<const LogWeight> terms) {
  std::vector<double> raw;
  raw.reserve(terms.size());
  for (const LogWeight& t : terms) raw.push_back(t.value());
  return log_sum_exp(raw);
}

LogWeight log_binomial(std::int64_t n, std::int64_t k) {
  if (n < 0 || k < 0 || k > n) {
    throw DomainError("log_binomial: need 0 <= k <= n, got n=" + std::to_string(n) +
                      " k=" + std::to_string(k));
  }
  if (k == 0 || k == n) return LogWeight::one();
  const double nn = static_cast<double>(n);
  const double kk = static_cast<double>(k);
  return LogWeight(std::lgamma(nn + 1.0) - std::lgamma(kk + 1.0) - std::lgamma(nn - kk + 1.0));
}

double log_multinomial(std::span<const int> counts) {
  double total = 0.0;
  double result = 0.0;
  for (int c : counts) {
    if (c < 0) throw DomainError("log_multinomial: negative count");
    total += c;
    result -= std::lgamma(c + 1.0);
  }
  return result + std::lgamma(total + 1.0);
}

namespace {

void require_same_support(std::span<const double> p, std::span<const double> q,
                          const char* where) {
  if (p.size() != q.size()) {
    throw DomainError(std::string(where) + ": support lengths differ (" +
                      std::to_string(p.size()) + " vs " + std::to_string(q.size()) + ")");
  }
}

}  // namespace

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  require_same_support(p, q, "kl_divergence");
  double sum = 0.0;
  for (std::size_t y = 0; y < p.size(); ++y) {
    if (p[y] <= 0.0) continue;
    if (q[y] <= 0.0) return kPosInf;
    sum += p[y] * (std::log(p[y]) - std::log(q[y]));
  }
  return sum < 0.0 ? 0.0 : sum;
}

double renyi_divergence(std::span<const double> p, std::span<const double> q, double alpha) {
  require_same_support(p, q, "renyi_divergence");
  if (std::isnan(alpha) || alpha < 1.0) {
    throw DomainError("renyi_divergence: order must be >= 1, got " + std::to_string(alpha));
  }
  if (renyi_uses_kl(alpha)) return kl_divergence(p, q);

  if (alpha == kPosInf) {
    double best = kNegInf;
    for (std::size_t y = 0; y < p.size(); ++y) {
      if (p[y] <= 0.0) continue;
      if (q[y] <= 0.0) return kPosInf;
      best = std::max(best, std::log(p[y]) - std::log(q[y]));
    }
    return std::max(best, 0.0);
  }

  std::vector<double> terms;
  terms.reserve(p.size());
  for (std::size_t y = 0; y < p.size(); ++y) {
    if (p[y] <= 0.0) continue;
    if (q[y] <= 0.0) return kPosInf;
    const double log_p = std::log(p[y]);
    terms.push_back(log_p + (alpha - 1.0) * (log_p - std::log(q[y])));
  }
  const double value = log_sum_exp(terms).value() / (alpha - 1.0);
  return value < 0.0 ? 0.0 : value;
}

}  // namespace bregret

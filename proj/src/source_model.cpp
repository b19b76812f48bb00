#include "bregret/source_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "bregret/error.hpp"
#include "bregret/kernels.hpp"
#include "bregret/prior.hpp"

namespace bregret {
namespace {

constexpr double kSimplexTolerance = 1e-12;

std::uint64_t binomial_u64(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) result = result * (n - k + i) / i;
  return result;
}

std::string format_number(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.10g", v);
  return buffer;
}

}  // namespace

void validate_distribution(std::span<const double> theta, std::size_t alphabet_size) {
  if (theta.size() != alphabet_size) {
    throw DomainError("distribution has " + std::to_string(theta.size()) +
                      " entries, expected " + std::to_string(alphabet_size));
  }
  double sum = 0.0;
  for (double v : theta) {
    if (!(v >= 0.0) || v > 1.0) throw DomainError("distribution entry outside [0, 1]");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kSimplexTolerance) {
    throw DomainError("distribution sums to " + format_number(sum) + ", not 1");
  }
}

// --- ParamGrid -------------------------------------------------------------

ParamGrid::ParamGrid(std::size_t alphabet_size, std::vector<Distribution> points)
    : alphabet_size_(alphabet_size), points_(std::move(points)) {
  if (alphabet_size_ < 2) throw DomainError("ParamGrid: alphabet size must be >= 2");
  if (points_.empty()) throw DomainError("ParamGrid: no points");
  for (const Distribution& p : points_) validate_distribution(p, alphabet_size_);
  for (std::size_t a = 0; a < points_.size(); ++a) {
    for (std::size_t b = a + 1; b < points_.size(); ++b) {
      double l1 = 0.0;
      for (std::size_t s = 0; s < alphabet_size_; ++s) l1 += std::abs(points_[a][s] - points_[b][s]);
      if (l1 <= kSimplexTolerance) {
        throw DomainError("ParamGrid: points " + std::to_string(a) + " and " + std::to_string(b) +
                          " coincide");
      }
    }
  }
  log_columns_.assign(alphabet_size_, std::vector<double>(points_.size()));
  for (std::size_t j = 0; j < points_.size(); ++j) {
    for (std::size_t s = 0; s < alphabet_size_; ++s) {
      log_columns_[s][j] = points_[j][s] > 0.0 ? std::log(points_[j][s]) : kNegInf;
    }
  }
}

ParamGrid ParamGrid::binary(std::span<const double> ones_probabilities) {
  std::vector<Distribution> points;
  points.reserve(ones_probabilities.size());
  for (double theta : ones_probabilities) points.push_back({1.0 - theta, theta});
  return ParamGrid(2, std::move(points));
}

ParamGrid ParamGrid::uniform_binary(std::size_t count, double lo, double hi) {
  if (count == 0) throw DomainError("uniform_binary: need at least one point");
  if (!(lo >= 0.0 && hi <= 1.0 && lo <= hi)) {
    throw DomainError("uniform_binary: need 0 <= lo <= hi <= 1");
  }
  std::vector<double> thetas(count);
  for (std::size_t j = 0; j < count; ++j) {
    thetas[j] = count == 1 ? lo
                           : lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(count - 1);
  }
  return binary(thetas);
}

std::string ParamGrid::repr(std::size_t j) const {
  const Distribution& p = points_[j];
  if (alphabet_size_ == 2) return format_number(p[1]);
  std::string out = "(";
  for (std::size_t s = 0; s < p.size(); ++s) {
    if (s > 0) out += ';';
    out += format_number(p[s]);
  }
  return out + ")";
}

void validate(const BatchSetup& setup) {
  if (setup.n < 0) throw DomainError("BatchSetup: n must be >= 0");
  if (setup.ell < 1) throw DomainError("BatchSetup: ell must be >= 1");
  if (setup.alphabet_size < 2) throw DomainError("BatchSetup: alphabet size must be >= 2");
}

// --- CountStat -------------------------------------------------------------

CountStat::CountStat(std::vector<int> counts) : counts_(std::move(counts)) {
  for (int c : counts_) {
    if (c < 0) throw DomainError("CountStat: negative count");
    total_ += c;
  }
}

CountStat CountStat::empty(std::size_t alphabet_size) {
  return CountStat(std::vector<int>(alphabet_size, 0));
}

CountStat CountStat::of_sequence(std::span<const int> symbols, std::size_t alphabet_size) {
  std::vector<int> counts(alphabet_size, 0);
  for (int s : symbols) {
    if (s < 0 || static_cast<std::size_t>(s) >= alphabet_size) {
      throw DomainError("CountStat: symbol outside alphabet");
    }
    ++counts[static_cast<std::size_t>(s)];
  }
  return CountStat(std::move(counts));
}

CountStat CountStat::operator+(const CountStat& other) const {
  if (other.alphabet_size() != alphabet_size()) {
    throw DomainError("CountStat: adding stats over different alphabets");
  }
  std::vector<int> sum(counts_);
  for (std::size_t s = 0; s < sum.size(); ++s) sum[s] += other.counts_[s];
  return CountStat(std::move(sum));
}

namespace {

void enumerate_into(int remaining, std::size_t position, std::vector<int>& current,
                    std::vector<CountStat>& out) {
  if (position + 1 == current.size()) {
    current[position] = remaining;
    out.emplace_back(current);
    return;
  }
  for (int v = 0; v <= remaining; ++v) {
    current[position] = v;
    enumerate_into(remaining - v, position + 1, current, out);
  }
}

}  // namespace

std::vector<CountStat> enumerate_counts(int total, std::size_t alphabet_size) {
  if (total < 0) throw DomainError("enumerate_counts: negative total");
  if (alphabet_size < 1) throw DomainError("enumerate_counts: empty alphabet");
  std::vector<CountStat> out;
  out.reserve(binomial_u64(static_cast<std::uint64_t>(total) + alphabet_size - 1, alphabet_size - 1));
  std::vector<int> current(alphabet_size, 0);
  enumerate_into(total, 0, current, out);
  return out;
}

// --- CountSpace ------------------------------------------------------------

CountSpace::CountSpace(int total, std::size_t alphabet_size)
    : total_(total), alphabet_size_(alphabet_size), classes_(enumerate_counts(total, alphabet_size)) {
  log_multiplicity_.reserve(classes_.size());
  count_columns_.assign(alphabet_size_, std::vector<double>(classes_.size()));
  for (std::size_t i = 0; i < classes_.size(); ++i) {
    log_multiplicity_.push_back(log_multinomial(classes_[i].counts()));
    for (std::size_t s = 0; s < alphabet_size_; ++s) count_columns_[s][i] = classes_[i][s];
  }
}

std::size_t CountSpace::index_of(const CountStat& stat) const {
  if (stat.alphabet_size() != alphabet_size_ || stat.total() != total_) {
    throw DomainError("CountSpace::index_of: stat does not belong to this space");
  }
  std::uint64_t rank = 0;
  std::uint64_t remaining = static_cast<std::uint64_t>(total_);
  for (std::size_t i = 0; i + 1 < alphabet_size_; ++i) {
    const std::uint64_t tail_parts = alphabet_size_ - i - 1;
    for (std::uint64_t v = 0; v < static_cast<std::uint64_t>(stat[i]); ++v) {
      rank += binomial_u64(remaining - v + tail_parts - 1, tail_parts - 1);
    }
    remaining -= static_cast<std::uint64_t>(stat[i]);
  }
  return static_cast<std::size_t>(rank);
}

std::vector<double> CountSpace::log_likelihoods(std::span<const double> theta) const {
  if (theta.size() != alphabet_size_) throw DomainError("log_likelihoods: alphabet mismatch");
  std::vector<double> out(classes_.size(), 0.0);
  for (std::size_t s = 0; s < alphabet_size_; ++s) {
    const double log_p = theta[s] > 0.0 ? std::log(theta[s]) : kNegInf;
    if (log_p == 0.0) continue;
    kernels::add_scaled(out, count_columns_[s], log_p);
  }
  return out;
}

std::vector<double> CountSpace::count_weights(std::span<const double> theta) const {
  std::vector<double> out = log_likelihoods(theta);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += log_multiplicity_[i];
  return out;
}

// --- free functions ----------------------------------------------------------

LogWeight log_likelihood(std::span<const double> theta, const CountStat& stat) {
  if (theta.size() != stat.alphabet_size()) throw DomainError("log_likelihood: alphabet mismatch");
  double sum = 0.0;
  for (std::size_t s = 0; s < theta.size(); ++s) {
    if (stat[s] == 0) continue;
    if (theta[s] <= 0.0) return LogWeight::zero();
    sum += stat[s] * std::log(theta[s]);
  }
  return LogWeight(sum);
}

LogWeight count_weight(std::span<const double> theta, const CountStat& stat) {
  const LogWeight ll = log_likelihood(theta, stat);
  if (ll.is_zero()) return ll;
  return LogWeight(log_multinomial(stat.counts()) + ll.value());
}

std::vector<double> log_joint_evidence(const Prior& prior, const CountStat& training) {
  const ParamGrid& grid = prior.grid();
  if (training.alphabet_size() != grid.alphabet_size()) {
    throw DomainError("posterior: training stat alphabet does not match the grid");
  }
  std::vector<double> log_mass = prior.log_weights();
  for (std::size_t s = 0; s < grid.alphabet_size(); ++s) {
    if (training[s] == 0) continue;
    kernels::add_scaled(log_mass, grid.log_column(s), static_cast<double>(training[s]));
  }
  return log_mass;
}

Prior posterior(const Prior& prior, const CountStat& training) {
  const std::vector<double> log_mass = log_joint_evidence(prior, training);
  if (log_sum_exp(log_mass).is_zero()) {
    throw DegenerateEvidenceError(
        "posterior: every grid point with positive prior weight assigns zero likelihood");
  }
  return Prior::from_log_mass(prior.grid_ptr(), log_mass);
}

}  // namespace bregret

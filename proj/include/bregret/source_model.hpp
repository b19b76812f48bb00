#pragma once

// Parametric i.i.d. source class, batch geometry, and the count-class
// (sufficient statistic) reduction for exchangeable sources.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "bregret/log_math.hpp"

namespace bregret {

using Distribution = std::vector<double>;

// Finite discretization of the parameter space. Each point is a distribution
// over alphabet_size symbols; points keep the order they were given in.
class ParamGrid {
 public:
  ParamGrid(std::size_t alphabet_size, std::vector<Distribution> points);

  // Binary grid from values of P(symbol 1).
  static ParamGrid binary(std::span<const double> ones_probabilities);
  // count equally spaced binary points on [lo, hi] (count == 1 gives {lo}).
  static ParamGrid uniform_binary(std::size_t count, double lo, double hi);

  std::size_t alphabet_size() const { return alphabet_size_; }
  std::size_t size() const { return points_.size(); }
  std::span<const double> point(std::size_t j) const { return points_[j]; }
  const std::vector<Distribution>& points() const { return points_; }

  // log theta_j(symbol) across the grid, laid out contiguously for the kernels.
  std::span<const double> log_column(std::size_t symbol) const { return log_columns_[symbol]; }

  // Short human-readable label: "0.25" for binary points, "(0.2;0.3;0.5)" otherwise.
  std::string repr(std::size_t j) const;

 private:
  std::size_t alphabet_size_;
  std::vector<Distribution> points_;
  std::vector<std::vector<double>> log_columns_;
};

using GridPtr = std::shared_ptr<const ParamGrid>;

// n training batches of ell samples each, plus one test batch of ell samples.
struct BatchSetup {
  int n = 0;
  int ell = 1;
  int alphabet_size = 2;

  // t = n * ell, the training length. n == 0 means no conditioning.
  int training_length() const { return n * ell; }

  friend bool operator==(const BatchSetup&, const BatchSetup&) = default;
};

void validate(const BatchSetup& setup);

// Symbol occurrence counts of a sequence.
class CountStat {
 public:
  CountStat() = default;
  explicit CountStat(std::vector<int> counts);

  static CountStat empty(std::size_t alphabet_size);
  static CountStat of_sequence(std::span<const int> symbols, std::size_t alphabet_size);

  std::span<const int> counts() const { return counts_; }
  int operator[](std::size_t s) const { return counts_[s]; }
  int total() const { return total_; }
  std::size_t alphabet_size() const { return counts_.size(); }

  CountStat operator+(const CountStat& other) const;
  friend bool operator==(const CountStat&, const CountStat&) = default;

 private:
  std::vector<int> counts_;
  int total_ = 0;
};

// All compositions of total into alphabet_size nonnegative parts, lexicographic
// (first coordinate ascending).
std::vector<CountStat> enumerate_counts(int total, std::size_t alphabet_size);

// The enumerated count classes of one length together with their multinomial
// multiplicities and per-symbol count columns.
class CountSpace {
 public:
  CountSpace(int total, std::size_t alphabet_size);

  int total() const { return total_; }
  std::size_t alphabet_size() const { return alphabet_size_; }
  std::size_t size() const { return classes_.size(); }
  const CountStat& operator[](std::size_t i) const { return classes_[i]; }
  const std::vector<CountStat>& classes() const { return classes_; }

  // Number of sequences in each class, in log scale.
  std::span<const double> log_multiplicity() const { return log_multiplicity_; }
  // counts[s] of every class, as doubles.
  std::span<const double> count_column(std::size_t symbol) const { return count_columns_[symbol]; }

  // Position of stat in the enumeration order.
  std::size_t index_of(const CountStat& stat) const;

  // Per-sequence log p_theta for every class (no multiplicity).
  std::vector<double> log_likelihoods(std::span<const double> theta) const;
  // log P_theta(class) = log multiplicity + per-sequence log-likelihood.
  std::vector<double> count_weights(std::span<const double> theta) const;

 private:
  int total_;
  std::size_t alphabet_size_;
  std::vector<CountStat> classes_;
  std::vector<double> log_multiplicity_;
  std::vector<std::vector<double>> count_columns_;
};

// Throws DomainError unless theta is a distribution over alphabet_size symbols.
void validate_distribution(std::span<const double> theta, std::size_t alphabet_size);

// log of the probability of one specific sequence with the given counts.
LogWeight log_likelihood(std::span<const double> theta, const CountStat& stat);

// log of the total probability of the count class (multinomial factor included).
LogWeight count_weight(std::span<const double> theta, const CountStat& stat);

class Prior;

// Bayes update of prior by i.i.d. evidence summarized in training.
Prior posterior(const Prior& prior, const CountStat& training);

// log w(theta_j) + log p_theta_j(training) for every grid point (unnormalized).
std::vector<double> log_joint_evidence(const Prior& prior, const CountStat& training);

}  // namespace bregret

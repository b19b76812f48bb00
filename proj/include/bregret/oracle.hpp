#pragma once

// Brute-force reference implementations for tiny instances. Everything here
// enumerates individual sequences (or the prior simplex) and sums raw
// probabilities in long double; none of it goes through the log-domain
// kernels, so it can validate the count-class fast paths.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "bregret/predictors.hpp"
#include "bregret/prior.hpp"
#include "bregret/source_model.hpp"

namespace bregret::oracle {

// Upper bound on m^(n*ell + ell), the number of (training, test) sequence pairs.
inline constexpr std::uint64_t kSequenceLimit = 4096;

// Throws SizeGuardError when setup exceeds kSequenceLimit.
void check_size_guard(const BatchSetup& setup);

// Dense joint law w(theta) p_theta(x^n) p_theta(y) over
// (grid index, training sequence, test sequence).
class JointTable {
 public:
  JointTable(const Prior& prior, const BatchSetup& setup);

  std::size_t grid_size() const { return grid_size_; }
  std::size_t training_sequences() const { return training_sequences_; }
  std::size_t test_sequences() const { return test_sequences_; }

  long double operator()(std::size_t j, std::size_t x, std::size_t y) const {
    return entries_[(j * training_sequences_ + x) * test_sequences_ + y];
  }
  long double total() const;

  // p_theta_j(y) of one test sequence.
  long double test_probability(std::size_t j, std::size_t y) const {
    return test_prob_[j * test_sequences_ + y];
  }

 private:
  std::size_t grid_size_;
  std::size_t training_sequences_;
  std::size_t test_sequences_;
  std::vector<long double> entries_;
  std::vector<long double> test_prob_;
};

// Symbols of sequence number `index` (base-m digits, first symbol most significant).
std::vector<int> decode_sequence(std::uint64_t index, int length, int alphabet_size);

// p(y | x^n) for every (training sequence, test sequence), evaluated from the
// predictor's definition on sequences. Indexed [x * m^ell + y].
std::vector<long double> conditional_table(const Predictor& pred);

double oracle_batch_regret(const Predictor& pred, std::span<const double> theta);
double oracle_alpha_batch_regret(const Predictor& pred, std::span<const double> theta,
                                 double alpha);
double oracle_worst_case_regret(const Predictor& pred, std::span<const double> theta);

// Textbook I(theta; Y | X^n) from the joint table.
double oracle_cond_mi(const Prior& prior, const BatchSetup& setup);

struct SibsonMinResult {
  double value;           // closed-form minimizer route
  double gradient_value;  // projected-gradient route
  // Minimizing test distributions per training sequence, [x][y].
  std::vector<std::vector<double>> minimizers;
  std::vector<std::vector<double>> gradient_minimizers;
  double max_minimizer_gap;  // max |closed - gradient| over all entries
  double max_stationarity;   // worst relative gradient spread reached
  bool stationary;           // max_stationarity <= 1e-9
};

// min over predictors of D_alpha(Y || Yhat | theta, X^n), alpha > 1, minimized
// separately per training sequence by two independent routes.
SibsonMinResult oracle_sibson_min(const Prior& prior, double alpha, const BatchSetup& setup);

struct CapacitySearchResult {
  double value;
  std::vector<double> weights;
};

// Exhaustive search over the prior simplex on a lattice of spacing `step`
// (|grid| <= 3, step <= 1e-2) for sup_w I_w (alpha = 1) or sup_w I_alpha^w.
CapacitySearchResult oracle_capacity(const ParamGrid& grid, const BatchSetup& setup, double alpha,
                                     double step);

}  // namespace bregret::oracle

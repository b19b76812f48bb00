#pragma once

// Conditional batch predictors p(y | x^n): Bayes mixture, add-beta, alpha-NML.
//
// Every predictor in scope depends on the training data only through its
// count class and assigns a test sequence a probability that depends only on
// its counts, so a predictor is stored as a table of per-sequence
// log-probabilities indexed by (training class, test class). The table is
// filled once, single-threaded, when the Predictor is constructed; afterwards
// the object is immutable and may be read from any number of threads.

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "bregret/log_math.hpp"
#include "bregret/prior.hpp"
#include "bregret/source_model.hpp"

namespace bregret {

struct MixtureSpec {
  Prior prior;
};

struct AddBetaSpec {
  double beta;
};

struct AlphaNmlSpec {
  Prior prior;
  double alpha;
};

using PredictorSpec = std::variant<MixtureSpec, AddBetaSpec, AlphaNmlSpec>;

class PredictionTable {
 public:
  PredictionTable(int training_total, int test_total, std::size_t alphabet_size);

  const CountSpace& training() const { return training_; }
  const CountSpace& test() const { return test_; }

  // log p(one sequence of test class k | training class i) for all k.
  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * test_.size(), test_.size()};
  }
  std::span<double> mutable_row(std::size_t i) {
    return {values_.data() + i * test_.size(), test_.size()};
  }
  double at(std::size_t i, std::size_t k) const { return values_[i * test_.size() + k]; }

  // False when the predictor is undefined on training class i (no grid point
  // with prior mass can produce it).
  bool row_defined(std::size_t i) const { return defined_[i] != 0; }
  void mark_undefined(std::size_t i) { defined_[i] = 0; }

 private:
  CountSpace training_;
  CountSpace test_;
  std::vector<double> values_;
  std::vector<unsigned char> defined_;
};

class Predictor {
 public:
  static Predictor mixture(Prior prior, const BatchSetup& setup);
  static Predictor add_beta(double beta, const BatchSetup& setup);
  static Predictor alpha_nml(Prior prior, double alpha, const BatchSetup& setup);

  const PredictorSpec& spec() const { return spec_; }
  const BatchSetup& setup() const { return setup_; }
  const PredictionTable& table() const { return *table_; }

  // Per-sequence log-probability of a test sequence with counts `test`.
  LogWeight log_prob(const CountStat& training, const CountStat& test) const;

  // False for add-beta outside [1/2, 1], where no minimax guarantee is claimed.
  bool certified() const;

  std::string describe() const;

 private:
  Predictor(PredictorSpec spec, const BatchSetup& setup);

  PredictorSpec spec_;
  BatchSetup setup_;
  std::shared_ptr<const PredictionTable> table_;
};

// log of sum_j w(theta_j | training) p_theta_j(test sequence).
LogWeight mixture_predict(const Prior& prior, const CountStat& training, const CountStat& test);

// Sequential add-beta rule on a binary test sequence (symbols 0/1).
LogWeight add_beta_predict(double beta, const CountStat& training,
                           std::span<const int> test_sequence);

// Same value from the test counts alone.
LogWeight add_beta_predict_counts(double beta, const CountStat& training, const CountStat& test);

bool add_beta_in_certified_range(double beta);

// Conditional alpha-NML: normalized alpha-power mean of the posterior.
LogWeight alpha_nml_predict(const Prior& prior, double alpha, const CountStat& training,
                            const CountStat& test);

// Symmetric Dirichlet(beta) prior on a binary grid realized by the
// Gauss-Jacobi rule with exponents (beta - 1, beta - 1).
Prior dirichlet_quadrature(double beta, std::size_t grid_size);

}  // namespace bregret

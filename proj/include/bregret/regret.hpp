#pragma once

// Exact batch regret, batch alpha-regret and worst-case regret of a predictor
// against a source, summed over count classes rather than sequences.
//
// A predictor that gives zero mass to an outcome the source can produce has
// regret +inf; that is a value, not an error.

#include <cstddef>
#include <span>
#include <vector>

#include "bregret/predictors.hpp"
#include "bregret/source_model.hpp"

namespace bregret {

// Values in [-kRegretClampTolerance, 0) are reported as 0.
inline constexpr double kRegretClampTolerance = 1e-9;

// D(p_theta || p | X^n): expected log-ratio over training and test batches.
double batch_regret(const Predictor& pred, std::span<const double> theta);

// Conditional Renyi divergence of order alpha >= 1. Orders within
// kRenyiKlCutoff of 1 evaluate batch_regret; alpha = +inf gives worst_case_regret.
double alpha_batch_regret(const Predictor& pred, std::span<const double> theta, double alpha);

// max over (x^n, y) with positive source probability of log p_theta(y) / p(y | x^n).
double worst_case_regret(const Predictor& pred, std::span<const double> theta);

struct RegretEntry {
  std::size_t theta_index;
  double value;  // clamped for round-off
  double raw;
};

struct RegretReport {
  std::vector<RegretEntry> per_theta;
  double max_value;
  std::size_t argmax_index;  // lowest index attaining max_value
  BatchSetup setup;
  double alpha;  // 1 for average regret
};

// Regret of pred at every grid point, evaluated on `workers` threads.
RegretReport max_regret(const Predictor& pred, const ParamGrid& grid, double alpha,
                        unsigned workers = 1);

}  // namespace bregret

#pragma once

// Conditional mutual information, conditional Sibson information, and the
// capacity solvers whose optimal priors give the minimax batch (alpha-)regret.

#include <cstddef>
#include <optional>
#include <vector>

#include "bregret/predictors.hpp"
#include "bregret/prior.hpp"
#include "bregret/source_model.hpp"

namespace bregret {

// Grid points with prior weight above this are treated as in the support.
inline constexpr double kSupportThreshold = 1e-6;

struct CapacityResult {
  Prior prior_star;
  double capacity = 0.0;        // nats
  double equalizer_gap = 0.0;   // max_theta D_theta - capacity
  double support_gap = 0.0;     // capacity - min over support of D_theta
  int iterations = 0;
  std::vector<double> trace{};      // capacity lower bound (I_w) per iteration
  std::vector<double> upper_trace{};  // max_theta D_theta per iteration
  std::vector<double> divergences{};  // D_theta at the final prior
  double alpha = 1.0;
  double tolerance = 0.0;
  bool converged = false;
  BatchSetup setup{};
};

// I_w(theta; Y | X^n): the Bayes risk of the mixture predictor under w.
double cond_mutual_info(const Prior& prior, const BatchSetup& setup, unsigned workers = 1);

// Conditional Sibson information of order alpha via its closed form. Orders
// within kRenyiKlCutoff of 1 evaluate cond_mutual_info.
double cond_sibson(const Prior& prior, double alpha, const BatchSetup& setup);

// sum_theta w(theta) R(q, theta) - I_w, evaluated directly as the w-marginal
// expected KL divergence from the mixture predictor to q.
double bayes_excess_risk(const Prior& prior, const Predictor& q);

// Arimoto-style iteration w'(theta) ~ w(theta) exp(D_theta) from the uniform
// prior. Stops once both the equalizer gap and the support gap are <= tol.
CapacityResult capacity_solve(GridPtr grid, const BatchSetup& setup, double tol, int max_iter,
                              unsigned workers = 1);

// Multiplicative-weights ascent on the conditional Sibson information with a
// backtracked step. alpha within kRenyiKlCutoff of 1 calls capacity_solve.
CapacityResult alpha_capacity_solve(GridPtr grid, const BatchSetup& setup, double alpha, double tol,
                                    int max_iter, unsigned workers = 1);

struct SaddleReport {
  bool pass = false;
  double max_overshoot = 0.0;          // max_theta D_theta - capacity
  double max_support_shortfall = 0.0;  // max over support of capacity - D_theta
  double tolerance = 0.0;
  std::vector<double> divergences;
};

// Recomputes D_theta for the optimal predictor (mixture for alpha = 1,
// alpha-NML otherwise) at every grid point and checks both saddle conditions.
SaddleReport saddle_check(const CapacityResult& result, double alpha, const BatchSetup& setup,
                          unsigned workers = 1, std::optional<double> tol = std::nullopt);

// The predictor that is minimax when the prior is capacity-achieving.
Predictor optimal_predictor(const Prior& prior, double alpha, const BatchSetup& setup);

}  // namespace bregret

#include "bregret/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bregret/error.hpp"
#include "bregret/kernels.hpp"
#include "bregret/parallel.hpp"
#include "bregret/regret.hpp"

namespace bregret {
namespace {

constexpr int kMaxHalvings = 40;

std::vector<double> divergences_at(const Predictor& pred, const ParamGrid& grid, double alpha,
                                   unsigned workers) {
  std::vector<double> out(grid.size());
  parallel_for(grid.size(), workers, [&](std::size_t j) {
    out[j] = alpha_batch_regret(pred, grid.point(j), alpha);
  });
  return out;
}

double weighted_sum(const Prior& prior, std::span<const double> values) {
  double sum = 0.0;
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (prior[j] > 0.0) sum += prior[j] * values[j];
  }
  return sum;
}

void require_setup_matches(const ParamGrid& grid, const BatchSetup& setup) {
  validate(setup);
  if (grid.alphabet_size() != static_cast<std::size_t>(setup.alphabet_size)) {
    throw DomainError("capacity: grid alphabet does not match the batch setup");
  }
}

struct SolverState {
  Prior prior;
  std::vector<double> divergences;
  double objective;

  double max_divergence() const {
    return *std::max_element(divergences.begin(), divergences.end());
  }
  double min_on_support() const {
    double low = kPosInf;
    for (std::size_t j = 0; j < divergences.size(); ++j) {
      if (prior[j] > kSupportThreshold) low = std::min(low, divergences[j]);
    }
    return low;
  }
};

// Shared driver: `evaluate` maps a prior to its divergences and objective,
// `exponent` gives the per-point log-weight increment for a unit step.
template <typename Evaluate, typename Exponent>
CapacityResult run_multiplicative_ascent(GridPtr grid, const BatchSetup& setup, double alpha,
                                         double tol, int max_iter, double decrease_allowance,
                                         Evaluate evaluate, Exponent exponent) {
  if (!(tol > 0.0)) throw DomainError("capacity solver: tol must be positive");
  if (max_iter < 1) throw DomainError("capacity solver: max_iter must be >= 1");
  require_setup_matches(*grid, setup);

  CapacityResult result{.prior_star = Prior::uniform(grid)};
  result.alpha = alpha;
  result.tolerance = tol;
  result.setup = setup;

  SolverState state = evaluate(Prior::uniform(grid));
  for (int iter = 1;; ++iter) {
    result.iterations = iter;
    result.trace.push_back(state.objective);
    result.upper_trace.push_back(state.max_divergence());
    const double gap = state.max_divergence() - state.objective;
    const double support_gap = state.objective - state.min_on_support();
    if (gap <= tol && support_gap <= tol) {
      result.converged = true;
      break;
    }
    if (iter >= max_iter || !std::isfinite(state.max_divergence())) break;

    const std::vector<double> increment = exponent(state);
    const std::vector<double> log_w = state.prior.log_weights();
    double step = 1.0;
    for (int halving = 0;; ++halving) {
      std::vector<double> log_next(log_w.size());
      for (std::size_t j = 0; j < log_w.size(); ++j) log_next[j] = log_w[j] + step * increment[j];
      SolverState candidate = evaluate(Prior::from_log_mass(grid, log_next));
      if (candidate.objective >= state.objective - decrease_allowance || halving >= kMaxHalvings) {
        state = std::move(candidate);
        break;
      }
      step *= 0.5;
    }
  }

  result.capacity = state.objective;
  result.equalizer_gap = state.max_divergence() - state.objective;
  result.support_gap = state.objective - state.min_on_support();
  result.divergences = state.divergences;
  result.prior_star = std::move(state.prior);
  return result;
}

}  // namespace

double cond_mutual_info(const Prior& prior, const BatchSetup& setup, unsigned workers) {
  require_setup_matches(prior.grid(), setup);
  const Predictor mixture = Predictor::mixture(prior, setup);
  std::vector<double> regrets(prior.size(), 0.0);
  parallel_for(prior.size(), workers, [&](std::size_t j) {
    if (prior[j] > 0.0) regrets[j] = batch_regret(mixture, prior.grid().point(j));
  });
  return weighted_sum(prior, regrets);
}

double cond_sibson(const Prior& prior, double alpha, const BatchSetup& setup) {
  if (std::isnan(alpha) || alpha < 1.0 || std::isinf(alpha)) {
    throw DomainError("cond_sibson: order must be finite and >= 1");
  }
  if (renyi_uses_kl(alpha)) return cond_mutual_info(prior, setup);
  require_setup_matches(prior.grid(), setup);

  const ParamGrid& grid = prior.grid();
  const std::size_t m = grid.alphabet_size();
  const CountSpace training(setup.training_length(), m);
  const CountSpace test(setup.ell, m);

  // Per-test-class alpha * log p_theta_j(y) over the grid.
  std::vector<std::vector<double>> test_scaled(test.size(), std::vector<double>(grid.size(), 0.0));
  for (std::size_t k = 0; k < test.size(); ++k) {
    for (std::size_t s = 0; s < m; ++s) {
      if (test[k][s] == 0) continue;
      kernels::add_scaled(test_scaled[k], grid.log_column(s), alpha * test[k][s]);
    }
  }

  std::vector<double> outer(training.size());
  std::vector<double> inner(test.size());
  std::vector<double> scratch;
  for (std::size_t i = 0; i < training.size(); ++i) {
    const std::vector<double> joint = log_joint_evidence(prior, training[i]);
    for (std::size_t k = 0; k < test.size(); ++k) {
      scratch = joint;
      kernels::add_scaled(scratch, test_scaled[k], 1.0);
      inner[k] = test.log_multiplicity()[k] + log_sum_exp(scratch).value() / alpha;
    }
    const double log_inner = log_sum_exp(inner).value();
    outer[i] = log_inner == kNegInf ? kNegInf : training.log_multiplicity()[i] + alpha * log_inner;
  }
  return log_sum_exp(outer).value() / (alpha - 1.0);
}

double bayes_excess_risk(const Prior& prior, const Predictor& q) {
  const BatchSetup& setup = q.setup();
  require_setup_matches(prior.grid(), setup);
  const Predictor mixture = Predictor::mixture(prior, setup);
  const PredictionTable& mix = mixture.table();
  const PredictionTable& other = q.table();
  const CountSpace& training = mix.training();
  const CountSpace& test = mix.test();

  std::vector<double> train_mass(training.size());
  std::vector<double> inner(training.size(), 0.0);
  std::vector<double> test_mass(test.size());
  std::vector<double> ratio(test.size());
  for (std::size_t i = 0; i < training.size(); ++i) {
    // log P_w(training class i) = log sum_j w_j P_theta_j(class i).
    std::vector<double> joint = log_joint_evidence(prior, training[i]);
    train_mass[i] = log_sum_exp(joint).value();
    if (train_mass[i] == kNegInf) continue;
    train_mass[i] += training.log_multiplicity()[i];
    if (!other.row_defined(i)) return kPosInf;
    for (std::size_t k = 0; k < test.size(); ++k) {
      const double log_mix = mix.at(i, k);
      test_mass[k] = log_mix == kNegInf ? kNegInf : test.log_multiplicity()[k] + log_mix;
      if (test_mass[k] == kNegInf) {
        ratio[k] = 0.0;
        continue;
      }
      if (other.at(i, k) == kNegInf) return kPosInf;
      ratio[k] = log_mix - other.at(i, k);
    }
    inner[i] = kernels::exp_dot(test_mass, ratio, 0.0);
  }
  return kernels::exp_dot(train_mass, inner, 0.0);
}

Predictor optimal_predictor(const Prior& prior, double alpha, const BatchSetup& setup) {
  if (renyi_uses_kl(alpha)) return Predictor::mixture(prior, setup);
  return Predictor::alpha_nml(prior, alpha, setup);
}

CapacityResult capacity_solve(GridPtr grid, const BatchSetup& setup, double tol, int max_iter,
                              unsigned workers) {
  auto evaluate = [&](Prior prior) {
    const Predictor mixture = Predictor::mixture(prior, setup);
    std::vector<double> d = divergences_at(mixture, *grid, 1.0, workers);
    const double objective = weighted_sum(prior, d);
    return SolverState{std::move(prior), std::move(d), objective};
  };
  auto exponent = [](const SolverState& state) { return state.divergences; };
  // Arimoto steps do not decrease I_w; the allowance only absorbs round-off.
  return run_multiplicative_ascent(grid, setup, 1.0, tol, max_iter, 1e-13, evaluate,
                                   exponent);
}

CapacityResult alpha_capacity_solve(GridPtr grid, const BatchSetup& setup, double alpha, double tol,
                                    int max_iter, unsigned workers) {
  if (std::isnan(alpha) || alpha < 1.0 || std::isinf(alpha)) {
    throw DomainError("alpha_capacity_solve: order must be finite and >= 1");
  }
  if (renyi_uses_kl(alpha)) return capacity_solve(std::move(grid), setup, tol, max_iter, workers);

  auto evaluate = [&](Prior prior) {
    const Predictor nml = Predictor::alpha_nml(prior, alpha, setup);
    std::vector<double> d = divergences_at(nml, *grid, alpha, workers);
    const double objective = cond_sibson(prior, alpha, setup);
    return SolverState{std::move(prior), std::move(d), objective};
  };
  auto exponent = [alpha](const SolverState& state) {
    std::vector<double> inc(state.divergences.size());
    for (std::size_t j = 0; j < inc.size(); ++j) {
      inc[j] = (alpha - 1.0) * (state.divergences[j] - state.objective);
    }
    return inc;
  };
  return run_multiplicative_ascent(grid, setup, alpha, tol, max_iter, tol, evaluate,
                                   exponent);
}

SaddleReport saddle_check(const CapacityResult& result, double alpha, const BatchSetup& setup,
                          unsigned workers, std::optional<double> tol) {
  const Prior& prior = result.prior_star;
  const Predictor pred = optimal_predictor(prior, alpha, setup);
  SaddleReport report;
  report.tolerance = tol.value_or(result.tolerance);
  report.divergences = divergences_at(pred, prior.grid(), alpha, workers);
  report.max_overshoot = kNegInf;
  report.max_support_shortfall = kNegInf;
  for (std::size_t j = 0; j < prior.size(); ++j) {
    const double d = report.divergences[j];
    report.max_overshoot = std::max(report.max_overshoot, d - result.capacity);
    if (prior[j] > kSupportThreshold) {
      report.max_support_shortfall = std::max(report.max_support_shortfall, result.capacity - d);
    }
  }
  report.max_overshoot = std::max(report.max_overshoot, 0.0);
  report.max_support_shortfall = std::max(report.max_support_shortfall, 0.0);
  report.pass = report.max_overshoot <= report.tolerance &&
                report.max_support_shortfall <= report.tolerance;
  return report;
}

}  // namespace bregret

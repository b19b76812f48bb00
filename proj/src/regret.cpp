#include "bregret/regret.hpp"

#include <cmath>
#include <string>

#include "bregret/error.hpp"
#include "bregret/kernels.hpp"
#include "bregret/parallel.hpp"

namespace bregret {
namespace {

// Source-side quantities for one theta over the predictor's count spaces.
struct SourceProfile {
  std::vector<double> train_weight;  // log P_theta(training class)
  std::vector<double> test_weight;   // log P_theta(test class)
  std::vector<double> test_ll;       // per-sequence log p_theta(test)
};

SourceProfile profile(const Predictor& pred, std::span<const double> theta) {
  const PredictionTable& table = pred.table();
  validate_distribution(theta, table.test().alphabet_size());
  return {table.training().count_weights(theta), table.test().count_weights(theta),
          table.test().log_likelihoods(theta)};
}

// Fills ratio[k] = log p_theta(y_k) - log p(y_k | x_i) on the live test classes.
// Returns false when the predictor misses a live class.
bool fill_log_ratios(const SourceProfile& src, std::span<const double> row,
                     std::vector<double>& ratio) {
  ratio.resize(row.size());
  for (std::size_t k = 0; k < row.size(); ++k) {
    if (src.test_weight[k] == kNegInf) {
      ratio[k] = 0.0;
      continue;
    }
    if (row[k] == kNegInf) return false;
    ratio[k] = src.test_ll[k] - row[k];
  }
  return true;
}

}  // namespace

double batch_regret(const Predictor& pred, std::span<const double> theta) {
  const PredictionTable& table = pred.table();
  const SourceProfile src = profile(pred, theta);
  std::vector<double> inner(table.training().size(), 0.0);
  std::vector<double> ratio;
  for (std::size_t i = 0; i < inner.size(); ++i) {
    if (src.train_weight[i] == kNegInf) continue;
    if (!table.row_defined(i) || !fill_log_ratios(src, table.row(i), ratio)) return kPosInf;
    inner[i] = kernels::exp_dot(src.test_weight, ratio, 0.0);
  }
  return kernels::exp_dot(src.train_weight, inner, 0.0);
}

double alpha_batch_regret(const Predictor& pred, std::span<const double> theta, double alpha) {
  if (std::isnan(alpha) || alpha < 1.0) {
    throw DomainError("alpha_batch_regret: order must be >= 1, got " + std::to_string(alpha));
  }
  if (renyi_uses_kl(alpha)) return batch_regret(pred, theta);
  if (std::isinf(alpha)) return worst_case_regret(pred, theta);

  const PredictionTable& table = pred.table();
  const SourceProfile src = profile(pred, theta);
  const std::size_t test_size = table.test().size();
  std::vector<double> terms(table.training().size() * test_size, kNegInf);
  std::vector<double> ratio;
  for (std::size_t i = 0; i < table.training().size(); ++i) {
    if (src.train_weight[i] == kNegInf) continue;
    if (!table.row_defined(i) || !fill_log_ratios(src, table.row(i), ratio)) return kPosInf;
    for (std::size_t k = 0; k < test_size; ++k) {
      if (src.test_weight[k] == kNegInf) continue;
      terms[i * test_size + k] = src.train_weight[i] + src.test_weight[k] + (alpha - 1.0) * ratio[k];
    }
  }
  return log_sum_exp(terms).value() / (alpha - 1.0);
}

double worst_case_regret(const Predictor& pred, std::span<const double> theta) {
  const PredictionTable& table = pred.table();
  const SourceProfile src = profile(pred, theta);
  double worst = kNegInf;
  for (std::size_t i = 0; i < table.training().size(); ++i) {
    if (src.train_weight[i] == kNegInf) continue;
    if (!table.row_defined(i)) return kPosInf;
    const std::span<const double> row = table.row(i);
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (src.test_weight[k] == kNegInf) continue;
      if (row[k] == kNegInf) return kPosInf;
      worst = std::max(worst, src.test_ll[k] - row[k]);
    }
  }
  return worst;
}

RegretReport max_regret(const Predictor& pred, const ParamGrid& grid, double alpha,
                        unsigned workers) {
  if (grid.alphabet_size() != static_cast<std::size_t>(pred.setup().alphabet_size)) {
    throw DomainError("max_regret: grid alphabet does not match the predictor");
  }
  std::vector<double> raw(grid.size());
  parallel_for(grid.size(), workers, [&](std::size_t j) {
    raw[j] = alpha_batch_regret(pred, grid.point(j), alpha);
  });

  RegretReport report{{}, kNegInf, 0, pred.setup(), alpha};
  report.per_theta.reserve(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double value = (raw[j] < 0.0 && raw[j] >= -kRegretClampTolerance) ? 0.0 : raw[j];
    report.per_theta.push_back({j, value, raw[j]});
    if (value > report.max_value) {
      report.max_value = value;
      report.argmax_index = j;
    }
  }
  return report;
}

}  // namespace bregret

#include "bregret/predictors.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "bregret/error.hpp"
#include "bregret/kernels.hpp"
#include "bregret/quadrature.hpp"

namespace bregret {
namespace {

// Per-sequence log-likelihood of every class of `space` under every grid point,
// stored class-major: row k holds log p_theta_j(class k) over j.
std::vector<std::vector<double>> grid_log_likelihoods(const ParamGrid& grid,
                                                      const CountSpace& space) {
  std::vector<std::vector<double>> rows(space.size(), std::vector<double>(grid.size(), 0.0));
  for (std::size_t k = 0; k < space.size(); ++k) {
    for (std::size_t s = 0; s < grid.alphabet_size(); ++s) {
      const int c = space[k][s];
      if (c == 0) continue;
      kernels::add_scaled(rows[k], grid.log_column(s), static_cast<double>(c));
    }
  }
  return rows;
}

// Normalized log posterior over the grid; empty when the evidence is degenerate.
std::vector<double> log_posterior(const Prior& prior, const CountStat& training) {
  std::vector<double> log_mass = log_joint_evidence(prior, training);
  const LogWeight total = log_sum_exp(log_mass);
  if (total.is_zero()) return {};
  for (double& v : log_mass) v -= total.value();
  return log_mass;
}

// log sum_j exp(log_post_j + scale * test_ll_j); scratch is reused across calls.
double shifted_lse(std::span<const double> log_post, std::span<const double> test_ll, double scale,
                   std::vector<double>& scratch) {
  scratch.assign(log_post.begin(), log_post.end());
  kernels::add_scaled(scratch, test_ll, scale);
  return log_sum_exp(scratch).value();
}

void fill_mixture_rows(const Prior& prior, PredictionTable& table) {
  const auto test_ll = grid_log_likelihoods(prior.grid(), table.test());
  std::vector<double> scratch;
  for (std::size_t i = 0; i < table.training().size(); ++i) {
    const std::vector<double> log_post = log_posterior(prior, table.training()[i]);
    if (log_post.empty()) {
      table.mark_undefined(i);
      continue;
    }
    std::span<double> row = table.mutable_row(i);
    for (std::size_t k = 0; k < row.size(); ++k) {
      row[k] = shifted_lse(log_post, test_ll[k], 1.0, scratch);
    }
  }
}

void fill_alpha_nml_rows(const Prior& prior, double alpha, PredictionTable& table) {
  const auto test_ll = grid_log_likelihoods(prior.grid(), table.test());
  const std::span<const double> log_mult = table.test().log_multiplicity();
  std::vector<double> scratch;
  std::vector<double> normalizer_terms(table.test().size());
  for (std::size_t i = 0; i < table.training().size(); ++i) {
    const std::vector<double> log_post = log_posterior(prior, table.training()[i]);
    if (log_post.empty()) {
      table.mark_undefined(i);
      continue;
    }
    std::span<double> row = table.mutable_row(i);
    for (std::size_t k = 0; k < row.size(); ++k) {
      row[k] = shifted_lse(log_post, test_ll[k], alpha, scratch) / alpha;
      normalizer_terms[k] = log_mult[k] + row[k];
    }
    const double log_norm = log_sum_exp(normalizer_terms).value();
    for (double& v : row) v -= log_norm;
  }
}

// The k-th one (zero) seen in the test batch always contributes
// log(t1 + k + beta) (log(t0 + k + beta)), and the i-th position always
// contributes -log(t + i - 1 + 2 beta). Accumulating the three families
// separately makes the result independent of symbol order, bit for bit.
struct AddBetaAccumulator {
  double beta;
  double t0;
  double t1;
  int ones = 0;
  int zeros = 0;
  double log_ones = 0.0;
  double log_zeros = 0.0;
  double log_denominator = 0.0;

  void push(int symbol) {
    const int position = ones + zeros;
    log_denominator += std::log(t0 + t1 + position + 2.0 * beta);
    if (symbol == 1) {
      log_ones += std::log(t1 + ones + beta);
      ++ones;
    } else {
      log_zeros += std::log(t0 + zeros + beta);
      ++zeros;
    }
  }

  double value() const { return (log_ones + log_zeros) - log_denominator; }
};

void require_binary(const CountStat& stat, const char* where) {
  if (stat.alphabet_size() != 2) {
    throw UnsupportedClassError(std::string(where) + ": add-beta is defined for binary sources only");
  }
}

void require_beta(double beta) {
  if (!(beta > 0.0) || std::isinf(beta)) {
    throw DomainError("add-beta: beta must be positive and finite");
  }
}

double add_beta_counts(double beta, int t0, int t1, int ell0, int ell1) {
  // Identical accumulation order to feeding ones first, then zeros.
  AddBetaAccumulator acc{beta, static_cast<double>(t0), static_cast<double>(t1)};
  for (int k = 0; k < ell1; ++k) acc.push(1);
  for (int k = 0; k < ell0; ++k) acc.push(0);
  return acc.value();
}

void fill_add_beta_rows(double beta, PredictionTable& table) {
  for (std::size_t i = 0; i < table.training().size(); ++i) {
    const CountStat& train = table.training()[i];
    std::span<double> row = table.mutable_row(i);
    for (std::size_t k = 0; k < row.size(); ++k) {
      const CountStat& test = table.test()[k];
      row[k] = add_beta_counts(beta, train[0], train[1], test[0], test[1]);
    }
  }
}

void require_prior_matches(const Prior& prior, const BatchSetup& setup) {
  if (prior.grid().alphabet_size() != static_cast<std::size_t>(setup.alphabet_size)) {
    throw DomainError("predictor: prior grid alphabet does not match the batch setup");
  }
}

void require_alpha(double alpha) {
  if (std::isnan(alpha) || alpha < 1.0 || std::isinf(alpha)) {
    throw DomainError("alpha-NML: alpha must be finite and >= 1");
  }
}

std::string format_number(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.6g", v);
  return buffer;
}

}  // namespace

// --- PredictionTable -------------------------------------------------------

PredictionTable::PredictionTable(int training_total, int test_total, std::size_t alphabet_size)
    : training_(training_total, alphabet_size),
      test_(test_total, alphabet_size),
      values_(training_.size() * test_.size(), kNegInf),
      defined_(training_.size(), 1) {}

// --- Predictor -------------------------------------------------------------

Predictor::Predictor(PredictorSpec spec, const BatchSetup& setup)
    : spec_(std::move(spec)), setup_(setup) {
  validate(setup_);
  auto table = std::make_shared<PredictionTable>(setup_.training_length(), setup_.ell,
                                                 static_cast<std::size_t>(setup_.alphabet_size));
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, MixtureSpec>) {
          require_prior_matches(s.prior, setup_);
          fill_mixture_rows(s.prior, *table);
        } else if constexpr (std::is_same_v<T, AddBetaSpec>) {
          if (setup_.alphabet_size != 2) {
            throw UnsupportedClassError("add-beta is defined for binary sources only");
          }
          require_beta(s.beta);
          fill_add_beta_rows(s.beta, *table);
        } else {
          require_prior_matches(s.prior, setup_);
          require_alpha(s.alpha);
          fill_alpha_nml_rows(s.prior, s.alpha, *table);
        }
      },
      spec_);
  table_ = std::move(table);
}

Predictor Predictor::mixture(Prior prior, const BatchSetup& setup) {
  return Predictor(MixtureSpec{std::move(prior)}, setup);
}

Predictor Predictor::add_beta(double beta, const BatchSetup& setup) {
  return Predictor(AddBetaSpec{beta}, setup);
}

Predictor Predictor::alpha_nml(Prior prior, double alpha, const BatchSetup& setup) {
  return Predictor(AlphaNmlSpec{std::move(prior), alpha}, setup);
}

LogWeight Predictor::log_prob(const CountStat& training, const CountStat& test) const {
  const std::size_t i = table_->training().index_of(training);
  if (!table_->row_defined(i)) {
    throw DegenerateEvidenceError("predictor undefined on this training class");
  }
  return LogWeight(table_->at(i, table_->test().index_of(test)));
}

bool Predictor::certified() const {
  if (const auto* add = std::get_if<AddBetaSpec>(&spec_)) {
    return add_beta_in_certified_range(add->beta);
  }
  return true;
}

std::string Predictor::describe() const {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, MixtureSpec>) {
          return "mixture(" + std::to_string(s.prior.size()) + " points)";
        } else if constexpr (std::is_same_v<T, AddBetaSpec>) {
          return "add_beta(" + format_number(s.beta) + ")";
        } else {
          return "alpha_nml(" + std::to_string(s.prior.size()) + " points, alpha=" +
                 format_number(s.alpha) + ")";
        }
      },
      spec_);
}

// --- single-value entry points ---------------------------------------------

LogWeight mixture_predict(const Prior& prior, const CountStat& training, const CountStat& test) {
  const std::vector<double> log_post = log_posterior(prior, training);
  if (log_post.empty()) {
    throw DegenerateEvidenceError("mixture_predict: degenerate evidence");
  }
  std::vector<double> scratch(log_post);
  const ParamGrid& grid = prior.grid();
  if (test.alphabet_size() != grid.alphabet_size()) {
    throw DomainError("mixture_predict: test stat alphabet does not match the grid");
  }
  for (std::size_t s = 0; s < grid.alphabet_size(); ++s) {
    if (test[s] == 0) continue;
    kernels::add_scaled(scratch, grid.log_column(s), static_cast<double>(test[s]));
  }
  return log_sum_exp(scratch);
}

bool add_beta_in_certified_range(double beta) { return beta >= 0.5 && beta <= 1.0; }

LogWeight add_beta_predict(double beta, const CountStat& training,
                           std::span<const int> test_sequence) {
  require_binary(training, "add_beta_predict");
  require_beta(beta);
  AddBetaAccumulator acc{beta, static_cast<double>(training[0]), static_cast<double>(training[1])};
  for (int symbol : test_sequence) {
    if (symbol != 0 && symbol != 1) throw DomainError("add_beta_predict: non-binary symbol");
    acc.push(symbol);
  }
  return LogWeight(acc.value());
}

LogWeight add_beta_predict_counts(double beta, const CountStat& training, const CountStat& test) {
  require_binary(training, "add_beta_predict_counts");
  require_binary(test, "add_beta_predict_counts");
  require_beta(beta);
  return LogWeight(add_beta_counts(beta, training[0], training[1], test[0], test[1]));
}

LogWeight alpha_nml_predict(const Prior& prior, double alpha, const CountStat& training,
                            const CountStat& test) {
  require_alpha(alpha);
  const ParamGrid& grid = prior.grid();
  if (test.alphabet_size() != grid.alphabet_size()) {
    throw DomainError("alpha_nml_predict: test stat alphabet does not match the grid");
  }
  const std::vector<double> log_post = log_posterior(prior, training);
  if (log_post.empty()) {
    throw DegenerateEvidenceError("alpha_nml_predict: degenerate evidence");
  }
  const CountSpace space(test.total(), grid.alphabet_size());
  const auto test_ll = grid_log_likelihoods(grid, space);
  std::vector<double> scratch;
  std::vector<double> normalizer_terms(space.size());
  for (std::size_t k = 0; k < space.size(); ++k) {
    normalizer_terms[k] =
        space.log_multiplicity()[k] + shifted_lse(log_post, test_ll[k], alpha, scratch) / alpha;
  }
  const double numerator = shifted_lse(log_post, test_ll[space.index_of(test)], alpha, scratch) / alpha;
  return LogWeight(numerator - log_sum_exp(normalizer_terms).value());
}

Prior dirichlet_quadrature(double beta, std::size_t grid_size) {
  if (!(beta > 0.0) || std::isinf(beta)) throw DomainError("dirichlet_quadrature: beta must be > 0");
  if (grid_size < 8) throw DomainError("dirichlet_quadrature: grid_size must be >= 8");
  const QuadratureRule rule = gauss_jacobi(grid_size, beta - 1.0, beta - 1.0);
  std::vector<double> thetas(grid_size);
  for (std::size_t j = 0; j < grid_size; ++j) thetas[j] = 0.5 * (1.0 + rule.nodes[j]);
  auto grid = std::make_shared<const ParamGrid>(ParamGrid::binary(thetas));
  return Prior::normalized(std::move(grid), rule.weights);
}

}  // namespace bregret

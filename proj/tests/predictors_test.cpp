#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <memory>
#include <vector>

#include "bregret/error.hpp"
#include "bregret/predictors.hpp"
#include "bregret/quadrature.hpp"

namespace bregret {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

GridPtr binary_grid(std::vector<double> thetas) {
  return std::make_shared<const ParamGrid>(ParamGrid::binary(thetas));
}

// E[theta^k] under Beta(beta, beta): prod_{i<k} (beta + i) / (2 beta + i).
double beta_moment(double beta, int k) {
  double m = 1.0;
  for (int i = 0; i < k; ++i) m *= (beta + i) / (2.0 * beta + i);
  return m;
}

TEST(GaussJacobi, LegendreCaseMatchesKnownRule) {
  // Three-point Gauss-Legendre: nodes 0, +-sqrt(3/5); weights 8/9, 5/9.
  const QuadratureRule rule = gauss_jacobi(3, 0.0, 0.0);
  ASSERT_EQ(rule.nodes.size(), 3u);
  EXPECT_NEAR(rule.nodes[0], -std::sqrt(0.6), 1e-15);
  EXPECT_NEAR(rule.nodes[1], 0.0, 1e-15);
  EXPECT_NEAR(rule.nodes[2], std::sqrt(0.6), 1e-15);
  EXPECT_NEAR(rule.weights[0], 5.0 / 9.0, 1e-14);
  EXPECT_NEAR(rule.weights[1], 8.0 / 9.0, 1e-14);
}

TEST(DirichletQuadrature, ExactForPolynomialMoments) {
  for (double beta : {0.5, 0.75, 1.0, 2.5}) {
    for (std::size_t size : {8u, 16u, 64u}) {
      const Prior w = dirichlet_quadrature(beta, size);
      double total = 0.0;
      for (double v : w.weights()) total += v;
      EXPECT_NEAR(total, 1.0, 1e-14);
      for (int k = 0; k <= static_cast<int>(2 * size - 1); ++k) {
        double m = 0.0;
        for (std::size_t j = 0; j < size; ++j) m += w[j] * std::pow(w.grid().point(j)[1], k);
        EXPECT_NEAR(m, beta_moment(beta, k), 1e-12) << "beta=" << beta << " size=" << size << " k=" << k;
      }
    }
  }
}

TEST(DirichletQuadrature, Examples) {
  const Prior uniform = dirichlet_quadrature(1.0, 8);
  double mean = 0.0;
  for (std::size_t j = 0; j < 8; ++j) mean += uniform[j] * uniform.grid().point(j)[1];
  EXPECT_NEAR(mean, 0.5, 1e-15);

  const Prior kt = dirichlet_quadrature(0.5, 32);
  double moment = 0.0;
  for (std::size_t j = 0; j < 32; ++j) {
    const double theta = kt.grid().point(j)[1];
    moment += kt[j] * theta * (1.0 - theta);
  }
  EXPECT_NEAR(moment, 0.125, 1e-10);

  EXPECT_THROW(dirichlet_quadrature(0.0, 16), DomainError);
  EXPECT_THROW(dirichlet_quadrature(1.0, 4), DomainError);
}

TEST(MixturePredict, Examples) {
  const GridPtr grid = binary_grid({0.2, 0.6});
  const Prior point = Prior::point_mass(grid, 1);
  const CountStat train({2, 1});
  const CountStat test({1, 2});
  EXPECT_NEAR(mixture_predict(point, train, test).value(), log_likelihood(grid->point(1), test).value(),
              1e-15);

  const Prior w = Prior::normalized(grid, {1.0, 3.0});
  const double marginal = 0.25 * 0.8 * 0.2 * 0.2 + 0.75 * 0.4 * 0.6 * 0.6;
  EXPECT_NEAR(mixture_predict(w, CountStat::empty(2), test).value(), std::log(marginal), 1e-15);

  const Prior uniform = dirichlet_quadrature(1.0, 64);
  for (const CountStat& tr : enumerate_counts(1, 2)) {
    for (const CountStat& te : enumerate_counts(1, 2)) {
      EXPECT_NEAR(mixture_predict(uniform, tr, te).value(), add_beta_predict_counts(1.0, tr, te).value(),
                  1e-8);
    }
  }
}

TEST(AddBetaPredict, Examples) {
  const std::vector<int> one = {1};
  EXPECT_NEAR(add_beta_predict(0.5, CountStat::empty(2), one).value(), std::log(0.5), 1e-15);
  EXPECT_NEAR(add_beta_predict(0.5, CountStat({0, 2}), one).value(), std::log(5.0 / 6.0), 1e-15);
  const std::vector<int> one_zero = {1, 0};
  EXPECT_NEAR(add_beta_predict(1.0, CountStat::empty(2), one_zero).value(), std::log(0.5 / 3.0), 1e-15);
}

TEST(AddBetaPredict, ExchangeableBitForBit) {
  for (double beta : {0.5, 0.75, 1.0, 0.3}) {
    for (const CountStat& train : enumerate_counts(5, 2)) {
      for (int ell = 1; ell <= 8; ++ell) {
        std::vector<double> by_class(static_cast<std::size_t>(ell + 1), kNaN);
        for (unsigned mask = 0; mask < (1u << ell); ++mask) {
          std::vector<int> seq(static_cast<std::size_t>(ell));
          int ones = 0;
          for (int i = 0; i < ell; ++i) ones += seq[static_cast<std::size_t>(i)] = (mask >> i) & 1u;
          const double v = add_beta_predict(beta, train, seq).value();
          double& slot = by_class[static_cast<std::size_t>(ones)];
          if (std::isnan(slot)) slot = v;
          EXPECT_EQ(v, slot);
        }
        for (int ones = 0; ones <= ell; ++ones) {
          EXPECT_EQ(by_class[static_cast<std::size_t>(ones)],
                    add_beta_predict_counts(beta, train, CountStat({ell - ones, ones})).value());
        }
      }
    }
  }
}

TEST(AddBetaPredict, RejectsUnsupportedInputs) {
  const std::vector<int> seq = {0};
  EXPECT_THROW(add_beta_predict(0.5, CountStat({1, 1, 1}), seq), UnsupportedClassError);
  EXPECT_THROW(add_beta_predict(0.0, CountStat({1, 1}), seq), DomainError);
  EXPECT_THROW(Predictor::add_beta(0.5, BatchSetup{1, 1, 3}), UnsupportedClassError);
}

TEST(AddBetaPredict, CertifiedRangeFlag) {
  EXPECT_TRUE(Predictor::add_beta(0.5, BatchSetup{1, 1, 2}).certified());
  EXPECT_TRUE(Predictor::add_beta(1.0, BatchSetup{1, 1, 2}).certified());
  EXPECT_FALSE(Predictor::add_beta(2.0, BatchSetup{1, 1, 2}).certified());
}

TEST(MixtureEqualsAddBeta, DirichletQuadrature) {
  for (double beta : {0.5, 0.75, 1.0}) {
    const Prior w = dirichlet_quadrature(beta, 64);
    for (int n = 0; n <= 4; ++n) {
      for (int ell = 1; ell <= 3; ++ell) {
        if (n * ell > 12) continue;
        const Predictor mix = Predictor::mixture(w, BatchSetup{n, ell, 2});
        const Predictor add = Predictor::add_beta(beta, BatchSetup{n, ell, 2});
        for (std::size_t i = 0; i < mix.table().training().size(); ++i) {
          for (std::size_t k = 0; k < mix.table().test().size(); ++k) {
            EXPECT_NEAR(mix.table().at(i, k), add.table().at(i, k), 1e-8);
          }
        }
      }
    }
  }
}

TEST(AlphaNmlPredict, Examples) {
  const GridPtr grid = binary_grid({0.2, 0.8});
  const Prior w = Prior::uniform(grid);
  // Two-outcome normalizer evaluated directly: posterior after a single one is (0.2, 0.8).
  const CountStat train({0, 1});
  const long double a1 = std::sqrt(0.2L * 0.2L * 0.2L + 0.8L * 0.8L * 0.8L);  // y = 1
  const long double a0 = std::sqrt(0.2L * 0.8L * 0.8L + 0.8L * 0.2L * 0.2L);  // y = 0
  EXPECT_NEAR(alpha_nml_predict(w, 2.0, train, CountStat({0, 1})).value(),
              static_cast<double>(std::log(a1 / (a0 + a1))), 1e-15);
  EXPECT_NEAR(alpha_nml_predict(w, 2.0, train, CountStat({1, 0})).value(),
              static_cast<double>(std::log(a0 / (a0 + a1))), 1e-15);

  const Prior point = Prior::point_mass(grid, 0);
  for (double alpha : {1.0, 2.0, 7.5}) {
    EXPECT_NEAR(alpha_nml_predict(point, alpha, CountStat({2, 1}), CountStat({1, 2})).value(),
                log_likelihood(grid->point(0), CountStat({1, 2})).value(), 1e-14);
  }
  EXPECT_THROW(alpha_nml_predict(w, 0.5, train, CountStat({0, 1})), DomainError);
}

TEST(AlphaNmlPredict, AlphaOneIsMixture) {
  const GridPtr grid = binary_grid({0.1, 0.4, 0.5, 0.85});
  const Prior w = Prior::normalized(grid, {0.1, 0.2, 0.3, 0.4});
  for (const CountStat& tr : enumerate_counts(4, 2)) {
    for (const CountStat& te : enumerate_counts(3, 2)) {
      EXPECT_NEAR(alpha_nml_predict(w, 1.0, tr, te).value(), mixture_predict(w, tr, te).value(), 1e-10);
      EXPECT_NEAR(alpha_nml_predict(w, 1.0 + 1e-7, tr, te).value(), mixture_predict(w, tr, te).value(),
                  1e-5);
    }
  }
}

TEST(PredictorTable, MatchesSingleValueEntryPoints) {
  const GridPtr grid = std::make_shared<const ParamGrid>(
      ParamGrid(3, {{0.2, 0.3, 0.5}, {0.6, 0.2, 0.2}, {0.1, 0.8, 0.1}}));
  const Prior w = Prior::normalized(grid, {1.0, 2.0, 1.0});
  const BatchSetup setup{2, 2, 3};
  const Predictor mix = Predictor::mixture(w, setup);
  const Predictor nml = Predictor::alpha_nml(w, 3.0, setup);
  for (const CountStat& tr : enumerate_counts(4, 3)) {
    for (const CountStat& te : enumerate_counts(2, 3)) {
      EXPECT_NEAR(mix.log_prob(tr, te).value(), mixture_predict(w, tr, te).value(), 1e-14);
      EXPECT_NEAR(nml.log_prob(tr, te).value(), alpha_nml_predict(w, 3.0, tr, te).value(), 1e-13);
    }
  }
}

TEST(PredictorTable, NormalizedForEveryTrainingClass) {
  const GridPtr grid = binary_grid({0.0, 0.15, 0.5, 0.9, 1.0});
  const Prior w = Prior::normalized(grid, {0.1, 0.3, 0.2, 0.3, 0.1});
  for (const BatchSetup& setup : {BatchSetup{0, 1, 2}, BatchSetup{1, 3, 2}, BatchSetup{3, 4, 2}, BatchSetup{2, 6, 2}}) {
    const std::vector<Predictor> preds = {Predictor::mixture(w, setup), Predictor::add_beta(0.5, setup),
                                          Predictor::add_beta(1.0, setup), Predictor::alpha_nml(w, 2.0, setup),
                                          Predictor::alpha_nml(w, 16.0, setup)};
    for (const Predictor& p : preds) {
      const PredictionTable& table = p.table();
      for (std::size_t i = 0; i < table.training().size(); ++i) {
        ASSERT_TRUE(table.row_defined(i));
        std::vector<double> terms(table.test().size());
        for (std::size_t k = 0; k < terms.size(); ++k) {
          EXPECT_GT(table.at(i, k), kNegInf) << p.describe();
          terms[k] = table.test().log_multiplicity()[k] + table.at(i, k);
        }
        EXPECT_NEAR(log_sum_exp(terms).probability(), 1.0, 1e-10) << p.describe();
      }
    }
  }
}

TEST(PredictorTable, DegenerateEvidenceRowsAreMarked) {
  const GridPtr grid = binary_grid({0.0, 1.0});
  const BatchSetup setup{1, 2, 2};
  const Predictor mix = Predictor::mixture(Prior::uniform(grid), setup);
  EXPECT_TRUE(mix.table().row_defined(0));
  EXPECT_FALSE(mix.table().row_defined(1));
  EXPECT_TRUE(mix.table().row_defined(2));
  EXPECT_THROW(mix.log_prob(CountStat({1, 1}), CountStat({1, 1})), DegenerateEvidenceError);
}

}  // namespace
}  // namespace bregret

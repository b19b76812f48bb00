#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "bregret/capacity.hpp"
#include "bregret/error.hpp"
#include "bregret/oracle.hpp"
#include "bregret/regret.hpp"

namespace bregret {
namespace {

GridPtr binary_grid(std::vector<double> thetas) {
  return std::make_shared<const ParamGrid>(ParamGrid::binary(thetas));
}

std::vector<BatchSetup> guarded_setups(int m, int max_n, int max_ell) {
  std::vector<BatchSetup> out;
  for (int n = 0; n <= max_n; ++n) {
    for (int ell = 1; ell <= max_ell; ++ell) {
      if (std::pow(m, n * ell + ell) <= static_cast<double>(oracle::kSequenceLimit)) out.push_back({n, ell, m});
    }
  }
  return out;
}

TEST(JointTable, SumsToOneAndGuardsSize) {
  const GridPtr grid = binary_grid({0.1, 0.5, 0.75});
  const Prior w = Prior::normalized(grid, {0.2, 0.3, 0.5});
  const oracle::JointTable table(w, BatchSetup{2, 3, 2});
  EXPECT_EQ(table.training_sequences(), 64u);
  EXPECT_EQ(table.test_sequences(), 8u);
  EXPECT_NEAR(static_cast<double>(table.total()), 1.0, 1e-12);
  EXPECT_THROW(oracle::JointTable(w, BatchSetup{4, 3, 2}), SizeGuardError);
  EXPECT_NO_THROW(oracle::check_size_guard(BatchSetup{5, 2, 2}));
  EXPECT_THROW(oracle::check_size_guard(BatchSetup{3, 2, 3}), SizeGuardError);
}

TEST(OracleRegret, TrivialCases) {
  const GridPtr grid = binary_grid({0.35, 0.8});
  const Predictor exact = Predictor::mixture(Prior::point_mass(grid, 0), BatchSetup{2, 2, 2});
  EXPECT_NEAR(oracle::oracle_batch_regret(exact, grid->point(0)), 0.0, 1e-15);

  // n = 0 collapses to a KL divergence over the 4 test sequences.
  const Predictor kt = Predictor::add_beta(0.5, BatchSetup{0, 2, 2});
  const double th = 0.35;
  const double kt_same = 0.5 * 0.75;  // 00 or 11
  const double kt_mixed = 0.5 * 0.25;
  const std::vector<double> p = {(1 - th) * (1 - th), (1 - th) * th, th * (1 - th), th * th};
  const std::vector<double> q = {kt_same, kt_mixed, kt_mixed, kt_same};
  EXPECT_NEAR(oracle::oracle_batch_regret(kt, grid->point(0)), kl_divergence(p, q), 1e-15);
}

TEST(OracleRegret, FastPathsAgreeOnGuardedFamily) {
  const GridPtr grid = binary_grid({0.0, 0.2, 0.5, 0.65, 1.0});
  const Prior w = Prior::normalized(grid, {0.1, 0.25, 0.3, 0.25, 0.1});
  for (const BatchSetup& setup : guarded_setups(2, 3, 4)) {
    const std::vector<Predictor> preds = {Predictor::mixture(w, setup), Predictor::add_beta(0.5, setup),
                                          Predictor::add_beta(0.8, setup), Predictor::alpha_nml(w, 2.5, setup)};
    for (const Predictor& p : preds) {
      for (std::size_t j = 0; j < grid->size(); ++j) {
        const auto theta = grid->point(j);
        EXPECT_NEAR(batch_regret(p, theta), oracle::oracle_batch_regret(p, theta), 1e-10)
            << p.describe() << " n=" << setup.n << " ell=" << setup.ell;
        for (double alpha : {2.0, 4.0}) {
          EXPECT_NEAR(alpha_batch_regret(p, theta, alpha), oracle::oracle_alpha_batch_regret(p, theta, alpha), 1e-10);
        }
        EXPECT_NEAR(worst_case_regret(p, theta), oracle::oracle_worst_case_regret(p, theta), 1e-10);
      }
    }
    EXPECT_NEAR(cond_mutual_info(w, setup), oracle::oracle_cond_mi(w, setup), 1e-10);
  }
}

TEST(OracleRegret, TernaryAlphabet) {
  const GridPtr grid = std::make_shared<const ParamGrid>(
      ParamGrid(3, {{0.2, 0.3, 0.5}, {0.6, 0.4, 0.0}, {0.1, 0.1, 0.8}}));
  const Prior w = Prior::normalized(grid, {1.0, 1.0, 2.0});
  for (const BatchSetup& setup : guarded_setups(3, 3, 3)) {
    const std::vector<Predictor> preds = {Predictor::mixture(w, setup), Predictor::alpha_nml(w, 3.0, setup)};
    for (const Predictor& p : preds) {
      for (std::size_t j = 0; j < grid->size(); ++j) {
        EXPECT_NEAR(batch_regret(p, grid->point(j)), oracle::oracle_batch_regret(p, grid->point(j)), 1e-10);
        EXPECT_NEAR(alpha_batch_regret(p, grid->point(j), 2.0),
                    oracle::oracle_alpha_batch_regret(p, grid->point(j), 2.0), 1e-10);
      }
    }
    EXPECT_NEAR(cond_mutual_info(w, setup), oracle::oracle_cond_mi(w, setup), 1e-10);
  }
}

TEST(OracleCondMi, TrivialCases) {
  const GridPtr grid = binary_grid({0.3, 0.6});
  EXPECT_NEAR(oracle::oracle_cond_mi(Prior::point_mass(grid, 1), BatchSetup{2, 2, 2}), 0.0, 1e-15);
}

TEST(OracleSibsonMin, RoutesAgreeAndMatchClosedForm) {
  const GridPtr grid = binary_grid({0.1, 0.3, 0.55, 0.9});
  const Prior w = Prior::normalized(grid, {0.4, 0.1, 0.3, 0.2});
  for (const BatchSetup& setup : guarded_setups(2, 2, 3)) {
    for (double alpha : {1.5, 2.0, 4.0}) {
      const oracle::SibsonMinResult r = oracle::oracle_sibson_min(w, alpha, setup);
      EXPECT_TRUE(r.stationary) << r.max_stationarity;
      EXPECT_NEAR(r.value, r.gradient_value, 1e-7);
      EXPECT_LE(r.max_minimizer_gap, 1e-7);
      EXPECT_NEAR(cond_sibson(w, alpha, setup), r.value, 1e-8);

      const Predictor nml = Predictor::alpha_nml(w, alpha, setup);
      for (std::size_t x = 0; x < r.minimizers.size(); ++x) {
        const std::vector<int> xs = oracle::decode_sequence(x, setup.training_length(), 2);
        const CountStat train = CountStat::of_sequence(xs, 2);
        for (std::size_t y = 0; y < r.minimizers[x].size(); ++y) {
          const std::vector<int> ys = oracle::decode_sequence(y, setup.ell, 2);
          const double fast = nml.log_prob(train, CountStat::of_sequence(ys, 2)).probability();
          EXPECT_NEAR(fast, r.minimizers[x][y], 1e-7);
          EXPECT_NEAR(fast, r.gradient_minimizers[x][y], 1e-7);
        }
      }
    }
  }
}

TEST(OracleSibsonMin, PointPrior) {
  const GridPtr grid = binary_grid({0.3, 0.6});
  const oracle::SibsonMinResult r = oracle::oracle_sibson_min(Prior::point_mass(grid, 0), 3.0, BatchSetup{1, 2, 2});
  EXPECT_NEAR(r.value, 0.0, 1e-15);
  EXPECT_NEAR(r.minimizers[0][0], 0.49, 1e-15);
  EXPECT_THROW(oracle::oracle_sibson_min(Prior::point_mass(grid, 0), 1.0, BatchSetup{1, 2, 2}), DomainError);
}

TEST(OracleCapacity, TrivialCasesAndGuards) {
  const ParamGrid single = ParamGrid::binary(std::vector<double>{0.4});
  EXPECT_EQ(oracle::oracle_capacity(single, BatchSetup{1, 1, 2}, 1.0, 1e-2).value, 0.0);
  const ParamGrid sym = ParamGrid::binary(std::vector<double>{0.2, 0.8});
  const auto r = oracle::oracle_capacity(sym, BatchSetup{1, 2, 2}, 1.0, 1e-3);
  EXPECT_NEAR(r.weights[0], 0.5, 1e-3);
  const ParamGrid four = ParamGrid::binary(std::vector<double>{0.1, 0.2, 0.3, 0.4});
  EXPECT_THROW(oracle::oracle_capacity(four, BatchSetup{1, 1, 2}, 1.0, 1e-2), SizeGuardError);
  EXPECT_THROW(oracle::oracle_capacity(sym, BatchSetup{1, 1, 2}, 1.0, 0.05), DomainError);
}

TEST(OracleCapacity, ObjectiveMatchesFastPath) {
  const GridPtr grid = binary_grid({0.15, 0.5, 0.9});
  const BatchSetup setup{2, 2, 2};
  for (double alpha : {1.0, 2.0}) {
    const auto r = oracle::oracle_capacity(*grid, setup, alpha, 1e-2);
    const Prior best(grid, r.weights);
    const double fast = alpha == 1.0 ? cond_mutual_info(best, setup) : cond_sibson(best, alpha, setup);
    EXPECT_NEAR(r.value, fast, 1e-10);
  }
}

}  // namespace
}  // namespace bregret

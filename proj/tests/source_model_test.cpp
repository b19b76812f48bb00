#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "bregret/error.hpp"
#include "bregret/prior.hpp"
#include "bregret/source_model.hpp"

namespace bregret {
namespace {

GridPtr binary_grid(std::vector<double> thetas) {
  return std::make_shared<const ParamGrid>(ParamGrid::binary(thetas));
}

// Symbol 0 is "zero", symbol 1 is "one"; binary grid points are (1 - theta, theta).
TEST(ParamGrid, BinaryLayoutAndValidation) {
  const ParamGrid grid = ParamGrid::binary(std::vector<double>{0.3});
  EXPECT_DOUBLE_EQ(grid.point(0)[0], 0.7);
  EXPECT_DOUBLE_EQ(grid.point(0)[1], 0.3);
  EXPECT_THROW(ParamGrid::binary(std::vector<double>{0.3, 0.3}), DomainError);
  EXPECT_THROW(ParamGrid(2, {{0.5, 0.6}}), DomainError);
  EXPECT_THROW(ParamGrid(3, {{0.5, 0.5}}), DomainError);
  EXPECT_EQ(ParamGrid::uniform_binary(9, 0.1, 0.9).size(), 9u);
  EXPECT_NEAR(ParamGrid::uniform_binary(9, 0.1, 0.9).point(8)[1], 0.9, 1e-15);
}

TEST(LogLikelihood, Examples) {
  const std::vector<double> fair = {0.5, 0.5};
  EXPECT_NEAR(log_likelihood(fair, CountStat({2, 2})).value(), 4.0 * std::log(0.5), 1e-15);
  const std::vector<double> det = {1.0, 0.0};
  EXPECT_EQ(log_likelihood(det, CountStat({3, 0})).value(), 0.0);
  EXPECT_TRUE(log_likelihood(det, CountStat({2, 1})).is_zero());
  const std::vector<double> skew = {0.3, 0.7};
  EXPECT_NEAR(log_likelihood(skew, CountStat({1, 2})).value(), std::log(0.3 * 0.49), 1e-15);
}

TEST(CountWeight, Examples) {
  const std::vector<double> fair = {0.5, 0.5};
  EXPECT_NEAR(count_weight(fair, CountStat({1, 1})).value(), std::log(2.0 * 0.25), 1e-15);
  const std::vector<double> skew = {0.3, 0.7};
  // Binomial pmf: C(5,3) 0.7^3 0.3^2.
  const double pmf = 10.0 * std::pow(0.7, 3) * std::pow(0.3, 2);
  EXPECT_NEAR(count_weight(skew, CountStat({2, 3})).value(), std::log(pmf), 1e-14);
}

TEST(CountWeight, NormalizesOverEveryTotal) {
  const std::vector<std::vector<double>> thetas = {
      {0.5, 0.5}, {0.3, 0.7}, {1.0, 0.0}, {0.01, 0.99}, {0.2, 0.3, 0.5}, {0.0, 0.4, 0.6}};
  for (const auto& theta : thetas) {
    for (int t = 0; t <= 40; t += 3) {
      double sum = 0.0;
      for (const CountStat& s : enumerate_counts(t, theta.size())) sum += count_weight(theta, s).probability();
      EXPECT_NEAR(sum, 1.0, 1e-10) << "t=" << t;
    }
  }
}

TEST(EnumerateCounts, OrderAndCardinality) {
  const auto two = enumerate_counts(2, 2);
  ASSERT_EQ(two.size(), 3u);
  EXPECT_EQ(two[0], CountStat({0, 2}));
  EXPECT_EQ(two[1], CountStat({1, 1}));
  EXPECT_EQ(two[2], CountStat({2, 0}));
  const auto empty = enumerate_counts(0, 4);
  ASSERT_EQ(empty.size(), 1u);
  EXPECT_EQ(empty[0], CountStat::empty(4));
  EXPECT_EQ(enumerate_counts(3, 3).size(), 10u);
  for (int t = 0; t < 30; ++t) EXPECT_EQ(enumerate_counts(t, 2).size(), static_cast<std::size_t>(t + 1));
  for (int t = 0; t < 8; ++t) {
    const auto all = enumerate_counts(t, 4);
    const auto expected = static_cast<std::size_t>(std::lround(std::exp(log_binomial(t + 3, 3).value())));
    EXPECT_EQ(all.size(), expected);
    for (std::size_t i = 1; i < all.size(); ++i) {
      EXPECT_TRUE(std::lexicographical_compare(all[i - 1].counts().begin(), all[i - 1].counts().end(),
                                               all[i].counts().begin(), all[i].counts().end()));
    }
  }
}

TEST(CountSpace, IndexRoundTrip) {
  for (std::size_t m : {2u, 3u, 4u}) {
    const CountSpace space(6, m);
    for (std::size_t i = 0; i < space.size(); ++i) EXPECT_EQ(space.index_of(space[i]), i);
  }
}

TEST(CountSpace, FastLikelihoodsMatchScalarDefinition) {
  const CountSpace space(7, 3);
  const std::vector<double> theta = {0.2, 0.0, 0.8};
  const auto ll = space.log_likelihoods(theta);
  const auto cw = space.count_weights(theta);
  for (std::size_t i = 0; i < space.size(); ++i) {
    EXPECT_DOUBLE_EQ(ll[i], log_likelihood(theta, space[i]).value());
    if (std::isinf(cw[i])) {
      EXPECT_TRUE(count_weight(theta, space[i]).is_zero());
    } else {
      EXPECT_NEAR(cw[i], count_weight(theta, space[i]).value(), 1e-13);
    }
  }
}

TEST(Posterior, Examples) {
  const GridPtr grid = binary_grid({0.3, 0.7});
  const Prior uniform = Prior::uniform(grid);
  const Prior same = posterior(uniform, CountStat::empty(2));
  EXPECT_DOUBLE_EQ(same[0], 0.5);
  EXPECT_DOUBLE_EQ(same[1], 0.5);

  const Prior point = Prior::point_mass(grid, 1);
  const Prior still = posterior(point, CountStat({1, 3}));
  EXPECT_EQ(still[0], 0.0);
  EXPECT_EQ(still[1], 1.0);

  // Two-term Bayes rule with counts (zeros, ones) = (1, 3).
  const double a = 0.7 * std::pow(0.3, 3);
  const double b = 0.3 * std::pow(0.7, 3);
  const Prior post = posterior(uniform, CountStat({1, 3}));
  EXPECT_NEAR(post[0], a / (a + b), 1e-15);
  EXPECT_NEAR(post[1], b / (a + b), 1e-15);
}

TEST(Posterior, DegenerateEvidence) {
  const GridPtr grid = binary_grid({0.0, 1.0});
  EXPECT_THROW(posterior(Prior::uniform(grid), CountStat({1, 1})), DegenerateEvidenceError);
}

TEST(Posterior, ComposesOverEvidence) {
  const GridPtr grid = binary_grid({0.1, 0.35, 0.5, 0.8, 0.95});
  const Prior w = Prior::normalized(grid, {1.0, 2.0, 3.0, 4.0, 5.0});
  for (const CountStat& s1 : enumerate_counts(4, 2)) {
    for (const CountStat& s2 : enumerate_counts(3, 2)) {
      const Prior staged = posterior(posterior(w, s1), s2);
      const Prior joint = posterior(w, s1 + s2);
      for (std::size_t j = 0; j < grid->size(); ++j) EXPECT_NEAR(staged[j], joint[j], 1e-12);
    }
    const Prior once = posterior(w, s1);
    const Prior idle = posterior(once, CountStat::empty(2));
    for (std::size_t j = 0; j < grid->size(); ++j) EXPECT_NEAR(idle[j], once[j], 1e-15);
  }
}

TEST(BatchSetup, Validation) {
  EXPECT_NO_THROW(validate(BatchSetup{0, 1, 2}));
  EXPECT_THROW(validate(BatchSetup{-1, 1, 2}), DomainError);
  EXPECT_THROW(validate(BatchSetup{1, 0, 2}), DomainError);
  EXPECT_THROW(validate(BatchSetup{1, 1, 1}), DomainError);
}

TEST(Prior, Validation) {
  const GridPtr grid = binary_grid({0.2, 0.8});
  EXPECT_THROW(Prior(grid, {0.5, 0.6}), DomainError);
  EXPECT_THROW(Prior(grid, {1.2, -0.2}), DomainError);
  EXPECT_THROW(Prior(grid, {1.0}), DomainError);
}

}  // namespace
}  // namespace bregret

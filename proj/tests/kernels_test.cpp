#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "bregret/kernels.hpp"
#include "bregret/log_math.hpp"

namespace bregret::kernels {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> random_logs(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

TEST(ScalarKernels, ExpDotSkipsZeroMass) {
  const std::vector<double> lw = {0.0, kNegInf, std::log(0.5)};
  const std::vector<double> values = {1.0, kNaN, 4.0};
  EXPECT_DOUBLE_EQ(scalar_table().exp_dot(lw.data(), values.data(), 0.0, 3), 3.0);
}

TEST(ScalarKernels, AddScaledTreatsZeroCountsAsZero) {
  std::vector<double> out = {1.0, 2.0};
  const std::vector<double> x = {0.0, 3.0};
  scalar_table().add_scaled(out.data(), x.data(), kNegInf, 2);
  EXPECT_EQ(out[0], 1.0);
  EXPECT_EQ(out[1], kNegInf);
}

TEST(ScalarKernels, EmptyInputs) {
  EXPECT_EQ(scalar_table().reduce_max(nullptr, 0), kNegInf);
  EXPECT_EQ(scalar_table().sum_exp_shifted(nullptr, 0.0, 0), 0.0);
}

class Avx2Equivalence : public ::testing::Test {
 protected:
  void SetUp() override {
    simd_ = avx2_table();
    if (simd_ == nullptr) GTEST_SKIP() << "AVX2 kernels not available on this host";
  }
  const KernelTable* simd_ = nullptr;
  const KernelTable& scalar_ = scalar_table();
};

TEST_F(Avx2Equivalence, AddScaledIsBitIdentical) {
  std::mt19937_64 rng(7);
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 17u, 64u, 129u}) {
    const std::vector<double> x = random_logs(rng, n, 0.0, 50.0);
    std::vector<double> a = random_logs(rng, n, -20.0, 0.0);
    std::vector<double> b = a;
    if (n > 2) {
      a[1] = b[1] = kNegInf;
    }
    scalar_.add_scaled(a.data(), x.data(), -1.7, n);
    simd_->add_scaled(b.data(), x.data(), -1.7, n);
    for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(a[i], b[i]) << "n=" << n << " i=" << i;
  }
}

TEST_F(Avx2Equivalence, ReduceMaxIsExact) {
  std::mt19937_64 rng(11);
  for (std::size_t n : {1u, 2u, 4u, 7u, 8u, 33u, 100u}) {
    std::vector<double> x = random_logs(rng, n, -100.0, 100.0);
    EXPECT_EQ(scalar_.reduce_max(x.data(), n), simd_->reduce_max(x.data(), n));
    std::fill(x.begin(), x.end(), kNegInf);
    EXPECT_EQ(simd_->reduce_max(x.data(), n), kNegInf);
  }
}

TEST_F(Avx2Equivalence, SumExpShiftedMatchesToRoundoff) {
  std::mt19937_64 rng(13);
  for (std::size_t n : {1u, 3u, 4u, 9u, 64u, 257u}) {
    std::vector<double> x = random_logs(rng, n, -60.0, 0.0);
    if (n > 3) x[2] = kNegInf;
    const double s = scalar_.sum_exp_shifted(x.data(), -1.0, n);
    const double v = simd_->sum_exp_shifted(x.data(), -1.0, n);
    EXPECT_NEAR(v, s, 1e-14 * s) << "n=" << n;
  }
}

TEST_F(Avx2Equivalence, ExpAccuracyAcrossRange) {
  // Single-element calls compare the vector exp against std::exp directly.
  for (double x = -745.0; x <= 0.0; x += 0.173) {
    const double s = scalar_.sum_exp_shifted(&x, 0.0, 1);
    const double v = simd_->sum_exp_shifted(&x, 0.0, 1);
    if (x < -708.0) {
      EXPECT_LE(v, 1e-300);
    } else {
      EXPECT_NEAR(v, s, 4e-16 * s) << "x=" << x;
    }
  }
}

TEST_F(Avx2Equivalence, ExpDotMatchesAndMasksZeroMass) {
  std::mt19937_64 rng(17);
  for (std::size_t n : {1u, 4u, 6u, 31u, 200u}) {
    std::vector<double> lw = random_logs(rng, n, -40.0, 0.0);
    std::vector<double> values = random_logs(rng, n, -3.0, 3.0);
    if (n > 4) {
      lw[3] = kNegInf;
      values[3] = kPosInf;
    }
    const double s = scalar_.exp_dot(lw.data(), values.data(), 0.5, n);
    const double v = simd_->exp_dot(lw.data(), values.data(), 0.5, n);
    ASSERT_TRUE(std::isfinite(v));
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (lw[i] != kNegInf) scale += std::exp(lw[i] - 0.5) * std::abs(values[i]);
    }
    EXPECT_NEAR(v, s, 1e-14 * scale + 1e-300) << "n=" << n;
  }
}

TEST(KernelDispatch, OverrideIsScoped) {
  const KernelTable* before = &active();
  {
    ScopedKernelOverride force(scalar_table());
    EXPECT_EQ(&active(), &scalar_table());
  }
  EXPECT_EQ(&active(), before);
}

}  // namespace
}  // namespace bregret::kernels

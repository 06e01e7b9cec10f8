#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "headpred/metrics.hpp"
#include "oracles.hpp"

using namespace headpred;

TEST(PositionError, Millimeters) {
  EXPECT_EQ(position_error({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}), 0.0);
  EXPECT_NEAR(position_error({0.0, 0.0, 0.0}, {0.003, 0.004, 0.0}), 5.0, 1e-12);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal;
  for (int i = 0; i < 100; ++i) {
    const Eigen::Vector3d a(normal(rng), normal(rng), normal(rng));
    const Eigen::Vector3d b(normal(rng), normal(rng), normal(rng));
    double ss = 0.0;
    for (int k = 0; k < 3; ++k) ss += (a[k] - b[k]) * (a[k] - b[k]);
    EXPECT_NEAR(position_error(a, b), 1000.0 * std::sqrt(ss), 1e-12 * 1000.0 * std::sqrt(ss));
  }
}

TEST(OrientationError, Degrees) {
  const Quaternion q = quat_exp({0.1, 0.2, 0.3});
  EXPECT_NEAR(orientation_error(q, q), 0.0, 1e-12);
  EXPECT_NEAR(orientation_error(Quaternion{}, quat_exp({0.0, 0.0, std::acos(-1.0) / 2.0})), 90.0,
              1e-12);
  EXPECT_THROW(orientation_error(Quaternion{0.5, 0, 0, 0}, q), std::invalid_argument);
}

TEST(OrientationError, LeftInvariantAndMatchesMatrixOracle) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> normal;
  for (int i = 0; i < 500; ++i) {
    const Quaternion a = quat_exp({normal(rng), normal(rng), normal(rng)});
    const Quaternion b = quat_exp({normal(rng), normal(rng), normal(rng)});
    const Quaternion r = quat_exp({normal(rng), normal(rng), normal(rng)});
    const double e = orientation_error(a, b);
    EXPECT_GE(e, 0.0);
    EXPECT_LE(e, 180.0);
    EXPECT_NEAR(e, orientation_error((r * a).normalized(), (r * b).normalized()), 1e-9);
    EXPECT_NEAR(e, oracle::matrix_angle(a.to_matrix(), b.to_matrix()) * 180.0 / std::acos(-1.0),
                1e-5);
  }
}

TEST(Summarize, DegenerateAndSymmetricSets) {
  const std::vector<double> flat{3, 3, 3, 3};
  const auto s = summarize(flat);
  EXPECT_EQ(s.median, 3.0);
  EXPECT_EQ(s.mean, 3.0);
  EXPECT_EQ(s.ci_high - s.ci_low, 0.0);
  const std::vector<double> five{5, 1, 4, 2, 3};
  const auto t = summarize(five);
  EXPECT_EQ(t.median, 3.0);
  EXPECT_EQ(t.mean, 3.0);
  EXPECT_EQ(t.n, 5u);
  const std::vector<double> even{4, 1, 3, 2};
  EXPECT_EQ(summarize(even).median, 2.5);
  const std::vector<double> one{7.5};
  const auto u = summarize(one);
  EXPECT_EQ(u.ci_low, 7.5);
  EXPECT_EQ(u.ci_high, 7.5);
}

TEST(Summarize, StudentTIntervalSmallSample) {
  // n = 5, sd = sqrt(2.5), t_{0.975, 4} = 2.7764451051977987.
  const std::vector<double> five{1, 2, 3, 4, 5};
  const auto s = summarize(five);
  const double half = 2.7764451051977987 * std::sqrt(2.5) / std::sqrt(5.0);
  EXPECT_NEAR(s.ci_low, 3.0 - half, 1e-12);
  EXPECT_NEAR(s.ci_high, 3.0 + half, 1e-12);
  const auto s90 = summarize(five, 0.90);
  EXPECT_LT(s90.ci_high - s90.ci_low, s.ci_high - s.ci_low);
}

TEST(Summarize, NormalSampleHalfWidth) {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> normal;
  std::vector<double> x(10000);
  for (auto& v : x) v = normal(rng);
  const auto s = summarize(x);
  EXPECT_NEAR((s.ci_high - s.ci_low) / 2.0, 1.96 / std::sqrt(10000.0), 0.15 * 0.0196);
}

TEST(Summarize, OrderIndependent) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.0, 100.0);
  std::vector<double> x(1001);
  for (auto& v : x) v = unit(rng);
  const auto a = summarize(x);
  std::shuffle(x.begin(), x.end(), rng);
  const auto b = summarize(x);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.median, b.median);
  EXPECT_EQ(a.ci_low, b.ci_low);
}

TEST(Summarize, RejectsBadInput) {
  EXPECT_THROW(summarize(std::vector<double>{}), std::invalid_argument);
  EXPECT_THROW(summarize(std::vector<double>{1.0, 2.0}, 1.0), std::invalid_argument);
  EXPECT_THROW(summarize(std::vector<double>{1.0, 2.0}, 0.0), std::invalid_argument);
}

// Copyright The mgfmax Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "mgfmax/errors.h"
#include "mgfmax/mgf_softmax.h"

using namespace mgfmax;

namespace {

std::vector<double> gaussian(std::size_t n, double mean, double sd, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(mean, sd);
  std::vector<double> v(n);
  for (double &x : v) {
    x = g(rng);
  }
  return v;
}

}  // namespace

TEST(SoftmaxExact, WorkedExamples) {
  const std::vector<double> zeros{0, 0};
  EXPECT_EQ(softmax_exact(zeros), (std::vector<double>{0.5, 0.5}));
  const std::vector<double> big{1000, 1000 + std::log(3.0)};
  const auto b = softmax_exact(big);
  // 1000 + ln 3 is itself rounded at the 1e-13 level.
  EXPECT_NEAR(b[0], 0.25, 1e-12);
  EXPECT_NEAR(b[1], 0.75, 1e-12);
  const std::vector<double> logs{0, std::log(2.0), std::log(3.0)};
  const auto l = softmax_exact(logs);
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(l[static_cast<std::size_t>(i)], (i + 1) / 6.0, 1e-15);
  }
}

TEST(SoftmaxExact, SumsToOne) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto p = softmax_exact(gaussian(100, 0, 10, seed));
    EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);
  }
}

TEST(SoftmaxExact, InvalidInput) {
  EXPECT_THROW(softmax_exact(std::vector<double>{}), EmptyInput);
  EXPECT_THROW(softmax_exact(std::vector<double>{1.0, NAN}), DomainError);
}

TEST(EstimateStats, Families) {
  const std::vector<double> c(5, 2.5);
  const auto sc = estimate_stats(c, Family::kGaussian);
  EXPECT_EQ(sc.mean, 2.5);
  EXPECT_EQ(sc.variance, 0.0);

  const std::vector<double> two{0, 2};
  const auto s2 = estimate_stats(two, Family::kGaussian);
  EXPECT_EQ(s2.mean, 1.0);
  EXPECT_EQ(s2.variance, 1.0);
  EXPECT_EQ(s2.cumulants, (std::vector<double>{1.0, 1.0}));

  const std::vector<double> odd{1, 3, 5};
  const auto su = estimate_stats(odd, Family::kUniform);
  EXPECT_EQ(su.uniform_a, 1.0);
  EXPECT_EQ(su.uniform_b, 5.0);

  const std::vector<double> lap{0.1, 0.2, 0.3, 0.4, 0.5};
  const auto sl = estimate_stats(lap, Family::kLaplace);
  EXPECT_DOUBLE_EQ(sl.laplace_location, 0.3);
  EXPECT_DOUBLE_EQ(sl.laplace_scale, 0.12);

  EXPECT_THROW(estimate_stats(odd, Family::kLaplace), ScaleTooLarge);
}

TEST(CgfAtOne, ClosedForms) {
  DistStats g;
  EXPECT_EQ(cgf_at_one(g), 0.0);
  g.mean = 1.0;
  g.variance = 2.0;
  EXPECT_DOUBLE_EQ(cgf_at_one(g), 2.0);

  DistStats l;
  l.family = Family::kLaplace;
  l.laplace_scale = 0.5;
  EXPECT_NEAR(cgf_at_one(l), 0.2876821, 1e-7);
  l.laplace_scale = 1.0;
  EXPECT_THROW(cgf_at_one(l), ScaleTooLarge);

  DistStats u;
  u.family = Family::kUniform;
  u.uniform_a = 1.0;
  u.uniform_b = 5.0;
  EXPECT_NEAR(cgf_at_one(u), std::log((std::exp(5.0) - std::exp(1.0)) / 4.0), 1e-13);
  EXPECT_NEAR(cgf_at_one(u, {.uniform_large_gap = true}), 5.0 - std::log(4.0), 1e-13);
  u.uniform_a = u.uniform_b = 3.0;
  EXPECT_EQ(cgf_at_one(u), 3.0);
  // Stable far from the origin.
  u.uniform_a = 1000.0;
  u.uniform_b = 1001.0;
  EXPECT_NEAR(cgf_at_one(u), 1001.0 + std::log(1.0 - std::exp(-1.0)), 1e-10);
}

TEST(CgfFromCumulants, GaussianSeries) {
  const std::vector<double> k{1.0, 2.0};
  EXPECT_DOUBLE_EQ(cgf_from_cumulants(k), 2.0);
  const std::vector<double> k4{0.5, 1.0, 6.0, 24.0};
  EXPECT_DOUBLE_EQ(cgf_from_cumulants(k4), 0.5 + 0.5 + 1.0 + 1.0);
}

TEST(MgfSoftmaxPlain, WorkedExample) {
  const std::vector<double> x{0, 2};
  const auto y = mgf_softmax_plain(x, Family::kGaussian);
  EXPECT_NEAR(y[0], 0.1115651, 1e-7);
  EXPECT_NEAR(y[1], 0.8243606, 1e-7);
}

TEST(MgfSoftmaxPlain, ConstantVectorIsUniformForEveryFamily) {
  const std::vector<double> x(16, -3.25);
  for (Family f : {Family::kGaussian, Family::kUniform, Family::kLaplace}) {
    for (double v : mgf_softmax_plain(x, f)) {
      EXPECT_NEAR(v, 1.0 / 16.0, 1e-15) << family_name(f);
    }
  }
}

TEST(MgfSoftmaxPlain, ShiftInvariantAndPositive) {
  for (Family f : {Family::kGaussian, Family::kUniform, Family::kLaplace}) {
    const double sd = f == Family::kLaplace ? 0.3 : 1.5;
    const auto x = gaussian(40, 0.0, sd, 17);
    std::vector<double> shifted(x);
    for (double &v : shifted) {
      v -= 7.3;
    }
    const auto a = mgf_softmax_plain(x, f);
    const auto b = mgf_softmax_plain(shifted, f);
    for (std::size_t i = 0; i < x.size(); ++i) {
      EXPECT_GT(a[i], 0.0);
      EXPECT_NEAR(a[i], b[i], 1e-12) << family_name(f);
    }
  }
}

TEST(MgfSoftmaxScaled, IdentityAcrossK) {
  const auto x = gaussian(64, 0.0, 1.0, 3);
  const auto ref = mgf_softmax_plain(x, Family::kGaussian);
  EXPECT_EQ(mgf_softmax_scaled(x, Family::kGaussian, 0), ref);
  for (int k = 1; k <= 8; ++k) {
    const auto y = mgf_softmax_scaled(x, Family::kGaussian, k);
    for (std::size_t i = 0; i < x.size(); ++i) {
      EXPECT_NEAR(y[i], ref[i], 1e-9 * std::max(1.0, ref[i]));
    }
  }
  EXPECT_THROW(mgf_softmax_scaled(x, Family::kGaussian, -1), DomainError);
}

TEST(Family, NamesRoundTrip) {
  for (Family f : {Family::kGaussian, Family::kUniform, Family::kLaplace}) {
    EXPECT_EQ(family_from_name(family_name(f)), f);
  }
  EXPECT_THROW(family_from_name("cauchy"), ConfigError);
}

// Copyright The mgfmax Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "json.hpp"
#include "mgfmax/error_analysis.h"
#include "mgfmax/errors.h"

using namespace mgfmax;

TEST(RelativeError, WorkedExample) {
  const std::vector<double> x{0, 2};
  EXPECT_NEAR(relative_error(x, Family::kGaussian), 0.0640743, 1e-7);
}

TEST(RelativeError, ConstantVectorIsExact) {
  const std::vector<double> x(10, 4.2);
  EXPECT_NEAR(relative_error(x, Family::kGaussian), 0.0, 1e-15);
}

TEST(RelativeError, ShiftIndependentAndMatchesInfNorm) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x(32);
    for (double &v : x) {
      v = g(rng);
    }
    for (Family f : {Family::kGaussian, Family::kUniform}) {
      const double eta = relative_error(x, f);
      EXPECT_NEAR(eta, relative_error_inf_norm(x, f), 1e-10);
      std::vector<double> shifted(x);
      for (double &v : shifted) {
        v += 3.7;
      }
      EXPECT_NEAR(relative_error(shifted, f), eta, 1e-12);
    }
  }
}

TEST(NormalCdf, Values) {
  EXPECT_DOUBLE_EQ(standard_normal_cdf(0.0), 0.5);
  EXPECT_NEAR(standard_normal_cdf(1.96), 0.9750021048517795, 1e-15);
  EXPECT_NEAR(standard_normal_cdf(-3.0), 0.0013498980316301, 1e-15);
}

// 2 (1 - Phi(delta sqrt(n) / sqrt(e - 1))) at n = 256, computed with an
// independent high-precision erf.
TEST(PEtaAnalytic, FrozenValues) {
  EXPECT_NEAR(p_eta_gaussian(0.05, 256, 1.0).value, 0.54166, 1e-5);
  EXPECT_NEAR(p_eta_gaussian(0.1, 256, 1.0).value, 0.222238, 1e-6);
  EXPECT_NEAR(p_eta_gaussian(0.2, 256, 1.0).value, 0.014639, 1e-6);
}

TEST(PEtaAnalytic, Limits) {
  EXPECT_LT(p_eta_gaussian(50.0, 256, 1.0).value, 1e-300);
  EXPECT_DOUBLE_EQ(p_eta_gaussian(0.0, 256, 1.0).value, 1.0);
  for (double d : {0.01, 0.05, 0.1}) {
    EXPECT_NEAR(p_eta_gaussian(d, 4 * 256, 1.0).value, p_eta_gaussian(2 * d, 256, 1.0).value, 1e-15);
  }
  double prev = 1.0;
  for (std::size_t n = 16; n <= 1 << 16; n *= 2) {
    const double p = p_eta_gaussian(0.05, n, 1.0).value;
    EXPECT_LT(p, prev);
    prev = p;
  }
  const auto degenerate = p_eta_analytic(0.1, 256, 1.0, 0.0);
  EXPECT_TRUE(degenerate.degenerate);
  EXPECT_EQ(degenerate.value, 0.0);
  EXPECT_THROW(p_eta_analytic(-0.1, 256, 1.0, 1.0), DomainError);
}

TEST(PEtaMonteCarlo, DeltaZeroAndMonotone) {
  EXPECT_EQ(p_eta_monte_carlo(0.0, 64, 1.0, 500, 1), 1.0);
  double prev = 1.0;
  for (double d : {0.01, 0.02, 0.05, 0.1, 0.2, 0.4}) {
    const double p = p_eta_monte_carlo(d, 64, 1.0, 2000, 9);
    EXPECT_LE(p, prev);
    prev = p;
  }
}

TEST(PEtaMonteCarlo, ThreadCountDoesNotChangeResult) {
  McOptions seq;
  McOptions par;
  par.threads = 4;
  EXPECT_EQ(sample_relative_errors(128, 1.0, 1000, 77, seq), sample_relative_errors(128, 1.0, 1000, 77, par));
  McOptions est;
  est.mode = McMode::kEstimatedParameters;
  est.threads = 3;
  McOptions est_seq;
  est_seq.mode = McMode::kEstimatedParameters;
  EXPECT_EQ(sample_relative_errors(64, 0.5, 300, 5, est), sample_relative_errors(64, 0.5, 300, 5, est_seq));
}

TEST(PEtaMonteCarlo, AgreesWithAnalyticOnGrid) {
  const std::vector<double> deltas{0.05, 0.1, 0.2};
  const std::vector<std::size_t> ns{64, 256, 1024};
  const std::vector<double> sigmas{0.5, 1.0};
  const std::size_t trials = 20000;
  McOptions opt;
  opt.threads = 0;
  for (const auto &row : error_sweep(deltas, ns, sigmas, trials, 2024, opt)) {
    const double se = binomial_stderr(row.p_analytic, trials);
    const double gap = std::abs(row.p_mc - row.p_analytic);
    if (row.n == 64 && row.sigma == 1.0) {
      // exp(N(0, 1)) is skewed enough that the normal approximation of its
      // sample mean is off by about 0.02 at n = 64 however many trials run.
      EXPECT_LE(gap, 3 * se + 0.03) << "delta=" << row.delta;
      continue;
    }
    EXPECT_LE(gap, 3 * se + 0.01) << "delta=" << row.delta << " n=" << row.n << " sigma=" << row.sigma;
  }
}

TEST(MeanRelativeError, DecreasesWithN) {
  double prev = 1.0;
  for (std::size_t n : {64u, 256u, 1024u}) {
    const double m = mean_relative_error(n, 1.0, 500, 3);
    EXPECT_LT(m, prev);
    // E|N(0, s^2)| with s^2 = (e - 1) / n.
    EXPECT_NEAR(m, std::sqrt(2.0 / M_PI) * std::sqrt(std::expm1(1.0) / static_cast<double>(n)), 0.25 * m);
    prev = m;
  }
}

TEST(ApproxMaxError, Examples) {
  EXPECT_LT(approx_max_error(ExpApproxSpec::taylor(12, 0.0), -0.01, 0.01, 101), 1e-15);
  EXPECT_GT(approx_max_error(ExpApproxSpec::limit(6), -8, 0, 1001), approx_max_error(ExpApproxSpec::limit(8), -8, 0, 1001));
  const auto cheb = ExpApproxSpec::chebyshev(15, -8, 0, 0);
  EXPECT_LE(approx_max_error(cheb, -8, 0, 10001), cheb.as_chebyshev().poly.fit_error);
  EXPECT_THROW(approx_max_error(cheb, -8, 0, 1), ConfigError);
}

TEST(ErrorReport, JsonFields) {
  const ErrorReport r = make_error_report(0.1, 256, 1.0, 2000, 4);
  const auto j = nlohmann::json::parse(r.to_json());
  for (const char *key : {"eta", "delta", "p_eta_analytic", "p_eta_mc", "n", "trials", "mu_Y", "sigma_Y", "generator"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j["generator"], kGeneratorName);
  EXPECT_NEAR(j["p_eta_analytic"].get<double>(), 0.222238, 1e-6);
  EXPECT_NEAR(j["mu_Y"].get<double>(), std::exp(0.5), 1e-15);
}

TEST(Sweep, CsvSchema) {
  const std::vector<double> deltas{0.1};
  const std::vector<std::size_t> ns{64};
  const std::vector<double> sigmas{1.0};
  std::ostringstream out;
  write_sweep_csv(out, error_sweep(deltas, ns, sigmas, 100, 1));
  std::istringstream in(out.str());
  std::string header;
  std::string line;
  std::getline(in, header);
  EXPECT_EQ(header, "delta,n,sigma,p_analytic,p_mc,stderr");
  std::getline(in, line);
  EXPECT_EQ(std::count(line.begin(), line.end(), ','), 5);
}

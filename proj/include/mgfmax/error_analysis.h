// Copyright The mgfmax Authors.
// SPDX-License-Identifier: Apache-2.0

// Relative error of MGF-softmax against softmax and its tail probability.
//
// eta = |1 - mean_i exp(x_i) / M_X(1)|. Treating the sample mean of
// Y = exp(X) as normal (CLT), P(eta >= delta) = 2 (1 - Phi(delta mu_Y sqrt(n) / sigma_Y)).
// For Gaussian X the ratio sigma_Y / mu_Y is sqrt(e^{sigma^2} - 1).

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mgfmax/mgf_softmax.h"
#include "mgfmax/poly_approx.h"

namespace mgfmax {

// Name of the pseudo-random generator behind every Monte-Carlo estimate.
inline constexpr const char *kGeneratorName = "mt19937_64/splitmix64-per-trial";

/// eta in ratio form with M_X(1) from the fitted stats.
double relative_error(std::span<const double> x, Family family);
/// eta with M_X(1) = exp(K) for a caller-supplied K = K_X(1).
double relative_error_with_cgf(std::span<const double> x, double cgf);
/// ||softmax(x) - mgf_softmax_plain(x)||_inf / ||softmax(x)||_inf.
double relative_error_inf_norm(std::span<const double> x, Family family);

double standard_normal_cdf(double z);

struct TailProbability {
  double value = 0.0;
  // Set when sigma_Y <= 0 and the probability collapses to 0.
  bool degenerate = false;
};

/// 2 (1 - Phi(delta mu_Y sqrt(n) / sigma_Y)).
TailProbability p_eta_analytic(double delta, std::size_t n, double mu_y, double sigma_y);
/// Log-normal case: sigma_Y / mu_Y = sqrt(e^{sigma^2} - 1).
TailProbability p_eta_gaussian(double delta, std::size_t n, double sigma);

enum class McMode {
  // M_X(1) from the true mean and variance of the sampling distribution.
  kTrueParameters,
  // M_X(1) from the per-sample mean and variance.
  kEstimatedParameters,
};

struct McOptions {
  McMode mode = McMode::kTrueParameters;
  // 0 picks std::thread::hardware_concurrency().
  unsigned threads = 1;
};

/// Fraction of trials, x ~ N(0, sigma^2)^n, with eta >= delta. Every trial has
/// its own generator derived from (seed, trial), so results do not depend on
/// the thread count.
double p_eta_monte_carlo(double delta, std::size_t n, double sigma, std::size_t trials, std::uint64_t seed,
                         McOptions options = {});

/// Mean eta over the same trials.
double mean_relative_error(std::size_t n, double sigma, std::size_t trials, std::uint64_t seed,
                           McOptions options = {});

/// Per-trial eta values in trial order.
std::vector<double> sample_relative_errors(std::size_t n, double sigma, std::size_t trials, std::uint64_t seed,
                                           McOptions options = {});

/// sqrt(p (1 - p) / trials).
double binomial_stderr(double p, std::size_t trials);

/// max |aexp_plain(x) - exp(x)| over a uniform grid of [lo, hi].
double approx_max_error(const ExpApproxSpec &spec, double lo, double hi, std::size_t grid_points);

struct ErrorReport {
  double eta = 0.0;
  double delta = 0.0;
  double p_eta_analytic = 0.0;
  double p_eta_mc = 0.0;
  std::size_t n = 0;
  std::size_t trials = 0;
  double mu_y = 0.0;
  double sigma_y = 0.0;
  std::uint64_t seed = 0;
  std::string generator = kGeneratorName;

  void validate() const;
  std::string to_json() const;
};

/// Gaussian report: mu_Y, sigma_Y of exp(N(0, sigma^2)); eta is the mean eta.
ErrorReport make_error_report(double delta, std::size_t n, double sigma, std::size_t trials, std::uint64_t seed,
                              McOptions options = {});

struct SweepRow {
  double delta = 0.0;
  std::size_t n = 0;
  double sigma = 0.0;
  double p_analytic = 0.0;
  double p_mc = 0.0;
  double stderr_mc = 0.0;
};

std::vector<SweepRow> error_sweep(std::span<const double> deltas, std::span<const std::size_t> ns,
                                  std::span<const double> sigmas, std::size_t trials, std::uint64_t seed,
                                  McOptions options = {});

// Header "delta,n,sigma,p_analytic,p_mc,stderr".
void write_sweep_csv(std::ostream &out, std::span<const SweepRow> rows);

}  // namespace mgfmax

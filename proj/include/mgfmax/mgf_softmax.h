// Copyright The mgfmax Authors.
// SPDX-License-Identifier: Apache-2.0

// Plaintext reference softmax and MGF-softmax. MGF-softmax replaces the
// softmax denominator sum_j exp(x_j) by n * M_X(1), which gives the single
// exponential exp(x_i - K_X(1) - ln n) with K_X the cumulant generating
// function of the distribution fitted to x. Outputs are not renormalized.

#pragma once

#include <span>
#include <string>
#include <vector>

namespace mgfmax {

enum class Family { kGaussian, kUniform, kLaplace };

std::string family_name(Family f);
Family family_from_name(const std::string &name);

struct DistStats {
  Family family = Family::kGaussian;
  double mean = 0.0;
  // Population variance (divides by n).
  double variance = 0.0;
  // Gaussian: {mean, variance}; empty for the other families.
  std::vector<double> cumulants;
  double uniform_a = 0.0;
  double uniform_b = 0.0;
  double laplace_location = 0.0;
  double laplace_scale = 0.0;
};

struct CgfOptions {
  // Uniform only: use M_X(1) ~ e^b / (b - a), valid when b >> a.
  bool uniform_large_gap = false;
};

// Throws EmptyInput for n == 0 and DomainError for non-finite entries.
void validate_softmax_input(std::span<const double> x);

/// Max-subtracted softmax.
std::vector<double> softmax_exact(std::span<const double> x);

/// Gaussian: sample mean and population variance. Uniform: min and max.
/// Laplace: sample median and mean absolute deviation from it; throws
/// ScaleTooLarge when that scale is >= 1 (M_X(1) diverges).
DistStats estimate_stats(std::span<const double> x, Family family);

/// K_X(1) = ln M_X(1) in closed form for the stats' family.
double cgf_at_one(const DistStats &stats, CgfOptions options = {});

/// Truncated cumulant series sum_j kappa_j / j!, kappa indexed from 1.
double cgf_from_cumulants(std::span<const double> kappa);

/// exp(x_i - K_X(1) - ln n).
std::vector<double> mgf_softmax_plain(std::span<const double> x, Family family, CgfOptions options = {});

/// exp((x_i - K_X(1) - ln n) / 2^k)^(2^k), evaluated with k squarings.
std::vector<double> mgf_softmax_scaled(std::span<const double> x, Family family, int k, CgfOptions options = {});

}  // namespace mgfmax

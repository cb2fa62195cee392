// Copyright The mgfmax Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mgfmax/mgf_softmax.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mgfmax/errors.h"

namespace mgfmax {

std::string family_name(Family f) {
  switch (f) {
    case Family::kGaussian:
      return "gaussian";
    case Family::kUniform:
      return "uniform";
    case Family::kLaplace:
      return "laplace";
  }
  return "unknown";
}

Family family_from_name(const std::string &name) {
  if (name == "gaussian") {
    return Family::kGaussian;
  }
  if (name == "uniform") {
    return Family::kUniform;
  }
  if (name == "laplace") {
    return Family::kLaplace;
  }
  throw ConfigError("unknown distribution family '" + name + "'");
}

void validate_softmax_input(std::span<const double> x) {
  if (x.empty()) {
    throw EmptyInput("softmax input is empty");
  }
  if (!std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); })) {
    throw DomainError("softmax input has non-finite entries");
  }
}

std::vector<double> softmax_exact(std::span<const double> x) {
  validate_softmax_input(x);
  const double max = *std::max_element(x.begin(), x.end());
  std::vector<double> out(x.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = std::exp(x[i] - max);
    sum += out[i];
  }
  for (double &v : out) {
    v /= sum;
  }
  return out;
}

DistStats estimate_stats(std::span<const double> x, Family family) {
  validate_softmax_input(x);
  const auto n = static_cast<double>(x.size());
  DistStats s;
  s.family = family;
  s.mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : x) {
    ss += (v - s.mean) * (v - s.mean);
  }
  s.variance = ss / n;

  switch (family) {
    case Family::kGaussian:
      s.cumulants = {s.mean, s.variance};
      break;
    case Family::kUniform: {
      const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
      s.uniform_a = *lo;
      s.uniform_b = *hi;
      break;
    }
    case Family::kLaplace: {
      std::vector<double> sorted(x.begin(), x.end());
      std::sort(sorted.begin(), sorted.end());
      const std::size_t m = sorted.size() / 2;
      s.laplace_location = sorted.size() % 2 == 1 ? sorted[m] : 0.5 * (sorted[m - 1] + sorted[m]);
      double mad = 0.0;
      for (double v : x) {
        mad += std::abs(v - s.laplace_location);
      }
      s.laplace_scale = mad / n;
      if (s.laplace_scale >= 1.0) {
        throw ScaleTooLarge("laplace scale " + std::to_string(s.laplace_scale) + " >= 1, M_X(1) diverges");
      }
      break;
    }
  }
  return s;
}

double cgf_at_one(const DistStats &stats, CgfOptions options) {
  switch (stats.family) {
    case Family::kGaussian:
      return stats.mean + 0.5 * stats.variance;
    case Family::kUniform: {
      const double a = stats.uniform_a;
      const double b = stats.uniform_b;
      if (a == b) {
        return a;
      }
      if (options.uniform_large_gap) {
        return b - std::log(b - a);
      }
      // ln((e^b - e^a) / (b - a)) without overflow.
      return b + std::log(-std::expm1(a - b)) - std::log(b - a);
    }
    case Family::kLaplace:
      if (stats.laplace_scale >= 1.0) {
        throw ScaleTooLarge("laplace scale must be < 1");
      }
      return stats.laplace_location - std::log1p(-stats.laplace_scale * stats.laplace_scale);
  }
  return 0.0;
}

double cgf_from_cumulants(std::span<const double> kappa) {
  double sum = 0.0;
  double factorial = 1.0;
  for (std::size_t j = 0; j < kappa.size(); ++j) {
    factorial *= static_cast<double>(j + 1);
    sum += kappa[j] / factorial;
  }
  return sum;
}

std::vector<double> mgf_softmax_plain(std::span<const double> x, Family family, CgfOptions options) {
  return mgf_softmax_scaled(x, family, 0, options);
}

std::vector<double> mgf_softmax_scaled(std::span<const double> x, Family family, int k, CgfOptions options) {
  if (k < 0) {
    throw DomainError("scaling exponent must be nonnegative");
  }
  const double shift = cgf_at_one(estimate_stats(x, family), options) + std::log(static_cast<double>(x.size()));
  const double scale = std::ldexp(1.0, -k);
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double y = std::exp((x[i] - shift) * scale);
    for (int j = 0; j < k; ++j) {
      y *= y;
    }
    out[i] = y;
  }
  return out;
}

}  // namespace mgfmax

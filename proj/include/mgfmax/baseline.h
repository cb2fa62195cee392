// Copyright The mgfmax Authors.
// SPDX-License-Identifier: Apache-2.0

// Normalize-and-square softmax: softmax(x / 2^(j-1)) is recovered from
// softmax(x / 2^j) by squaring and renormalizing, so only exp(x / 2^k) has to
// be approximated. Division is done with Goldschmidt's iteration.

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "mgfmax/he_softmax.h"
#include "mgfmax/poly_approx.h"

namespace mgfmax {

struct BaselineSpec {
  int k = 5;
  ExpApproxSpec exp_spec = ExpApproxSpec::chebyshev(15, -8.0, 0.0, 0);
  int gs_iters = 4;
  // Denominators handed to the reciprocal are assumed to lie in (0, inv_range].
  double inv_range = 1.0;
  // Decrypt denominators before inverting and reject nonpositive slots.
  bool check_domain = false;

  // Throws ConfigError.
  void validate() const;

  // k = ceil(log2 M - log2 ln n) for inputs in [-M, 0]. gs_iters is raised to
  // ceil(log2 n) + 2 so that sums of squared probabilities, which can be as
  // small as 1/n, are still inverted accurately.
  static BaselineSpec for_input(double m, std::size_t n);
};

/// ceil(log2 M - log2 ln n), at least 1.
int baseline_scaling_exponent(double m, std::size_t n);

/// output_scale / (input_scale * d) for input_scale * d in (0, B]. The
/// relative error after i iterations is (1 - input_scale * d / B)^(2^(i+1)).
/// Consumes gs_iters + 2 levels.
Ciphertext goldschmidt_inverse(Engine &engine, const Ciphertext &d, int gs_iters, double inv_range = 1.0,
                               double input_scale = 1.0, double output_scale = 1.0);
Ciphertext goldschmidt_inverse(Engine &engine, const Ciphertext &d, const BaselineSpec &spec);

/// Same iteration on plaintext values; throws DomainError on nonpositive d.
std::vector<double> goldschmidt_inverse_plain(std::span<const double> d, int gs_iters, double inv_range = 1.0);

/// Normalize-and-square softmax with k iterations. exp_spec == nullopt uses
/// exact exp (after subtracting the maximum) and exact division.
/// Throws DegenerateInput when a normalizer vanishes.
std::vector<double> softmax_ns_plain(std::span<const double> x, int k,
                                     const std::optional<ExpApproxSpec> &exp_spec = std::nullopt);

/// Homomorphic normalize-and-square softmax on packed rows. Needs
/// auto-bootstrapping for any realistic k.
HeSoftmaxResult he_softmax_baseline(Engine &engine, const PackedMatrix &p, const BaselineSpec &spec);

}  // namespace mgfmax

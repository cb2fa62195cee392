// Copyright The mgfmax Authors.
// SPDX-License-Identifier: Apache-2.0

// Homomorphic MGF-softmax over a matrix packed column-major with a fixed gap
// between the elements of a row, evaluated row-wise.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mgfmax/he_engine.h"
#include "mgfmax/matrix.h"
#include "mgfmax/mgf_softmax.h"
#include "mgfmax/poly_approx.h"

namespace mgfmax {

struct SlotPosition {
  std::size_t ciphertext = 0;
  std::size_t slot = 0;
};

// Matrix of true size rows x cols, zero-padded to n1 x n2 (powers of two) and
// spread over t ciphertexts. A[r, c] lives at ciphertext floor(c*gap / s),
// slot r + (c*gap mod s).
struct PackedMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  std::size_t t = 0;
  std::size_t gap = 0;
  std::vector<Ciphertext> cts;
  HeParams params;

  SlotPosition position(std::size_t r, std::size_t c) const;
};

// Layout without encrypting anything.
PackedMatrix packing_layout(std::size_t rows, std::size_t cols, const HeParams &params);

PackedMatrix pack(Engine &engine, const Matrix &a);
// Encrypts at the given level instead of the full level.
PackedMatrix pack(Engine &engine, const Matrix &a, int level);
Matrix unpack(const Engine &engine, const PackedMatrix &p);

/// Rotate-and-add fold over one ciphertext already holding the sum of the t
/// streams: afterwards slot r + c*gap holds the full row sum for every block c.
/// CapacityError when a column is longer than one ciphertext (gap > s).
Ciphertext fold_rows(Engine &engine, const Ciphertext &summed, const PackedMatrix &layout);

/// Adds the t ciphertexts, then folds: row sums replicated in every block.
Ciphertext reduce_rows(Engine &engine, const PackedMatrix &p);
Ciphertext reduce_rows(Engine &engine, std::span<const Ciphertext> streams, const PackedMatrix &layout);

struct SoftmaxReport {
  // Operation counts of one evaluation, summed over all streams.
  OpCounters counters;
  // Longest chain of level-consuming ops from input to output.
  int depth = 0;
  int k = 0;
  std::string variant;
  std::size_t streams = 1;
  std::uint64_t boots = 0;

  // Per-stream figures: totals spread over the t ciphertext streams.
  std::uint64_t cmult_per_stream() const;
  std::uint64_t boot_per_stream() const;
};

struct HeSoftmaxResult {
  PackedMatrix output;
  SoftmaxReport report;
};

/// Row-wise MGF-softmax on packed ciphertexts. Only the Gaussian family is
/// available homomorphically. The packed column count must be the true
/// softmax dimension (no column padding).
HeSoftmaxResult he_mgf_softmax(Engine &engine, const PackedMatrix &p, const ExpApproxSpec &spec,
                               Family family = Family::kGaussian);

/// Plaintext mirror of he_mgf_softmax for one row:
/// aexp_plain(x - mu - sigma^2/2 - ln n) with population variance.
std::vector<double> mgf_softmax_approx_plain(std::span<const double> x, const ExpApproxSpec &spec);

}  // namespace mgfmax

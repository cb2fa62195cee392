// Copyright The mgfmax Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mgfmax/he_softmax.h"

#include <algorithm>
#include <bit>
#include <cmath>

#include "mgfmax/errors.h"

namespace mgfmax {

SlotPosition PackedMatrix::position(std::size_t r, std::size_t c) const {
  // Same as ct = c*gap / s, slot = r + (c*gap mod s) whenever gap <= s; a
  // longer column continues into the next ciphertext.
  const std::size_t s = params.slot_count;
  const std::size_t linear = c * gap + r;
  return {linear / s, linear % s};
}

PackedMatrix packing_layout(std::size_t rows, std::size_t cols, const HeParams &params) {
  params.validate();
  if (rows == 0 || cols == 0) {
    throw EmptyInput("cannot pack an empty matrix");
  }
  PackedMatrix p;
  p.rows = rows;
  p.cols = cols;
  p.n1 = std::bit_ceil(rows);
  p.n2 = std::bit_ceil(cols);
  p.params = params;
  const std::size_t s = params.slot_count;
  p.t = (p.n1 * p.n2 + s - 1) / s;
  p.gap = p.t * s / p.n2;
  return p;
}

PackedMatrix pack(Engine &engine, const Matrix &a) {
  return pack(engine, a, engine.params().max_level);
}

PackedMatrix pack(Engine &engine, const Matrix &a, int level) {
  PackedMatrix p = packing_layout(a.rows, a.cols, engine.params());
  std::vector<std::vector<double>> slots(p.t, std::vector<double>(engine.slot_count(), 0.0));
  for (std::size_t r = 0; r < a.rows; ++r) {
    for (std::size_t c = 0; c < a.cols; ++c) {
      const SlotPosition pos = p.position(r, c);
      slots[pos.ciphertext][pos.slot] = a(r, c);
    }
  }
  p.cts.reserve(p.t);
  for (const auto &v : slots) {
    p.cts.push_back(engine.encrypt(v, level));
  }
  return p;
}

Matrix unpack(const Engine &engine, const PackedMatrix &p) {
  std::vector<std::vector<double>> slots;
  slots.reserve(p.cts.size());
  for (const auto &ct : p.cts) {
    slots.push_back(engine.decrypt(ct));
  }
  Matrix a(p.rows, p.cols);
  for (std::size_t r = 0; r < p.rows; ++r) {
    for (std::size_t c = 0; c < p.cols; ++c) {
      const SlotPosition pos = p.position(r, c);
      a(r, c) = slots[pos.ciphertext][pos.slot];
    }
  }
  return a;
}

Ciphertext fold_rows(Engine &engine, const Ciphertext &summed, const PackedMatrix &layout) {
  if (layout.gap > layout.params.slot_count) {
    throw CapacityError("a column of " + std::to_string(layout.n1) + " rows does not fit in " +
                        std::to_string(layout.params.slot_count) + " slots; row reductions need n1 <= s");
  }
  // Each ciphertext carries n2/t column blocks of width gap.
  const std::size_t blocks = layout.n2 / layout.t;
  Ciphertext acc = summed;
  for (std::size_t stride = layout.gap; stride < layout.gap * blocks; stride *= 2) {
    acc = engine.add(acc, engine.rotate(acc, static_cast<long>(stride)));
  }
  return acc;
}

Ciphertext reduce_rows(Engine &engine, std::span<const Ciphertext> streams, const PackedMatrix &layout) {
  Ciphertext sum = streams.front();
  for (std::size_t i = 1; i < streams.size(); ++i) {
    sum = engine.add(sum, streams[i]);
  }
  return fold_rows(engine, sum, layout);
}

Ciphertext reduce_rows(Engine &engine, const PackedMatrix &p) {
  return reduce_rows(engine, p.cts, p);
}

std::uint64_t SoftmaxReport::cmult_per_stream() const {
  return (counters.n_cmult + streams - 1) / streams;
}

std::uint64_t SoftmaxReport::boot_per_stream() const {
  return (boots + streams - 1) / streams;
}

HeSoftmaxResult he_mgf_softmax(Engine &engine, const PackedMatrix &p, const ExpApproxSpec &spec, Family family) {
  if (family != Family::kGaussian) {
    throw NonGaussianFamily("homomorphic MGF-softmax supports the gaussian family only, got " +
                            family_name(family));
  }
  if (p.cols != p.n2) {
    throw DomainError("softmax dimension " + std::to_string(p.cols) +
                      " is not a power of two; pad rows only, never columns");
  }
  const OpCounters before = engine.counters();
  const CipherBackend be{&engine};
  const auto n = static_cast<double>(p.n2);
  const auto n_int = static_cast<long>(p.n2);
  const double log_n = std::log(n);

  // Step 1: replicated row sums S. Working with c = n*x - S = n*(x - mu)
  // keeps the mean level-free: the only scalar is the integer n.
  const Ciphertext row_sum = reduce_rows(engine, p);
  std::vector<Ciphertext> centered;
  centered.reserve(p.t);
  for (const auto &ct : p.cts) {
    centered.push_back(engine.sub(engine.pmult(ct, static_cast<double>(n_int), true), row_sum));
  }

  // Step 2: one squaring per stream; sq = sum_j c_j^2 = n^3 * sigma^2.
  std::vector<Ciphertext> squares;
  squares.reserve(p.t);
  for (const auto &c : centered) {
    squares.push_back(engine.square(c));
  }
  const Ciphertext sq = reduce_rows(engine, squares, p);

  // Step 3: z = x - mu - sigma^2/2 - ln n = c/n - sq/(2n^3) - ln n. The mean
  // scalar 1/n, the variance scalars 1/n^3 and 1/2, ln n and the input map of
  // the approximation (1/2^k and the map onto its domain) collapse into one
  // plaintext scalar per operand, so this step costs a single level.
  std::vector<Ciphertext> outputs;
  outputs.reserve(p.t);
  if (spec.variant() == ExpApproxSpec::Variant::kTaylor) {
    // Monomial basis: fold every scale into the coefficients instead and feed
    // w = 2n^3 (z - x0), which needs integer scalars only.
    const double n3 = 2.0 * n * n * n;
    const long c_scale = 2 * n_int * n_int;
    const double offset = -n3 * (log_n + spec.as_taylor().x0);
    for (const auto &c : centered) {
      const Ciphertext w = engine.add_plain(engine.sub(engine.pmult(c, static_cast<double>(c_scale), true), sq), offset);
      outputs.push_back(aexp_core(be, w, spec, 1.0 / n3));
    }
  } else {
    const AffineMap m = spec.input_map();
    const Ciphertext var_term = engine.pmult(sq, -m.scale / (2.0 * n * n * n));
    const double offset = m.offset - m.scale * log_n;
    for (const auto &c : centered) {
      const Ciphertext prepared = engine.add_plain(engine.add(engine.pmult(c, m.scale / n), var_term), offset);
      outputs.push_back(aexp_core(be, prepared, spec));
    }
  }

  HeSoftmaxResult result;
  result.output = p;
  result.output.cts = outputs;

  int in_depth = 0;
  for (const auto &ct : p.cts) {
    in_depth = std::max(in_depth, ct.depth());
  }
  int out_depth = 0;
  for (const auto &ct : outputs) {
    out_depth = std::max(out_depth, ct.depth());
  }
  SoftmaxReport &r = result.report;
  r.counters = engine.counters() - before;
  r.depth = out_depth - in_depth;
  r.k = spec.k();
  r.variant = spec.variant_name();
  r.streams = p.t;
  r.boots = r.counters.n_boot;
  return result;
}

std::vector<double> mgf_softmax_approx_plain(std::span<const double> x, const ExpApproxSpec &spec) {
  const DistStats s = estimate_stats(x, Family::kGaussian);
  const double shift = s.mean + 0.5 * s.variance + std::log(static_cast<double>(x.size()));
  std::vector<double> z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    z[i] = x[i] - shift;
  }
  return aexp_plain(z, spec);
}

}  // namespace mgfmax

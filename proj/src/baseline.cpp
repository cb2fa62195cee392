// Copyright The mgfmax Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mgfmax/baseline.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mgfmax/errors.h"

namespace mgfmax {

namespace {

// x0 = (beta/B) (2 - alpha d / B), e0 = (1 - alpha d / B)^2; then
// y <- y (1 + e), e <- e^2.
template <class Backend>
typename Backend::Value goldschmidt(const Backend &be, const typename Backend::Value &d, int iters, double range,
                                    double alpha, double beta) {
  using Value = typename Backend::Value;
  Value y = be.add_scalar(be.mul_scalar(d, -beta * alpha / (range * range)), 2.0 * beta / range);
  Value r = be.add_scalar(be.mul_scalar(d, -alpha / range), 1.0);
  Value e = be.mul(r, r);
  for (int i = 0; i < iters; ++i) {
    y = be.mul(y, be.add_scalar(e, 1.0));
    if (i + 1 < iters) {
      e = be.mul(e, e);
    }
  }
  return y;
}

double checked_sum(const std::vector<double> &v) {
  const double s = std::accumulate(v.begin(), v.end(), 0.0);
  if (!(s > 0.0) || !std::isfinite(s)) {
    throw DegenerateInput("normalizer vanished: every value underflowed");
  }
  return s;
}

}  // namespace

void BaselineSpec::validate() const {
  if (k < 1) {
    throw ConfigError("baseline k must be at least 1");
  }
  if (gs_iters < 1) {
    throw ConfigError("gs_iters must be at least 1");
  }
  if (!(inv_range > 0.0)) {
    throw ConfigError("inv_range must be positive");
  }
  if (exp_spec.variant() != ExpApproxSpec::Variant::kChebyshev) {
    throw ConfigError("baseline exp approximation must be chebyshev");
  }
}

int baseline_scaling_exponent(double m, std::size_t n) {
  if (!(m > 0.0)) {
    throw ConfigError("input bound M must be positive");
  }
  const double ln_n = std::log(static_cast<double>(std::max<std::size_t>(n, 2)));
  return std::max(1, static_cast<int>(std::ceil(std::log2(m) - std::log2(ln_n))));
}

BaselineSpec BaselineSpec::for_input(double m, std::size_t n) {
  BaselineSpec spec;
  spec.k = baseline_scaling_exponent(m, n);
  spec.gs_iters = std::max(4, ceil_log2(n) + 2);
  return spec;
}

Ciphertext goldschmidt_inverse(Engine &engine, const Ciphertext &d, int gs_iters, double inv_range,
                               double input_scale, double output_scale) {
  if (gs_iters < 1 || !(inv_range > 0.0)) {
    throw ConfigError("goldschmidt needs gs_iters >= 1 and a positive range");
  }
  return goldschmidt(CipherBackend{&engine}, d, gs_iters, inv_range, input_scale, output_scale);
}

Ciphertext goldschmidt_inverse(Engine &engine, const Ciphertext &d, const BaselineSpec &spec) {
  spec.validate();
  if (spec.check_domain) {
    const auto slots = engine.decrypt(d);
    if (std::any_of(slots.begin(), slots.end(), [](double v) { return !(v > 0.0); })) {
      throw DomainError("goldschmidt input has nonpositive slots");
    }
  }
  return goldschmidt_inverse(engine, d, spec.gs_iters, spec.inv_range);
}

std::vector<double> goldschmidt_inverse_plain(std::span<const double> d, int gs_iters, double inv_range) {
  if (gs_iters < 1 || !(inv_range > 0.0)) {
    throw ConfigError("goldschmidt needs gs_iters >= 1 and a positive range");
  }
  if (std::any_of(d.begin(), d.end(), [](double v) { return !(v > 0.0); })) {
    throw DomainError("goldschmidt input has nonpositive entries");
  }
  return goldschmidt(PlainBackend{}, std::vector<double>(d.begin(), d.end()), gs_iters, inv_range, 1.0, 1.0);
}

std::vector<double> softmax_ns_plain(std::span<const double> x, int k, const std::optional<ExpApproxSpec> &exp_spec) {
  validate_softmax_input(x);
  if (k < 1) {
    throw ConfigError("normalize-and-square needs k >= 1");
  }
  const double scale = std::ldexp(1.0, -k);
  std::vector<double> p(x.size());
  if (exp_spec) {
    std::vector<double> scaled(x.size());
    std::transform(x.begin(), x.end(), scaled.begin(), [&](double v) { return v * scale; });
    p = aexp_plain(scaled, *exp_spec);
  } else {
    const double max = *std::max_element(x.begin(), x.end());
    std::transform(x.begin(), x.end(), p.begin(), [&](double v) { return std::exp((v - max) * scale); });
  }
  double sum = checked_sum(p);
  for (double &v : p) {
    v /= sum;
  }
  for (int i = 0; i < k; ++i) {
    for (double &v : p) {
      v *= v;
    }
    sum = checked_sum(p);
    for (double &v : p) {
      v /= sum;
    }
  }
  return p;
}

HeSoftmaxResult he_softmax_baseline(Engine &engine, const PackedMatrix &p, const BaselineSpec &spec) {
  spec.validate();
  if (p.cols != p.n2) {
    throw DomainError("softmax dimension " + std::to_string(p.cols) +
                      " is not a power of two; pad rows only, never columns");
  }
  const OpCounters before = engine.counters();
  const CipherBackend be{&engine};
  const double inv_n = 1.0 / static_cast<double>(p.n2);

  auto invert = [&](const Ciphertext &d, double scale) {
    if (spec.check_domain) {
      const auto slots = engine.decrypt(d);
      if (std::any_of(slots.begin(), slots.end(), [](double v) { return !(v > 0.0); })) {
        throw DomainError("goldschmidt input has nonpositive slots");
      }
    }
    return goldschmidt_inverse(engine, d, spec.gs_iters, spec.inv_range, scale, scale);
  };

  // exp(x / 2^k) with the 1/2^k folded into the map onto the Chebyshev domain.
  const AffineMap m = spec.exp_spec.input_map();
  const double scale = std::ldexp(m.scale, -spec.k);
  std::vector<Ciphertext> probs;
  probs.reserve(p.t);
  for (const auto &ct : p.cts) {
    probs.push_back(aexp_core(be, engine.add_plain(engine.pmult(ct, scale), m.offset), spec.exp_spec));
  }
  // Row sums are at most n2; scaling by 1/n2 moves them into (0, 1].
  Ciphertext inv = invert(reduce_rows(engine, probs, p), inv_n);
  for (auto &ct : probs) {
    ct = engine.cmult(ct, inv);
  }

  for (int iter = 0; iter < spec.k; ++iter) {
    for (auto &ct : probs) {
      ct = engine.square(ct);
    }
    inv = invert(reduce_rows(engine, probs, p), 1.0);
    for (auto &ct : probs) {
      ct = engine.cmult(ct, inv);
    }
  }

  HeSoftmaxResult result;
  result.output = p;
  result.output.cts = probs;
  int in_depth = 0;
  for (const auto &ct : p.cts) {
    in_depth = std::max(in_depth, ct.depth());
  }
  int out_depth = 0;
  for (const auto &ct : probs) {
    out_depth = std::max(out_depth, ct.depth());
  }
  SoftmaxReport &r = result.report;
  r.counters = engine.counters() - before;
  r.depth = out_depth - in_depth;
  r.k = spec.k;
  r.variant = "baseline";
  r.streams = p.t;
  r.boots = r.counters.n_boot;
  return result;
}

}  // namespace mgfmax

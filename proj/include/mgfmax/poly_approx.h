// Copyright The mgfmax Authors.
// SPDX-License-Identifier: Apache-2.0

// Polynomial approximations of exp and their evaluation on plaintext vectors
// and ciphertexts. Both evaluation paths instantiate the same templates, so in
// noiseless mode they perform the identical sequence of floating point
// operations slot by slot.

#pragma once

#include <bit>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "mgfmax/he_engine.h"

namespace mgfmax {

/// Smallest m with 2^m >= n (0 for n <= 1).
inline int ceil_log2(std::size_t n) {
  return n <= 1 ? 0 : static_cast<int>(std::bit_width(n - 1));
}

// Chebyshev series sum_i coeffs[i] T_i(u) with u the affine image of
// x in [lo, hi] onto [-1, 1].
struct ChebPoly {
  double lo = -1.0;
  double hi = 1.0;
  std::vector<double> coeffs;
  // Max |fit - target| over a 10,001-point uniform grid of [lo, hi].
  double fit_error = 0.0;

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  double to_unit(double x) const { return (2.0 * x - (lo + hi)) / (hi - lo); }
  // Clenshaw recurrence.
  double operator()(double x) const;
};

/// Interpolates target at the degree+1 Chebyshev nodes of [lo, hi].
ChebPoly chebyshev_fit(const std::function<double(double)> &target, double lo, double hi, int degree);
inline ChebPoly chebyshev_fit_exp(double lo, double hi, int degree) {
  return chebyshev_fit([](double x) { return std::exp(x); }, lo, hi, degree);
}

struct ChebyshevExp {
  ChebPoly poly;
  int k = 0;
};

struct LimitExp {
  int k = 1;
};

struct TaylorExp {
  int degree = 1;
  double x0 = 0.0;
};

// prepared = scale * x + offset is the only scalar step before the core of an
// approximation.
struct AffineMap {
  double scale = 1.0;
  double offset = 0.0;
};

class ExpApproxSpec {
 public:
  enum class Variant { kChebyshev, kLimit, kTaylor };

  static ExpApproxSpec chebyshev(int degree = 15, double lo = -8.0, double hi = 0.0, int k = 0);
  static ExpApproxSpec limit(int k);
  static ExpApproxSpec taylor(int degree, double x0);

  Variant variant() const { return static_cast<Variant>(impl_.index()); }
  std::string variant_name() const;
  // Number of squarings that undo the 1/2^k domain scaling (0 for Taylor).
  int k() const;
  // Levels consumed by aexp on a fresh input.
  int depth() const;

  const ChebyshevExp &as_chebyshev() const { return std::get<ChebyshevExp>(impl_); }
  const LimitExp &as_limit() const { return std::get<LimitExp>(impl_); }
  const TaylorExp &as_taylor() const { return std::get<TaylorExp>(impl_); }

  // Chebyshev: 1/2^k scaling fused with the map onto [-1, 1].
  // Limit: x/2^k + 1. Taylor: x - x0.
  AffineMap input_map() const;

  // Monomial coefficients of the Taylor polynomial in v = x - x0, rescaled to
  // the variable w = v / variable_scale, i.e. c_i * variable_scale^i.
  std::vector<double> taylor_coefficients(double variable_scale = 1.0) const;

 private:
  explicit ExpApproxSpec(std::variant<ChebyshevExp, LimitExp, TaylorExp> impl) : impl_(std::move(impl)) {}
  std::variant<ChebyshevExp, LimitExp, TaylorExp> impl_;
};

/// Named exponential approximations used for the reported models.
ExpApproxSpec exp_preset(const std::string &name);
std::vector<std::string> exp_preset_names();

// ---------------------------------------------------------------------------
// Arithmetic backends

struct PlainBackend {
  using Value = std::vector<double>;

  Value add(const Value &a, const Value &b) const;
  Value sub(const Value &a, const Value &b) const;
  Value add_scalar(const Value &a, double c) const;
  Value mul(const Value &a, const Value &b) const;
  Value mul_scalar(const Value &a, double c) const;
  Value mul_int(const Value &a, long c) const;
};

struct CipherBackend {
  using Value = Ciphertext;
  Engine *engine;

  Value add(const Value &a, const Value &b) const { return engine->add(a, b); }
  Value sub(const Value &a, const Value &b) const { return engine->sub(a, b); }
  Value add_scalar(const Value &a, double c) const { return engine->add_plain(a, c); }
  Value mul(const Value &a, const Value &b) const { return engine->cmult(a, b); }
  Value mul_scalar(const Value &a, double c) const { return engine->pmult(a, c); }
  Value mul_int(const Value &a, long c) const { return engine->pmult(a, static_cast<double>(c), true); }
};

enum class PolyBasis { kChebyshev, kPower };

namespace detail {

// Depth-aware baby-step/giant-step evaluation. A polynomial of degree d is
// evaluated within ceil(log2(d+1)) levels, counting every non-integer scalar
// multiplication as a level. Sub-polynomials below the baby-step size are
// summed directly from cached basis powers when the remaining level budget
// allows it; otherwise they are split by the largest power-of-two basis
// element, p = q * B_{2^j} + r.
template <class Backend>
class PolyEvaluator {
 public:
  using Value = typename Backend::Value;

  PolyEvaluator(const Backend &be, const Value &x, PolyBasis basis, int budget)
      : be_(be), basis_(basis), baby_(std::size_t{1} << ((budget + 1) / 2)) {
    powers_.emplace(1, x);
    x_ = &powers_.at(1);
  }

  Value evaluate(std::vector<double> c, int budget) {
    while (c.size() > 1 && c.back() == 0.0) {
      c.pop_back();
    }
    const std::size_t deg = c.size() - 1;
    if (deg == 0) {
      return be_.add_scalar(be_.mul_int(*x_, 0), c[0]);
    }
    if (deg < baby_ && ceil_log2(deg) + 1 <= budget) {
      return direct(c);
    }
    const std::size_t split = std::bit_floor(deg);
    if (ceil_log2(split) > budget - 1) {
      throw std::logic_error("polynomial depth budget too small");
    }
    auto [q, r] = divide(c, split);
    Value prod = be_.mul(evaluate(std::move(q), budget - 1), power(split));
    while (r.size() > 1 && r.back() == 0.0) {
      r.pop_back();
    }
    if (r.size() == 1) {
      return r[0] == 0.0 ? prod : be_.add_scalar(prod, r[0]);
    }
    return be_.add(prod, evaluate(std::move(r), budget));
  }

 private:
  Value direct(const std::vector<double> &c) {
    std::optional<Value> acc;
    for (std::size_t i = 1; i < c.size(); ++i) {
      if (c[i] == 0.0) {
        continue;
      }
      Value term = be_.mul_scalar(power(i), c[i]);
      acc = acc ? be_.add(*acc, term) : std::move(term);
    }
    Value out = acc ? std::move(*acc) : be_.mul_int(*x_, 0);
    return c[0] == 0.0 ? out : be_.add_scalar(out, c[0]);
  }

  std::pair<std::vector<double>, std::vector<double>> divide(const std::vector<double> &c, std::size_t split) const {
    const std::size_t deg = c.size() - 1;
    std::vector<double> q(deg - split + 1, 0.0);
    std::vector<double> r(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(split));
    if (basis_ == PolyBasis::kPower) {
      for (std::size_t i = 0; i < q.size(); ++i) {
        q[i] = c[split + i];
      }
      return {q, r};
    }
    // T_{s+i} = 2 T_s T_i - T_{s-i}
    q[0] = c[split];
    for (std::size_t i = 1; i < q.size(); ++i) {
      q[i] = 2.0 * c[split + i];
      r[split - i] -= c[split + i];
    }
    return {q, r};
  }

  const Value &power(std::size_t i) {
    if (auto it = powers_.find(i); it != powers_.end()) {
      return it->second;
    }
    Value v = compute_power(i);
    return powers_.emplace(i, std::move(v)).first->second;
  }

  Value compute_power(std::size_t i) {
    const std::size_t a = std::bit_floor(i - 1);
    const std::size_t b = i - a;
    if (basis_ == PolyBasis::kPower) {
      return be_.mul(power(a), power(b));
    }
    if (a == b) {
      // T_{2a} = 2 T_a^2 - 1
      return be_.add_scalar(be_.mul_int(be_.mul(power(a), power(a)), 2), -1.0);
    }
    // T_{a+b} = 2 T_a T_b - T_{a-b}
    return be_.sub(be_.mul_int(be_.mul(power(a), power(b)), 2), power(a - b));
  }

  const Backend &be_;
  PolyBasis basis_;
  std::size_t baby_;
  std::map<std::size_t, Value> powers_;
  const Value *x_ = nullptr;
};

}  // namespace detail

/// Evaluates sum_i coeffs[i] B_i(x) in ceil(log2(deg+1)) levels.
template <class Backend>
typename Backend::Value evaluate_polynomial(const Backend &be, const typename Backend::Value &x,
                                            std::span<const double> coeffs, PolyBasis basis) {
  if (coeffs.empty()) {
    throw std::invalid_argument("empty coefficient vector");
  }
  const int budget = ceil_log2(coeffs.size());
  detail::PolyEvaluator<Backend> eval(be, x, basis, budget);
  return eval.evaluate(std::vector<double>(coeffs.begin(), coeffs.end()), budget);
}

/// Applies the scalar preparation step of spec to x.
template <class Backend>
typename Backend::Value aexp_prepare(const Backend &be, const typename Backend::Value &x,
                                     const ExpApproxSpec &spec) {
  const AffineMap m = spec.input_map();
  if (spec.variant() == ExpApproxSpec::Variant::kTaylor) {
    return be.add_scalar(x, m.offset);
  }
  return be.add_scalar(be.mul_scalar(x, m.scale), m.offset);
}

/// Everything after the preparation step: the polynomial and the squarings.
/// For Taylor, taylor_scale rescales the variable (see taylor_coefficients).
template <class Backend>
typename Backend::Value aexp_core(const Backend &be, const typename Backend::Value &prepared,
                                  const ExpApproxSpec &spec, double taylor_scale = 1.0) {
  using Value = typename Backend::Value;
  Value y;
  switch (spec.variant()) {
    case ExpApproxSpec::Variant::kChebyshev:
      y = evaluate_polynomial(be, prepared, spec.as_chebyshev().poly.coeffs, PolyBasis::kChebyshev);
      break;
    case ExpApproxSpec::Variant::kLimit:
      y = prepared;
      break;
    case ExpApproxSpec::Variant::kTaylor: {
      const std::vector<double> c = spec.taylor_coefficients(taylor_scale);
      return evaluate_polynomial(be, prepared, c, PolyBasis::kPower);
    }
  }
  for (int i = 0; i < spec.k(); ++i) {
    y = be.mul(y, y);
  }
  return y;
}

template <class Backend>
typename Backend::Value aexp(const Backend &be, const typename Backend::Value &x, const ExpApproxSpec &spec) {
  return aexp_core(be, aexp_prepare(be, x, spec), spec);
}

std::vector<double> aexp_plain(std::span<const double> x, const ExpApproxSpec &spec);
Ciphertext aexp_cipher(Engine &engine, const Ciphertext &x, const ExpApproxSpec &spec);

/// Evaluates poly at the slots of x: one level for the map onto [-1, 1]
/// followed by ceil(log2(d+1)) levels of baby-step/giant-step evaluation.
Ciphertext eval_poly_ps(Engine &engine, const ChebPoly &poly, const Ciphertext &x);
std::vector<double> eval_poly_ps_plain(const ChebPoly &poly, std::span<const double> x);

}  // namespace mgfmax

// Copyright The mgfmax Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mgfmax/poly_approx.h"

#include <algorithm>
#include <numbers>

#include "mgfmax/errors.h"

namespace mgfmax {

namespace {

constexpr int kFitGridPoints = 10001;

}  // namespace

double ChebPoly::operator()(double x) const {
  const double u = to_unit(x);
  double b1 = 0.0;
  double b2 = 0.0;
  for (int i = degree(); i >= 1; --i) {
    const double b0 = coeffs[static_cast<std::size_t>(i)] + 2.0 * u * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return coeffs[0] + u * b1 - b2;
}

ChebPoly chebyshev_fit(const std::function<double(double)> &target, double lo, double hi, int degree) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw IntervalError("degenerate interval [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  if (degree < 0) {
    throw IntervalError("negative degree");
  }
  const auto n = static_cast<std::size_t>(degree) + 1;
  std::vector<double> f(n);
  std::vector<double> theta(n);
  for (std::size_t j = 0; j < n; ++j) {
    theta[j] = std::numbers::pi * (static_cast<double>(j) + 0.5) / static_cast<double>(n);
    f[j] = target(0.5 * (hi - lo) * std::cos(theta[j]) + 0.5 * (hi + lo));
  }
  ChebPoly p;
  p.lo = lo;
  p.hi = hi;
  p.coeffs.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      s += f[j] * std::cos(static_cast<double>(i) * theta[j]);
    }
    p.coeffs[i] = 2.0 * s / static_cast<double>(n);
  }
  p.coeffs[0] *= 0.5;

  double err = 0.0;
  for (int g = 0; g < kFitGridPoints; ++g) {
    const double x = lo + (hi - lo) * g / (kFitGridPoints - 1);
    err = std::max(err, std::abs(p(x) - target(x)));
  }
  p.fit_error = err;
  return p;
}

ExpApproxSpec ExpApproxSpec::chebyshev(int degree, double lo, double hi, int k) {
  if (k < 0) {
    throw ConfigError("chebyshev k must be nonnegative");
  }
  return ExpApproxSpec(ChebyshevExp{chebyshev_fit_exp(lo, hi, degree), k});
}

ExpApproxSpec ExpApproxSpec::limit(int k) {
  if (k < 1) {
    throw ConfigError("limit k must be positive");
  }
  return ExpApproxSpec(LimitExp{k});
}

ExpApproxSpec ExpApproxSpec::taylor(int degree, double x0) {
  if (degree < 0) {
    throw ConfigError("taylor degree must be nonnegative");
  }
  return ExpApproxSpec(TaylorExp{degree, x0});
}

std::string ExpApproxSpec::variant_name() const {
  switch (variant()) {
    case Variant::kChebyshev:
      return "chebyshev";
    case Variant::kLimit:
      return "limit";
    case Variant::kTaylor:
      return "taylor";
  }
  return "unknown";
}

int ExpApproxSpec::k() const {
  switch (variant()) {
    case Variant::kChebyshev:
      return as_chebyshev().k;
    case Variant::kLimit:
      return as_limit().k;
    case Variant::kTaylor:
      return 0;
  }
  return 0;
}

int ExpApproxSpec::depth() const {
  switch (variant()) {
    case Variant::kChebyshev: {
      const auto &c = as_chebyshev();
      return ceil_log2(c.poly.coeffs.size()) + c.k + 1;
    }
    case Variant::kLimit:
      return as_limit().k + 1;
    case Variant::kTaylor:
      return ceil_log2(static_cast<std::size_t>(as_taylor().degree) + 1);
  }
  return 0;
}

AffineMap ExpApproxSpec::input_map() const {
  switch (variant()) {
    case Variant::kChebyshev: {
      const auto &c = as_chebyshev();
      const double width = c.poly.hi - c.poly.lo;
      return {2.0 / (std::ldexp(1.0, c.k) * width), -(c.poly.lo + c.poly.hi) / width};
    }
    case Variant::kLimit:
      return {std::ldexp(1.0, -as_limit().k), 1.0};
    case Variant::kTaylor:
      return {1.0, -as_taylor().x0};
  }
  return {};
}

std::vector<double> ExpApproxSpec::taylor_coefficients(double variable_scale) const {
  const auto &t = as_taylor();
  std::vector<double> c(static_cast<std::size_t>(t.degree) + 1);
  double term = std::exp(t.x0);
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i > 0) {
      term *= variable_scale / static_cast<double>(i);
    }
    c[i] = term;
  }
  return c;
}

namespace {

struct Preset {
  const char *name;
  const char *variant;
  int k;
};

// k values per model and dataset; Taylor presets are the low-degree variants.
constexpr Preset kPresets[] = {
    {"llama-clinc150-chebyshev", "chebyshev", 3}, {"llama-banking77-chebyshev", "chebyshev", 3},
    {"llama-sst2-chebyshev", "chebyshev", 4},     {"vit-base-chebyshev", "chebyshev", 6},
    {"deit-base-chebyshev", "chebyshev", 3},      {"vit-tiny-chebyshev", "chebyshev", 1},
    {"deit-tiny-chebyshev", "chebyshev", 1},      {"llama-clinc150-limit", "limit", 6},
    {"llama-banking77-limit", "limit", 6},        {"llama-sst2-limit", "limit", 7},
    {"vit-base-limit", "limit", 8},               {"deit-base-limit", "limit", 6},
    {"vit-tiny-limit", "limit", 8},               {"deit-tiny-limit", "limit", 7},
};

}  // namespace

ExpApproxSpec exp_preset(const std::string &name) {
  for (const auto &p : kPresets) {
    if (name == p.name) {
      return std::string(p.variant) == "limit" ? ExpApproxSpec::limit(p.k) : ExpApproxSpec::chebyshev(15, -8.0, 0.0, p.k);
    }
  }
  if (name == "llama-low-degree") {
    return ExpApproxSpec::taylor(1, -3.0);
  }
  if (name == "vit-low-degree-3") {
    return ExpApproxSpec::taylor(3, -10.0);
  }
  if (name == "vit-low-degree-5") {
    return ExpApproxSpec::taylor(5, -10.0);
  }
  throw ConfigError("unknown preset '" + name + "'");
}

std::vector<std::string> exp_preset_names() {
  std::vector<std::string> names;
  for (const auto &p : kPresets) {
    names.emplace_back(p.name);
  }
  names.emplace_back("llama-low-degree");
  names.emplace_back("vit-low-degree-3");
  names.emplace_back("vit-low-degree-5");
  return names;
}

PlainBackend::Value PlainBackend::add(const Value &a, const Value &b) const {
  Value out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    out[i] = a[i] + b[i];
  }
  return out;
}

PlainBackend::Value PlainBackend::sub(const Value &a, const Value &b) const {
  Value out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    out[i] = a[i] - b[i];
  }
  return out;
}

PlainBackend::Value PlainBackend::add_scalar(const Value &a, double c) const {
  Value out(a);
  for (double &v : out) {
    v += c;
  }
  return out;
}

PlainBackend::Value PlainBackend::mul(const Value &a, const Value &b) const {
  Value out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    out[i] = a[i] * b[i];
  }
  return out;
}

PlainBackend::Value PlainBackend::mul_scalar(const Value &a, double c) const {
  Value out(a);
  for (double &v : out) {
    v = c * v;
  }
  return out;
}

PlainBackend::Value PlainBackend::mul_int(const Value &a, long c) const {
  return mul_scalar(a, static_cast<double>(c));
}

std::vector<double> aexp_plain(std::span<const double> x, const ExpApproxSpec &spec) {
  return aexp(PlainBackend{}, std::vector<double>(x.begin(), x.end()), spec);
}

Ciphertext aexp_cipher(Engine &engine, const Ciphertext &x, const ExpApproxSpec &spec) {
  return aexp(CipherBackend{&engine}, x, spec);
}

Ciphertext eval_poly_ps(Engine &engine, const ChebPoly &poly, const Ciphertext &x) {
  const CipherBackend be{&engine};
  const double width = poly.hi - poly.lo;
  const Ciphertext u = be.add_scalar(be.mul_scalar(x, 2.0 / width), -(poly.lo + poly.hi) / width);
  return evaluate_polynomial(be, u, poly.coeffs, PolyBasis::kChebyshev);
}

std::vector<double> eval_poly_ps_plain(const ChebPoly &poly, std::span<const double> x) {
  const PlainBackend be;
  const double width = poly.hi - poly.lo;
  const auto u = be.add_scalar(be.mul_scalar(std::vector<double>(x.begin(), x.end()), 2.0 / width),
                               -(poly.lo + poly.hi) / width);
  return evaluate_polynomial(be, u, poly.coeffs, PolyBasis::kChebyshev);
}

}  // namespace mgfmax

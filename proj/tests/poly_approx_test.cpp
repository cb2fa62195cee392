// Copyright The mgfmax Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "mgfmax/errors.h"
#include "mgfmax/poly_approx.h"

using namespace mgfmax;

namespace {

HeParams params(std::size_t s = 64, int levels = 20) {
  HeParams p;
  p.slot_count = s;
  p.max_level = levels;
  return p;
}

std::vector<double> uniform(std::size_t n, double lo, double hi, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (double &x : v) {
    x = u(rng);
  }
  return v;
}

double grid_error(const ExpApproxSpec &spec, double lo, double hi, std::size_t points) {
  std::vector<double> x(points);
  for (std::size_t i = 0; i < points; ++i) {
    x[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  const auto y = aexp_plain(x, spec);
  double err = 0.0;
  for (std::size_t i = 0; i < points; ++i) {
    err = std::max(err, std::abs(y[i] - std::exp(x[i])));
  }
  return err;
}

std::vector<ExpApproxSpec> all_specs() {
  std::vector<ExpApproxSpec> specs;
  for (int k = 0; k <= 6; ++k) {
    specs.push_back(ExpApproxSpec::chebyshev(15, -8.0, 0.0, k));
  }
  specs.push_back(ExpApproxSpec::chebyshev(7, -4.0, 0.0, 2));
  specs.push_back(ExpApproxSpec::chebyshev(1, -1.0, 0.0, 0));
  for (int k = 1; k <= 8; ++k) {
    specs.push_back(ExpApproxSpec::limit(k));
  }
  for (int d : {0, 1, 2, 3, 5, 7, 8, 12}) {
    specs.push_back(ExpApproxSpec::taylor(d, -3.0));
  }
  return specs;
}

}  // namespace

TEST(CeilLog2, Values) {
  EXPECT_EQ(ceil_log2(0), 0);
  EXPECT_EQ(ceil_log2(1), 0);
  EXPECT_EQ(ceil_log2(2), 1);
  EXPECT_EQ(ceil_log2(3), 2);
  EXPECT_EQ(ceil_log2(16), 4);
  EXPECT_EQ(ceil_log2(17), 5);
}

TEST(ChebyshevFit, DegreeZeroIsConstant) {
  const ChebPoly p = chebyshev_fit_exp(-1.0, 1.0, 0);
  ASSERT_EQ(p.coeffs.size(), 1u);
  // The single node of [-1, 1] is 0.
  EXPECT_DOUBLE_EQ(p.coeffs[0], 1.0);
  EXPECT_DOUBLE_EQ(p(-0.7), p(0.3));
}

TEST(ChebyshevFit, LocalLinearization) {
  const double eps = 1e-3;
  const ChebPoly p = chebyshev_fit_exp(0.0, eps, 1);
  for (double x : {0.0, 0.25e-3, 0.5e-3, 1e-3}) {
    EXPECT_NEAR(p(x), 1.0 + x, 1e-6);
  }
}

TEST(ChebyshevFit, DegenerateInterval) {
  EXPECT_THROW(chebyshev_fit_exp(0.0, 0.0, 3), IntervalError);
  EXPECT_THROW(chebyshev_fit_exp(1.0, -1.0, 3), IntervalError);
}

// Grid errors of the degree-d interpolant of exp on [-8, 0], computed
// independently in double precision and frozen.
TEST(ChebyshevFit, FrozenGridErrors) {
  const std::pair<int, double> expected[] = {{13, 1.165e-8}, {14, 1.504e-9}, {15, 1.8276e-10}, {16, 2.096e-11}};
  for (const auto &[d, err] : expected) {
    const ChebPoly p = chebyshev_fit_exp(-8.0, 0.0, d);
    EXPECT_NEAR(p.fit_error, err, 0.01 * err) << "degree " << d;
  }
}

// Best uniform approximation of degree 15 on [-8, 0], by linear programming
// on a dense grid: 1.4693e-10.
TEST(ChebyshevFit, NearMinimax) {
  const ChebPoly p = chebyshev_fit_exp(-8.0, 0.0, 15);
  EXPECT_LT(p.fit_error, 2.0 * 1.4693e-10);
  const ChebPoly p14 = chebyshev_fit_exp(-8.0, 0.0, 14);
  EXPECT_LT(p.fit_error, p14.fit_error);
}

TEST(ChebyshevFit, FitErrorMatchesGrid) {
  const ChebPoly p = chebyshev_fit_exp(-8.0, 0.0, 15);
  double err = 0.0;
  for (int i = 0; i <= 10000; ++i) {
    const double x = -8.0 + 8.0 * i / 10000.0;
    err = std::max(err, std::abs(p(x) - std::exp(x)));
  }
  EXPECT_DOUBLE_EQ(err, p.fit_error);
}

TEST(ExpApproxSpec, DepthFormulas) {
  EXPECT_EQ(ExpApproxSpec::chebyshev(15, -8, 0, 0).depth(), 5);
  EXPECT_EQ(ExpApproxSpec::chebyshev(15, -8, 0, 4).depth(), 9);
  EXPECT_EQ(ExpApproxSpec::chebyshev(7, -8, 0, 1).depth(), 5);
  EXPECT_EQ(ExpApproxSpec::limit(6).depth(), 7);
  EXPECT_EQ(ExpApproxSpec::taylor(1, -3).depth(), 1);
  EXPECT_EQ(ExpApproxSpec::taylor(3, -10).depth(), 2);
  EXPECT_EQ(ExpApproxSpec::taylor(5, -10).depth(), 3);
  EXPECT_EQ(ExpApproxSpec::taylor(0, 0).depth(), 0);
}

TEST(ExpApproxSpec, InvalidArguments) {
  EXPECT_THROW(ExpApproxSpec::limit(0), ConfigError);
  EXPECT_THROW(ExpApproxSpec::chebyshev(15, -8, 0, -1), ConfigError);
  EXPECT_THROW(ExpApproxSpec::taylor(-1, 0), ConfigError);
}

TEST(ExpApproxSpec, Presets) {
  EXPECT_EQ(exp_preset("llama-clinc150-chebyshev").k(), 3);
  EXPECT_EQ(exp_preset("vit-base-chebyshev").k(), 6);
  EXPECT_EQ(exp_preset("vit-tiny-chebyshev").k(), 1);
  EXPECT_EQ(exp_preset("vit-base-limit").k(), 8);
  EXPECT_EQ(exp_preset("deit-tiny-limit").k(), 7);
  EXPECT_EQ(exp_preset("llama-low-degree").as_taylor().x0, -3.0);
  EXPECT_EQ(exp_preset("vit-low-degree-5").as_taylor().degree, 5);
  EXPECT_EQ(exp_preset_names().size(), 17u);
  EXPECT_THROW(exp_preset("gpt-9"), ConfigError);
}

TEST(AexpPlain, WorkedValues) {
  const std::vector<double> at_x0{-3.0};
  EXPECT_NEAR(aexp_plain(at_x0, ExpApproxSpec::taylor(1, -3.0))[0], 0.049787068, 1e-9);
  const std::vector<double> minus_one{-1.0};
  // (1 - 1/64)^64, evaluated independently.
  EXPECT_NEAR(aexp_plain(minus_one, ExpApproxSpec::limit(6))[0], 0.3649865, 1e-7);
  const std::vector<double> zero{0.0};
  EXPECT_DOUBLE_EQ(aexp_plain(zero, ExpApproxSpec::limit(2))[0], 1.0);
  const std::vector<double> minus_four{-4.0};
  EXPECT_DOUBLE_EQ(aexp_plain(minus_four, ExpApproxSpec::limit(2))[0], 0.0);
}

TEST(AexpPlain, ChebyshevWithinFitError) {
  const auto spec = ExpApproxSpec::chebyshev(15, -8.0, 0.0, 0);
  EXPECT_LE(grid_error(spec, -8.0, 0.0, 10001), spec.as_chebyshev().poly.fit_error + 1e-9);
}

TEST(AexpPlain, TaylorConvergesOnSmallInterval) {
  EXPECT_LT(grid_error(ExpApproxSpec::taylor(12, 0.0), -0.1, 0.1, 101), 1e-15);
}

TEST(AexpPlain, LimitErrorDecreasesInK) {
  double previous = grid_error(ExpApproxSpec::limit(3), -8.0, 0.0, 10001);
  for (int k = 4; k <= 8; ++k) {
    const double err = grid_error(ExpApproxSpec::limit(k), -8.0, 0.0, 10001);
    EXPECT_LT(err, previous) << "k " << k;
    previous = err;
  }
}

TEST(AexpCipher, DepthExactAndMatchesPlain) {
  for (const auto &spec : all_specs()) {
    Engine e(params());
    double lo = -8.0 * std::ldexp(1.0, spec.k());
    if (spec.variant() == ExpApproxSpec::Variant::kTaylor) {
      lo = -4.0;
    } else if (spec.variant() == ExpApproxSpec::Variant::kLimit) {
      lo = -std::ldexp(1.0, spec.k());
    }
    const auto v = uniform(64, lo, 0.0, 11);
    const Ciphertext x = e.encrypt(v);
    const Ciphertext y = aexp_cipher(e, x, spec);
    EXPECT_EQ(x.level() - y.level(), spec.depth()) << spec.variant_name() << " k=" << spec.k();
    EXPECT_EQ(y.depth(), spec.depth());
    const auto plain = aexp_plain(v, spec);
    const auto got = e.decrypt(y);
    for (std::size_t i = 0; i < v.size(); ++i) {
      ASSERT_NEAR(got[i], plain[i], 1e-9);
    }
  }
}

TEST(AexpCipher, WorksAtExactLevel) {
  for (const auto &spec : all_specs()) {
    Engine e(params());
    const auto x = e.encrypt(uniform(8, -1.0, 0.0, 3), spec.depth());
    const auto y = aexp_cipher(e, x, spec);
    EXPECT_EQ(y.level(), 0);
    if (spec.depth() > 0) {
      const auto short_x = e.encrypt(uniform(8, -1.0, 0.0, 3), spec.depth() - 1);
      EXPECT_THROW(aexp_cipher(e, short_x, spec), LevelExhausted);
    }
  }
}

TEST(EvalPolyPs, DegreeFifteenUsesFiveLevels) {
  Engine e(params());
  const ChebPoly p = chebyshev_fit_exp(-8.0, 0.0, 15);
  const auto v = uniform(64, -8.0, 0.0, 5);
  const auto y = eval_poly_ps(e, p, e.encrypt(v));
  EXPECT_EQ(y.level(), 15);
  const auto got = e.decrypt(y);
  for (std::size_t i = 0; i < v.size(); ++i) {
    EXPECT_NEAR(got[i], p(v[i]), 1e-9);
  }
  EXPECT_EQ(e.counters().n_cmult, 8u);
}

TEST(EvalPolyPs, AllDegreesWithinBudget) {
  for (int d = 0; d <= 40; ++d) {
    Engine e(params(16, 20));
    const ChebPoly p = chebyshev_fit([](double x) { return std::sin(3 * x) + x * x; }, -1.0, 2.0, d);
    const auto v = uniform(16, -1.0, 2.0, static_cast<std::uint64_t>(d));
    const auto y = eval_poly_ps(e, p, e.encrypt(v));
    EXPECT_LE(20 - y.level(), ceil_log2(static_cast<std::size_t>(d) + 1) + 1) << "degree " << d;
    const auto got = e.decrypt(y);
    for (std::size_t i = 0; i < v.size(); ++i) {
      ASSERT_NEAR(got[i], p(v[i]), 1e-9) << "degree " << d;
    }
    const auto plain = eval_poly_ps_plain(p, v);
    for (std::size_t i = 0; i < v.size(); ++i) {
      ASSERT_EQ(got[i], plain[i]);
    }
  }
}

TEST(EvalPolyPs, ConstantPolynomial) {
  Engine e(params());
  ChebPoly p;
  p.lo = -8.0;
  p.hi = 0.0;
  p.coeffs = {0.25};
  const auto y = eval_poly_ps(e, p, e.encrypt(uniform(64, -8, 0, 1)));
  EXPECT_EQ(e.decrypt(y), std::vector<double>(64, 0.25));
  EXPECT_EQ(e.counters().n_cmult, 0u);
}

TEST(EvaluatePolynomial, PowerBasisMatchesHorner) {
  for (int d = 0; d <= 20; ++d) {
    std::vector<double> c(static_cast<std::size_t>(d) + 1);
    for (int i = 0; i <= d; ++i) {
      c[static_cast<std::size_t>(i)] = 1.0 / (1.0 + i);
    }
    const auto v = uniform(8, -1.0, 1.0, 9);
    const auto got = evaluate_polynomial(PlainBackend{}, v, c, PolyBasis::kPower);
    for (std::size_t j = 0; j < v.size(); ++j) {
      double h = 0.0;
      for (int i = d; i >= 0; --i) {
        h = h * v[j] + c[static_cast<std::size_t>(i)];
      }
      ASSERT_NEAR(got[j], h, 1e-12);
    }
  }
}

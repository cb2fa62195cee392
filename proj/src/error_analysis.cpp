// Copyright The mgfmax Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mgfmax/error_analysis.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <random>
#include <thread>

#include "json.hpp"
#include "mgfmax/errors.h"

namespace mgfmax {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::mt19937_64 trial_generator(std::uint64_t seed, std::size_t trial) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(trial)));
}

void check_mc_args(std::size_t n, double sigma, std::size_t trials) {
  if (n == 0) {
    throw EmptyInput("Monte-Carlo vector length must be positive");
  }
  if (trials == 0) {
    throw ConfigError("Monte-Carlo needs at least one trial");
  }
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw DomainError("sigma must be a finite nonnegative number");
  }
}

}  // namespace

double relative_error_with_cgf(std::span<const double> x, double cgf) {
  validate_softmax_input(x);
  double acc = 0.0;
  for (double v : x) {
    acc += std::exp(v - cgf);
  }
  return std::abs(1.0 - acc / static_cast<double>(x.size()));
}

double relative_error(std::span<const double> x, Family family) {
  return relative_error_with_cgf(x, cgf_at_one(estimate_stats(x, family)));
}

double relative_error_inf_norm(std::span<const double> x, Family family) {
  const auto exact = softmax_exact(x);
  const auto approx = mgf_softmax_plain(x, family);
  double diff = 0.0;
  double norm = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    diff = std::max(diff, std::abs(exact[i] - approx[i]));
    norm = std::max(norm, std::abs(exact[i]));
  }
  return diff / norm;
}

double standard_normal_cdf(double z) {
  return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

TailProbability p_eta_analytic(double delta, std::size_t n, double mu_y, double sigma_y) {
  if (!(delta >= 0.0)) {
    throw DomainError("delta must be nonnegative");
  }
  if (n == 0) {
    throw EmptyInput("n must be positive");
  }
  if (!(sigma_y > 0.0)) {
    return {0.0, true};
  }
  const double z = delta * mu_y * std::sqrt(static_cast<double>(n)) / sigma_y;
  // 2 (1 - Phi(z)) without cancellation.
  return {std::erfc(z / std::sqrt(2.0)), false};
}

TailProbability p_eta_gaussian(double delta, std::size_t n, double sigma) {
  return p_eta_analytic(delta, n, 1.0, std::sqrt(std::expm1(sigma * sigma)));
}

std::vector<double> sample_relative_errors(std::size_t n, double sigma, std::size_t trials, std::uint64_t seed,
                                           McOptions options) {
  check_mc_args(n, sigma, trials);
  std::vector<double> eta(trials);
  auto run = [&](std::size_t first, std::size_t stride) {
    std::vector<double> x(n);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t trial = first; trial < trials; trial += stride) {
      auto gen = trial_generator(seed, trial);
      normal.reset();
      for (double &v : x) {
        v = sigma * normal(gen);
      }
      const double cgf = options.mode == McMode::kTrueParameters
                             ? 0.5 * sigma * sigma
                             : cgf_at_one(estimate_stats(x, Family::kGaussian));
      eta[trial] = relative_error_with_cgf(x, cgf);
    }
  };

  unsigned threads = options.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : options.threads;
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, trials));
  if (threads <= 1) {
    run(0, 1);
    return eta;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned i = 0; i < threads; ++i) {
    pool.emplace_back(run, i, threads);
  }
  for (auto &th : pool) {
    th.join();
  }
  return eta;
}

double p_eta_monte_carlo(double delta, std::size_t n, double sigma, std::size_t trials, std::uint64_t seed,
                         McOptions options) {
  const auto eta = sample_relative_errors(n, sigma, trials, seed, options);
  const auto hits = std::count_if(eta.begin(), eta.end(), [&](double e) { return e >= delta; });
  return static_cast<double>(hits) / static_cast<double>(trials);
}

double mean_relative_error(std::size_t n, double sigma, std::size_t trials, std::uint64_t seed,
                           McOptions options) {
  const auto eta = sample_relative_errors(n, sigma, trials, seed, options);
  return std::accumulate(eta.begin(), eta.end(), 0.0) / static_cast<double>(trials);
}

double binomial_stderr(double p, std::size_t trials) {
  return std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

double approx_max_error(const ExpApproxSpec &spec, double lo, double hi, std::size_t grid_points) {
  if (grid_points < 2) {
    throw ConfigError("approx_max_error needs at least two grid points");
  }
  if (!(lo < hi)) {
    throw IntervalError("empty interval");
  }
  std::vector<double> x(grid_points);
  for (std::size_t i = 0; i < grid_points; ++i) {
    x[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid_points - 1);
  }
  const auto y = aexp_plain(x, spec);
  double err = 0.0;
  for (std::size_t i = 0; i < grid_points; ++i) {
    err = std::max(err, std::abs(y[i] - std::exp(x[i])));
  }
  return err;
}

void ErrorReport::validate() const {
  auto is_prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!(eta >= 0.0) || !is_prob(p_eta_analytic) || !is_prob(p_eta_mc)) {
    throw DomainError("error report holds an invalid probability or eta");
  }
}

std::string ErrorReport::to_json() const {
  nlohmann::ordered_json j;
  j["eta"] = eta;
  j["delta"] = delta;
  j["p_eta_analytic"] = p_eta_analytic;
  j["p_eta_mc"] = p_eta_mc;
  j["n"] = n;
  j["trials"] = trials;
  j["mu_Y"] = mu_y;
  j["sigma_Y"] = sigma_y;
  j["seed"] = seed;
  j["generator"] = generator;
  return j.dump(2);
}

ErrorReport make_error_report(double delta, std::size_t n, double sigma, std::size_t trials, std::uint64_t seed,
                              McOptions options) {
  const auto eta = sample_relative_errors(n, sigma, trials, seed, options);
  ErrorReport r;
  r.delta = delta;
  r.n = n;
  r.trials = trials;
  r.seed = seed;
  r.mu_y = std::exp(0.5 * sigma * sigma);
  r.sigma_y = r.mu_y * std::sqrt(std::expm1(sigma * sigma));
  r.eta = std::accumulate(eta.begin(), eta.end(), 0.0) / static_cast<double>(trials);
  r.p_eta_analytic = p_eta_analytic(delta, n, r.mu_y, r.sigma_y).value;
  const auto hits = std::count_if(eta.begin(), eta.end(), [&](double e) { return e >= delta; });
  r.p_eta_mc = static_cast<double>(hits) / static_cast<double>(trials);
  r.validate();
  return r;
}

std::vector<SweepRow> error_sweep(std::span<const double> deltas, std::span<const std::size_t> ns,
                                  std::span<const double> sigmas, std::size_t trials, std::uint64_t seed,
                                  McOptions options) {
  std::vector<SweepRow> rows;
  for (double sigma : sigmas) {
    for (std::size_t n : ns) {
      // One sample of eta values serves every delta.
      const auto eta = sample_relative_errors(n, sigma, trials, seed, options);
      for (double delta : deltas) {
        SweepRow row;
        row.delta = delta;
        row.n = n;
        row.sigma = sigma;
        row.p_analytic = p_eta_gaussian(delta, n, sigma).value;
        const auto hits = std::count_if(eta.begin(), eta.end(), [&](double e) { return e >= delta; });
        row.p_mc = static_cast<double>(hits) / static_cast<double>(trials);
        row.stderr_mc = binomial_stderr(row.p_mc, trials);
        rows.push_back(row);
      }
    }
  }
  return rows;
}

void write_sweep_csv(std::ostream &out, std::span<const SweepRow> rows) {
  out << "delta,n,sigma,p_analytic,p_mc,stderr\n";
  char buf[256];
  for (const auto &r : rows) {
    std::snprintf(buf, sizeof buf, "%.6g,%zu,%.6g,%.10g,%.10g,%.10g\n", r.delta, r.n, r.sigma, r.p_analytic,
                  r.p_mc, r.stderr_mc);
    out << buf;
  }
}

}  // namespace mgfmax

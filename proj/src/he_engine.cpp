// Copyright The mgfmax Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mgfmax/he_engine.h"

#include <algorithm>
#include <bit>

#include "json.hpp"
#include "mgfmax/errors.h"

namespace mgfmax {

namespace {

std::atomic<std::uint64_t> next_engine_id{1};

}  // namespace

void HeParams::validate() const {
  if (slot_count == 0 || !std::has_single_bit(slot_count)) {
    throw ConfigError("slot_count must be a positive power of two, got " + std::to_string(slot_count));
  }
  if (max_level < 1) {
    throw ConfigError("max_level must be at least 1");
  }
  if (!(noise_stddev >= 0.0)) {
    throw ConfigError("noise_stddev must be nonnegative");
  }
}

OpCounters OpCounters::operator-(const OpCounters &rhs) const {
  OpCounters d;
  d.n_add = n_add - rhs.n_add;
  d.n_pmult = n_pmult - rhs.n_pmult;
  d.n_cmult = n_cmult - rhs.n_cmult;
  d.n_rot = n_rot - rhs.n_rot;
  d.n_boot = n_boot - rhs.n_boot;
  d.depth_consumed = depth_consumed;
  return d;
}

Engine::Engine(HeParams params, std::uint64_t noise_seed)
    : params_(params), id_(next_engine_id.fetch_add(1)), noise_rng_(noise_seed) {
  params_.validate();
}

std::vector<double> Engine::padded(std::span<const double> values) const {
  if (values.size() > params_.slot_count) {
    throw CapacityError("plaintext of length " + std::to_string(values.size()) + " exceeds slot count " +
                        std::to_string(params_.slot_count));
  }
  std::vector<double> out(params_.slot_count, 0.0);
  std::copy(values.begin(), values.end(), out.begin());
  return out;
}

Ciphertext Engine::encrypt(std::span<const double> values) const {
  return encrypt(values, params_.max_level);
}

Ciphertext Engine::encrypt(std::span<const double> values, int level) const {
  if (level < 0 || level > params_.max_level) {
    throw ConfigError("initial level " + std::to_string(level) + " outside [0, " +
                      std::to_string(params_.max_level) + "]");
  }
  return Ciphertext(padded(values), level, 0, id_);
}

std::vector<double> Engine::decrypt(const Ciphertext &ct) const {
  check_engine(ct);
  return std::vector<double>(ct.slots().begin(), ct.slots().end());
}

void Engine::check_engine(const Ciphertext &ct) const {
  if (!ct.valid() || ct.engine_id() != id_) {
    throw EngineMismatch("ciphertext does not belong to engine " + std::to_string(id_));
  }
}

void Engine::record_depth(int depth) {
  int seen = max_depth_.load(std::memory_order_relaxed);
  while (depth > seen && !max_depth_.compare_exchange_weak(seen, depth, std::memory_order_relaxed)) {
  }
}

void Engine::apply_noise(std::vector<double> &slots) {
  if (params_.noise_stddev <= 0.0) {
    return;
  }
  std::normal_distribution<double> eps(0.0, params_.noise_stddev);
  std::lock_guard lock(noise_mutex_);
  for (double &v : slots) {
    v *= 1.0 + eps(noise_rng_);
  }
}

Ciphertext Engine::refresh_if_exhausted(const Ciphertext &ct, const char *op) {
  if (ct.level() > 0) {
    return ct;
  }
  if (!params_.auto_bootstrap) {
    throw LevelExhausted(op, ct.level());
  }
  return bootstrap(ct);
}

Ciphertext Engine::finish_leveled(std::vector<double> slots, int level, int depth) {
  apply_noise(slots);
  record_depth(depth);
  Ciphertext out(std::move(slots), level, depth, id_);
  if (level == 0 && params_.auto_bootstrap) {
    return bootstrap(out);
  }
  return out;
}

Ciphertext Engine::add(const Ciphertext &a, const Ciphertext &b) {
  check_engine(a);
  check_engine(b);
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = a.slots()[i] + b.slots()[i];
  }
  n_add_.fetch_add(1, std::memory_order_relaxed);
  return Ciphertext(std::move(out), std::min(a.level(), b.level()), std::max(a.depth(), b.depth()), id_);
}

Ciphertext Engine::sub(const Ciphertext &a, const Ciphertext &b) {
  check_engine(a);
  check_engine(b);
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = a.slots()[i] - b.slots()[i];
  }
  n_add_.fetch_add(1, std::memory_order_relaxed);
  return Ciphertext(std::move(out), std::min(a.level(), b.level()), std::max(a.depth(), b.depth()), id_);
}

Ciphertext Engine::add_plain(const Ciphertext &a, double scalar) {
  check_engine(a);
  std::vector<double> out(a.slots().begin(), a.slots().end());
  for (double &v : out) {
    v += scalar;
  }
  n_add_.fetch_add(1, std::memory_order_relaxed);
  return Ciphertext(std::move(out), a.level(), a.depth(), id_);
}

Ciphertext Engine::add_plain(const Ciphertext &a, std::span<const double> plain) {
  check_engine(a);
  std::vector<double> p = padded(plain);
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] += a.slots()[i];
  }
  n_add_.fetch_add(1, std::memory_order_relaxed);
  return Ciphertext(std::move(p), a.level(), a.depth(), id_);
}

Ciphertext Engine::pmult(const Ciphertext &a, double scalar, bool integer_hint) {
  std::vector<double> plain(params_.slot_count, scalar);
  return pmult(a, std::span<const double>(plain), integer_hint);
}

Ciphertext Engine::pmult(const Ciphertext &a, std::span<const double> plain, bool integer_hint) {
  check_engine(a);
  std::vector<double> p = padded(plain);
  if (integer_hint) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      p[i] *= a.slots()[i];
    }
    n_pmult_.fetch_add(1, std::memory_order_relaxed);
    return Ciphertext(std::move(p), a.level(), a.depth(), id_);
  }
  const Ciphertext in = refresh_if_exhausted(a, "pmult");
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] *= in.slots()[i];
  }
  n_pmult_.fetch_add(1, std::memory_order_relaxed);
  return finish_leveled(std::move(p), in.level() - 1, in.depth() + 1);
}

Ciphertext Engine::cmult(const Ciphertext &a, const Ciphertext &b) {
  check_engine(a);
  check_engine(b);
  const Ciphertext x = refresh_if_exhausted(a, "cmult");
  const Ciphertext y = &a == &b ? x : refresh_if_exhausted(b, "cmult");
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = x.slots()[i] * y.slots()[i];
  }
  n_cmult_.fetch_add(1, std::memory_order_relaxed);
  return finish_leveled(std::move(out), std::min(x.level(), y.level()) - 1, std::max(x.depth(), y.depth()) + 1);
}

Ciphertext Engine::rotate(const Ciphertext &a, long steps) {
  check_engine(a);
  const auto s = static_cast<long>(a.size());
  const long shift = ((steps % s) + s) % s;
  std::vector<double> out(a.size());
  std::rotate_copy(a.slots().begin(), a.slots().begin() + shift, a.slots().end(), out.begin());
  n_rot_.fetch_add(1, std::memory_order_relaxed);
  return Ciphertext(std::move(out), a.level(), a.depth(), id_);
}

Ciphertext Engine::bootstrap(const Ciphertext &a) {
  check_engine(a);
  n_boot_.fetch_add(1, std::memory_order_relaxed);
  return Ciphertext(std::vector<double>(a.slots().begin(), a.slots().end()), params_.max_level, a.depth(), id_);
}

OpCounters Engine::counters() const {
  OpCounters c;
  c.n_add = n_add_.load();
  c.n_pmult = n_pmult_.load();
  c.n_cmult = n_cmult_.load();
  c.n_rot = n_rot_.load();
  c.n_boot = n_boot_.load();
  c.depth_consumed = max_depth_.load();
  return c;
}

void Engine::reset_counters() {
  n_add_ = 0;
  n_pmult_ = 0;
  n_cmult_ = 0;
  n_rot_ = 0;
  n_boot_ = 0;
  max_depth_ = 0;
}

std::string Engine::debug_dump(const Ciphertext &ct) const {
  check_engine(ct);
  nlohmann::json j;
  j["slots"] = std::vector<double>(ct.slots().begin(), ct.slots().end());
  j["level"] = ct.level();
  return j.dump();
}

}  // namespace mgfmax

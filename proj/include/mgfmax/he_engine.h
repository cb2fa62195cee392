// Copyright The mgfmax Authors.
// SPDX-License-Identifier: Apache-2.0

// A plaintext-backed simulator of a leveled SIMD homomorphic encryption
// scheme. Slot arithmetic is exact double precision; what the engine models
// faithfully is the level budget, the multiplicative depth of every value and
// the operation counts a CKKS backend would incur.

#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace mgfmax {

struct HeParams {
  std::size_t slot_count = std::size_t{1} << 15;
  int max_level = 10;
  // Relative Gaussian perturbation applied by every level-consuming op.
  double noise_stddev = 0.0;
  // Refresh a ciphertext as soon as an operation leaves it at level 0, and
  // before any level-consuming op on a level-0 operand.
  bool auto_bootstrap = false;

  // Throws ConfigError when an invariant does not hold.
  void validate() const;
};

struct OpCounters {
  std::uint64_t n_add = 0;
  std::uint64_t n_pmult = 0;
  std::uint64_t n_cmult = 0;
  std::uint64_t n_rot = 0;
  std::uint64_t n_boot = 0;
  // Longest chain of level-consuming operations behind any ciphertext the
  // engine produced. Bootstrapping does not reset it.
  int depth_consumed = 0;

  // Count-wise difference; depth_consumed is carried over from *this.
  OpCounters operator-(const OpCounters &rhs) const;
  bool operator==(const OpCounters &) const = default;
};

class Engine;

// Immutable value; copies share the slot buffer.
class Ciphertext {
 public:
  Ciphertext() = default;

  std::span<const double> slots() const { return *slots_; }
  std::size_t size() const { return slots_ ? slots_->size() : 0; }
  int level() const { return level_; }
  // Number of level-consuming operations on the longest dependency chain
  // that produced this ciphertext.
  int depth() const { return depth_; }
  std::uint64_t engine_id() const { return engine_id_; }
  bool valid() const { return static_cast<bool>(slots_); }

 private:
  friend class Engine;
  Ciphertext(std::vector<double> slots, int level, int depth, std::uint64_t engine_id)
      : slots_(std::make_shared<const std::vector<double>>(std::move(slots))),
        level_(level),
        depth_(depth),
        engine_id_(engine_id) {}

  std::shared_ptr<const std::vector<double>> slots_;
  int level_ = 0;
  int depth_ = 0;
  std::uint64_t engine_id_ = 0;
};

// Evaluation context. Counters are shared by every ciphertext created under
// the engine; all operations are safe to call concurrently.
class Engine {
 public:
  explicit Engine(HeParams params, std::uint64_t noise_seed = 0x5eed);
  Engine(const Engine &) = delete;
  Engine &operator=(const Engine &) = delete;

  const HeParams &params() const { return params_; }
  std::size_t slot_count() const { return params_.slot_count; }
  std::uint64_t id() const { return id_; }

  Ciphertext encrypt(std::span<const double> values) const;
  Ciphertext encrypt(std::span<const double> values, int level) const;
  std::vector<double> decrypt(const Ciphertext &ct) const;

  Ciphertext add(const Ciphertext &a, const Ciphertext &b);
  Ciphertext sub(const Ciphertext &a, const Ciphertext &b);
  Ciphertext add_plain(const Ciphertext &a, double scalar);
  Ciphertext add_plain(const Ciphertext &a, std::span<const double> plain);

  // Non-integer plaintext products consume a level; integer_hint declares the
  // plaintext integral, which makes the product level-free.
  Ciphertext pmult(const Ciphertext &a, double scalar, bool integer_hint = false);
  Ciphertext pmult(const Ciphertext &a, std::span<const double> plain, bool integer_hint = false);

  Ciphertext cmult(const Ciphertext &a, const Ciphertext &b);
  Ciphertext square(const Ciphertext &a) { return cmult(a, a); }

  // Cyclic left shift by steps (mod slot count, negative allowed).
  Ciphertext rotate(const Ciphertext &a, long steps);

  Ciphertext bootstrap(const Ciphertext &a);

  OpCounters counters() const;
  void reset_counters();

  // {"slots": [...], "level": L}
  std::string debug_dump(const Ciphertext &ct) const;

 private:
  void check_engine(const Ciphertext &ct) const;
  Ciphertext refresh_if_exhausted(const Ciphertext &ct, const char *op);
  Ciphertext finish_leveled(std::vector<double> slots, int level, int depth);
  void record_depth(int depth);
  void apply_noise(std::vector<double> &slots);
  std::vector<double> padded(std::span<const double> values) const;

  HeParams params_;
  std::uint64_t id_;

  std::atomic<std::uint64_t> n_add_{0};
  std::atomic<std::uint64_t> n_pmult_{0};
  std::atomic<std::uint64_t> n_cmult_{0};
  std::atomic<std::uint64_t> n_rot_{0};
  std::atomic<std::uint64_t> n_boot_{0};
  std::atomic<int> max_depth_{0};

  std::mutex noise_mutex_;
  std::mt19937_64 noise_rng_;
};

}  // namespace mgfmax

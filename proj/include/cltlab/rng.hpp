#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace cltlab {

/// A (seed, stream) pair. Together they fully determine a generator's output.
struct RandomSeed {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;

  /// Derived sub-stream: stable, order-independent, and distinct per tag.
  RandomSeed child(std::uint64_t tag) const;

  friend bool operator==(const RandomSeed&, const RandomSeed&) = default;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Philox4x32-10 counter-based bit generator (Salmon et al. 2011).
///
/// The 64-bit seed is the key; the counter is (block index, stream id), so any
/// stream can be positioned without generating its predecessors.
class Philox4x32 {
 public:
  using result_type = std::uint32_t;
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  explicit Philox4x32(RandomSeed seed);

  static Counter encrypt(Counter ctr, Key key);

  result_type operator()();
  std::uint64_t next_u64();

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

 private:
  void refill();

  Key key_{};
  std::uint64_t stream_ = 0;
  std::uint64_t block_ = 0;
  Counter buffer_{};
  int next_ = 4;
};

/// Scalar variate generation on top of Philox. Algorithms are spelled out here
/// (not delegated to <random> distributions) so that sequences are identical
/// across standard library implementations.
class Rng {
 public:
  explicit Rng(RandomSeed seed) : seed_(seed), engine_(seed) {}

  std::uint64_t next_u64() { return engine_.next_u64(); }
  /// Uniform on [0, 1).
  double uniform();
  /// Uniform on the open interval (0, 1).
  double uniform_open();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  /// Exp(1).
  double exponential();

  RandomSeed seed() const { return seed_; }
  Philox4x32& engine() { return engine_; }

 private:
  RandomSeed seed_;
  Philox4x32 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace cltlab

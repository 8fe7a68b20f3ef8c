#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace scgl {

/// Seedable, platform-independent random stream.
///
/// Wraps std::mt19937_64 (whose output sequence is fixed by the standard) and
/// derives all floating-point draws itself, since the standard distributions
/// are implementation-defined. Stream splitting: Rng(seed, stream) seeds the
/// engine with splitmix64(seed ^ splitmix64(stream)), so streams with distinct
/// ids are independent for practical purposes and reproducible everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  /// Child stream; the same (seed, stream, id) always yields the same child.
  Rng split(std::uint64_t id) const;

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal (Marsaglia polar method).
  double normal();
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

  /// Uniformly random permutation of 0..count-1 (Fisher-Yates).
  std::vector<std::size_t> permutation(std::size_t count);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace scgl

#pragma once

#include <cstdint>
#include <random>

namespace censnv {

/// Portable random stream keyed by (seed, stream index).
///
/// The engine is a 64-bit Mersenne twister whose output sequence is fixed by
/// the standard; uniforms are built from the raw 53 high bits instead of
/// std::uniform_real_distribution, whose algorithm is implementation-defined.
/// Two streams with the same key produce identical draws on every platform.
class RngStream {
public:
  RngStream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  /// Uniform draw on the open interval (0, 1).
  double uniform();

  /// Uniform integer on the closed range [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  std::uint64_t next_u64() { return engine_(); }

  /// Independent child stream, e.g. one per replication.
  RngStream derive(std::uint64_t index) const;

private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer, used for key mixing.
std::uint64_t mix64(std::uint64_t x);

} // namespace censnv

#pragma once

#include <cstdint>
#include <random>

#include "sgps/signal.hpp"

namespace sgps {

/// Seeded random stream. The engine is std::mt19937_64 seeded through
/// std::seed_seq from the four 32-bit halves of (seed, stream_id); both are
/// fully specified by the C++ standard, so a (seed, stream_id) pair produces
/// the same raw sequence on every conforming platform. Normal deviates use
/// the Box-Muller transform on 53-bit uniforms instead of
/// std::normal_distribution, whose algorithm is implementation-defined.
///
/// Owned by one task at a time; derive independent streams with split().
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  /// New stream with the same seed and a stream id mixed from this stream's
  /// id and `key`. Does not advance this stream.
  RngStream split(std::uint64_t key) const;

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1).
  double uniform();
  double normal();

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// splitmix64 finalizer, used to mix stream ids.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// n i.i.d. standard normal entries. Throws ArgumentError when n == 0.
Signal gaussian_vector(RngStream& rng, std::size_t n);
/// Standard normal entries with the given shape.
Signal gaussian_like(RngStream& rng, const Shape& shape);

}  // namespace sgps

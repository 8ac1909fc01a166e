#include "sgps/rng.hpp"

#include <cmath>
#include <numbers>

#include "sgps/error.hpp"

namespace sgps {
namespace {

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_id),
                    static_cast<std::uint32_t>(stream_id >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), engine_(make_engine(seed, stream_id)) {}

RngStream RngStream::split(std::uint64_t key) const {
  return RngStream(seed_, mix64(stream_id_ ^ mix64(key + 0x632be59bd9b4e019ULL)));
}

double RngStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

Signal gaussian_vector(RngStream& rng, std::size_t n) {
  if (n == 0) throw ArgumentError("gaussian_vector: n must be >= 1");
  return gaussian_like(rng, Shape::vector(n));
}

Signal gaussian_like(RngStream& rng, const Shape& shape) {
  Signal out(shape);
  for (double& v : out.values()) v = rng.normal();
  return out;
}

}  // namespace sgps

#pragma once

#include <string>

#include "sgps/signal.hpp"

namespace sgps::harness {

/// Reads a binary (P5) PGM, 8- or 16-bit, into a grid with values divided by
/// maxval. Throws Error naming the path on any I/O or format problem.
Signal read_pgm(const std::string& path);

/// Writes a grid as binary PGM with the given bit depth (8 or 16). Values are
/// clamped to [0, 1] and rounded to the nearest level.
void write_pgm(const std::string& path, const Signal& image, int bits = 16);

}  // namespace sgps::harness

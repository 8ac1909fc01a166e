#include "sgps/harness/pgm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <vector>

#include "sgps/error.hpp"

namespace sgps::harness {
namespace {

// Skips whitespace and '#' comments, then reads one unsigned decimal field.
std::size_t read_field(std::istream& in, const std::string& path) {
  int ch = in.get();
  while (in) {
    if (ch == '#') {
      while (in && ch != '\n') ch = in.get();
    } else if (std::isspace(ch)) {
      ch = in.get();
    } else {
      break;
    }
  }
  if (!in || !std::isdigit(ch)) throw Error(path + ": malformed PGM header");
  std::size_t value = 0;
  while (in && std::isdigit(ch)) {
    value = value * 10 + static_cast<std::size_t>(ch - '0');
    if (value > (1u << 24)) throw Error(path + ": PGM header field out of range");
    ch = in.get();
  }
  // The single whitespace byte after maxval has been consumed here.
  return value;
}

}  // namespace

Signal read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (!in || magic[0] != 'P' || magic[1] != '5') throw Error(path + ": not a binary PGM (P5)");
  const std::size_t width = read_field(in, path);
  const std::size_t height = read_field(in, path);
  const std::size_t maxval = read_field(in, path);
  if (width == 0 || height == 0) throw Error(path + ": empty image");
  if (maxval == 0 || maxval > 65535) throw Error(path + ": maxval must be in 1..65535");

  const std::size_t bytes = maxval < 256 ? 1 : 2;
  std::vector<unsigned char> raw(width * height * bytes);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size()) throw Error(path + ": truncated pixel data");

  std::vector<double> values(width * height);
  const double scale = 1.0 / static_cast<double>(maxval);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const unsigned level = bytes == 1 ? raw[i] : (static_cast<unsigned>(raw[2 * i]) << 8) | raw[2 * i + 1];
    values[i] = static_cast<double>(level) * scale;
  }
  return Signal(Shape::grid(height, width), std::move(values));
}

void write_pgm(const std::string& path, const Signal& image, int bits) {
  if (!image.shape().is_grid()) throw ShapeError("write_pgm needs a grid signal");
  if (bits != 8 && bits != 16) throw ArgumentError("PGM bit depth must be 8 or 16");
  const unsigned maxval = bits == 8 ? 255u : 65535u;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << "P5\n" << image.shape().cols() << ' ' << image.shape().rows() << '\n' << maxval << '\n';
  std::vector<unsigned char> raw;
  raw.reserve(image.size() * (bits / 8));
  for (double v : image.values()) {
    const auto level = static_cast<unsigned>(std::lround(std::clamp(v, 0.0, 1.0) * maxval));
    if (bits == 16) raw.push_back(static_cast<unsigned char>(level >> 8));
    raw.push_back(static_cast<unsigned char>(level & 0xff));
  }
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!out) throw Error("failed writing " + path);
}

}  // namespace sgps::harness

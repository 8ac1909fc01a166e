#include "sgps/signal.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "sgps/error.hpp"
#include "sgps/simd/kernels.hpp"

namespace sgps {

std::string Shape::to_string() const {
  if (rank_ == 2) return std::to_string(dims_[0]) + "x" + std::to_string(dims_[1]);
  return std::to_string(dims_[0]);
}

namespace {

std::size_t parse_extent(std::string_view text, const std::string& whole) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || value == 0) {
    throw ArgumentError("invalid shape '" + whole + "'");
  }
  return value;
}

}  // namespace

Shape Shape::parse(const std::string& text) {
  const auto x = text.find_first_of("xX");
  if (x == std::string::npos) return vector(parse_extent(text, text));
  const std::string_view view(text);
  return grid(parse_extent(view.substr(0, x), text), parse_extent(view.substr(x + 1), text));
}

Signal::Signal(Shape shape) : shape_(shape), data_(shape.numel(), 0.0) {}

Signal::Signal(Shape shape, std::vector<double> data) : shape_(shape), data_(std::move(data)) {
  if (data_.size() != shape_.numel()) {
    throw ShapeError("signal data has " + std::to_string(data_.size()) + " entries, shape " +
                     shape_.to_string() + " needs " + std::to_string(shape_.numel()));
  }
  if (!all_finite()) throw ArgumentError("signal contains non-finite entries");
}

Signal Signal::vector(std::vector<double> data) {
  const auto n = data.size();
  return Signal(Shape::vector(n), std::move(data));
}

Signal Signal::filled(Shape shape, double value) {
  Signal s(shape);
  std::fill(s.data_.begin(), s.data_.end(), value);
  return s;
}

bool Signal::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Signal& Signal::operator+=(const Signal& other) {
  require_same_shape(*this, other, "signal addition");
  simd::active().axpy(1.0, other.data_.data(), data_.data(), data_.size());
  return *this;
}

Signal& Signal::operator-=(const Signal& other) {
  require_same_shape(*this, other, "signal subtraction");
  simd::active().axpy(-1.0, other.data_.data(), data_.data(), data_.size());
  return *this;
}

Signal& Signal::operator*=(double factor) {
  for (double& v : data_) v *= factor;
  return *this;
}

Signal operator+(Signal a, const Signal& b) { return a += b; }
Signal operator-(Signal a, const Signal& b) { return a -= b; }
Signal operator*(double factor, Signal a) { return a *= factor; }

void require_same_shape(const Signal& a, const Signal& b, const char* what) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(what) + ": shape " + a.shape().to_string() + " vs " +
                     b.shape().to_string());
  }
}

double dot(const Signal& a, const Signal& b) {
  require_same_shape(a, b, "dot");
  return simd::active().dot(a.values().data(), b.values().data(), a.size());
}

double squared_norm(const Signal& a) {
  return simd::active().dot(a.values().data(), a.values().data(), a.size());
}

double squared_distance(const Signal& a, const Signal& b) {
  require_same_shape(a, b, "squared_distance");
  return simd::active().squared_distance(a.values().data(), b.values().data(), a.size());
}

void axpy(double alpha, const Signal& x, Signal& y) {
  require_same_shape(x, y, "axpy");
  simd::active().axpy(alpha, x.values().data(), y.values().data(), x.size());
}

double max_value(const Signal& a) {
  if (a.empty()) throw ArgumentError("max_value of an empty signal");
  return *std::max_element(a.data().begin(), a.data().end());
}

double max_abs(const Signal& a) {
  double m = 0.0;
  for (double v : a.values()) m = std::max(m, std::abs(v));
  return m;
}

double mean(const Signal& a) {
  if (a.empty()) throw ArgumentError("mean of an empty signal");
  return std::accumulate(a.data().begin(), a.data().end(), 0.0) / static_cast<double>(a.size());
}

}  // namespace sgps

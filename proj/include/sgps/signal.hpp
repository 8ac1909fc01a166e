#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace sgps {

/// Shape of a Signal: a 1D vector of length n, or a 2D rows x cols grid.
class Shape {
 public:
  Shape() = default;

  static Shape vector(std::size_t n) { return Shape(1, {n, 1}); }
  static Shape grid(std::size_t rows, std::size_t cols) { return Shape(2, {rows, cols}); }

  std::size_t rank() const noexcept { return rank_; }
  std::size_t rows() const noexcept { return dims_[0]; }
  /// Columns of a grid; 1 for vectors.
  std::size_t cols() const noexcept { return dims_[1]; }
  std::size_t numel() const noexcept { return rank_ == 0 ? 0 : dims_[0] * dims_[1]; }
  bool is_grid() const noexcept { return rank_ == 2; }

  /// "64" or "16x16".
  std::string to_string() const;
  /// Inverse of to_string. Throws ArgumentError.
  static Shape parse(const std::string& text);

  friend bool operator==(const Shape&, const Shape&) = default;

 private:
  Shape(std::size_t rank, std::array<std::size_t, 2> dims) : rank_(rank), dims_(dims) {}

  std::size_t rank_ = 0;
  std::array<std::size_t, 2> dims_{0, 1};
};

/// Flat row-major real tensor with an explicit shape. The carrier type for
/// clean signals, noisy iterates, measurements and probes alike.
class Signal {
 public:
  Signal() = default;
  /// Zero-filled signal.
  explicit Signal(Shape shape);
  /// Throws ShapeError when data.size() != shape.numel(), ArgumentError on
  /// non-finite entries.
  Signal(Shape shape, std::vector<double> data);

  static Signal vector(std::vector<double> data);
  static Signal filled(Shape shape, double value);

  const Shape& shape() const noexcept { return shape_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  std::span<const double> values() const noexcept { return data_; }
  std::span<double> values() noexcept { return data_; }
  const std::vector<double>& data() const noexcept { return data_; }

  double operator[](std::size_t i) const { return data_[i]; }
  double& operator[](std::size_t i) { return data_[i]; }
  double at(std::size_t row, std::size_t col) const { return data_[row * shape_.cols() + col]; }
  double& at(std::size_t row, std::size_t col) { return data_[row * shape_.cols() + col]; }

  bool all_finite() const noexcept;

  Signal& operator+=(const Signal& other);
  Signal& operator-=(const Signal& other);
  Signal& operator*=(double factor);

  friend bool operator==(const Signal&, const Signal&) = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

Signal operator+(Signal a, const Signal& b);
Signal operator-(Signal a, const Signal& b);
Signal operator*(double factor, Signal a);

/// Throws ShapeError naming `what` when the shapes differ.
void require_same_shape(const Signal& a, const Signal& b, const char* what);

double dot(const Signal& a, const Signal& b);
double squared_norm(const Signal& a);
double squared_distance(const Signal& a, const Signal& b);
/// y += alpha * x
void axpy(double alpha, const Signal& x, Signal& y);
double max_value(const Signal& a);
double max_abs(const Signal& a);
double mean(const Signal& a);

}  // namespace sgps

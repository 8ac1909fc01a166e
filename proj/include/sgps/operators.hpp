#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "sgps/rng.hpp"
#include "sgps/signal.hpp"

namespace sgps {

enum class OpKind { identity, mask, blur, downsample, magnitude_dft, range_clip };

std::string to_string(OpKind kind);

/// Measurement operator A. apply() maps input_shape() to output_shape()
/// exactly. vjp() returns J_A(x)^T w, which for linear operators is the
/// adjoint and ignores x.
class ForwardOp {
 public:
  ForwardOp(Shape input, Shape output) : input_(input), output_(output) {}
  virtual ~ForwardOp() = default;

  virtual OpKind kind() const noexcept = 0;
  virtual bool linear() const noexcept = 0;

  const Shape& input_shape() const noexcept { return input_; }
  const Shape& output_shape() const noexcept { return output_; }

  /// Throws ShapeError when x does not match input_shape().
  Signal apply(const Signal& x) const;
  /// J_A(x)^T w.
  Signal vjp(const Signal& x, const Signal& w) const;
  /// A^T w. Throws Error for nonlinear operators.
  Signal adjoint(const Signal& w) const;

 protected:
  virtual Signal do_apply(const Signal& x) const = 0;
  virtual Signal do_vjp(const Signal& x, const Signal& w) const = 0;
  virtual Signal do_adjoint(const Signal& w) const;

 private:
  Shape input_;
  Shape output_;
};

/// Gradient of |A(x) - y|^2 / (2 sigma_y^2) with respect to x.
Signal fidelity_gradient(const ForwardOp& op, const Signal& x, const Signal& y, double sigma_y);
/// |A(x) - y|^2 / (2 sigma_y^2).
double fidelity(const ForwardOp& op, const Signal& x, const Signal& y, double sigma_y);

std::unique_ptr<ForwardOp> make_identity(Shape shape);

/// Keeps x[indices[j]] as output entry j. Indices refer to the flat
/// row-major layout and must be in range and distinct.
std::unique_ptr<ForwardOp> make_mask(Shape shape, std::vector<std::size_t> indices);
/// Keeps a uniformly random subset of round(keep_fraction * n) entries, in
/// increasing index order.
std::unique_ptr<ForwardOp> make_random_mask(Shape shape, double keep_fraction, RngStream& rng);

/// Circular convolution with `kernel`, centred on index size/2 along each
/// axis. A 1D kernel blurs a 1D signal; a grid kernel blurs a grid signal.
std::unique_ptr<ForwardOp> make_blur(Shape shape, Signal kernel);
/// Normalized sampled Gaussian taps, 1D (length size) or 2D (size x size).
Signal gaussian_kernel(std::size_t size, double std_dev, bool two_d);

/// Block average over factor (1D) or factor x factor (2D) blocks.
std::unique_ptr<ForwardOp> make_downsample(Shape shape, std::size_t factor);
/// Replicates each entry into a factor-sized block; the right inverse of the
/// block average.
Signal upsample_replicate(const Signal& v, std::size_t factor);

/// |F x| on a zero-padded grid of round(oversample * extent) per axis, by
/// direct separable DFT. Zero-magnitude bins contribute nothing to the
/// gradient.
std::unique_ptr<ForwardOp> make_magnitude_dft(Shape shape, double oversample);

enum class ClipMode { hard, soft };
/// hard: clamp(x, -threshold, threshold), derivative 0 at and beyond the kink.
/// soft: threshold * tanh(x / threshold).
std::unique_ptr<ForwardOp> make_range_clip(Shape shape, double threshold, ClipMode mode);

}  // namespace sgps

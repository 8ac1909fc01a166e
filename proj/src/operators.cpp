#include "sgps/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "sgps/error.hpp"
#include "sgps/simd/kernels.hpp"

namespace sgps {

std::string to_string(OpKind kind) {
  switch (kind) {
    case OpKind::identity:
      return "identity";
    case OpKind::mask:
      return "mask";
    case OpKind::blur:
      return "blur";
    case OpKind::downsample:
      return "downsample";
    case OpKind::magnitude_dft:
      return "magnitude_dft";
    case OpKind::range_clip:
      return "range_clip";
  }
  return "unknown";
}

namespace {

void require_shape(const Signal& s, const Shape& expected, const char* what) {
  if (s.shape() != expected) {
    throw ShapeError(std::string(what) + ": expected shape " + expected.to_string() + ", got " +
                     s.shape().to_string());
  }
}

/// Linear operators route vjp through the adjoint.
class LinearOp : public ForwardOp {
 public:
  using ForwardOp::ForwardOp;
  bool linear() const noexcept override { return true; }

 protected:
  Signal do_vjp(const Signal&, const Signal& w) const override { return do_adjoint(w); }
};

class IdentityOp final : public LinearOp {
 public:
  explicit IdentityOp(Shape shape) : LinearOp(shape, shape) {}
  OpKind kind() const noexcept override { return OpKind::identity; }

 protected:
  Signal do_apply(const Signal& x) const override { return x; }
  Signal do_adjoint(const Signal& w) const override { return w; }
};

class MaskOp final : public LinearOp {
 public:
  MaskOp(Shape shape, std::vector<std::size_t> indices)
      : LinearOp(shape, Shape::vector(indices.size())), indices_(std::move(indices)) {
    if (indices_.empty()) throw ArgumentError("mask keeps no entries");
    std::vector<bool> seen(shape.numel(), false);
    for (std::size_t idx : indices_) {
      if (idx >= shape.numel()) throw ArgumentError("mask index " + std::to_string(idx) + " out of range");
      if (seen[idx]) throw ArgumentError("mask index " + std::to_string(idx) + " repeated");
      seen[idx] = true;
    }
  }
  OpKind kind() const noexcept override { return OpKind::mask; }

 protected:
  Signal do_apply(const Signal& x) const override {
    Signal out(output_shape());
    for (std::size_t j = 0; j < indices_.size(); ++j) out[j] = x[indices_[j]];
    return out;
  }
  Signal do_adjoint(const Signal& w) const override {
    Signal out(input_shape());
    for (std::size_t j = 0; j < indices_.size(); ++j) out[indices_[j]] += w[j];
    return out;
  }

 private:
  std::vector<std::size_t> indices_;
};

/// out[i] += weight * in[(i + shift) mod n], as two contiguous axpy runs.
void accumulate_shifted(double* out, const double* in, std::size_t n, std::ptrdiff_t shift,
                        double weight) {
  const auto& k = simd::active();
  const auto sn = static_cast<std::ptrdiff_t>(n);
  const auto s = static_cast<std::size_t>(((shift % sn) + sn) % sn);
  k.axpy(weight, in + s, out, n - s);
  if (s > 0) k.axpy(weight, in, out + (n - s), s);
}

class BlurOp final : public LinearOp {
 public:
  BlurOp(Shape shape, Signal kernel) : LinearOp(shape, shape), kernel_(std::move(kernel)) {
    if (kernel_.empty()) throw ArgumentError("blur kernel is empty");
    if (kernel_.shape().rank() != shape.rank()) {
      throw ShapeError("blur kernel rank must match the signal rank");
    }
    if (kernel_.shape().rows() > shape.rows() || kernel_.shape().cols() > shape.cols()) {
      throw ShapeError("blur kernel larger than the signal");
    }
  }
  OpKind kind() const noexcept override { return OpKind::blur; }

 protected:
  Signal do_apply(const Signal& x) const override { return convolve(x, +1); }
  Signal do_adjoint(const Signal& w) const override { return convolve(w, -1); }

 private:
  // direction +1: sum_j k[j] x[i + (j - c)]; -1: sum_j k[j] x[i - (j - c)].
  Signal convolve(const Signal& x, int direction) const {
    const Shape& shape = input_shape();
    const std::size_t rows = shape.rows();
    const std::size_t cols = shape.cols();
    Signal out(shape);
    if (!shape.is_grid()) {
      const auto center = static_cast<std::ptrdiff_t>(kernel_.size() / 2);
      for (std::size_t j = 0; j < kernel_.size(); ++j) {
        const std::ptrdiff_t offset = direction * (static_cast<std::ptrdiff_t>(j) - center);
        accumulate_shifted(out.values().data(), x.values().data(), rows, offset, kernel_[j]);
      }
      return out;
    }
    const std::size_t kr = kernel_.shape().rows();
    const std::size_t kc = kernel_.shape().cols();
    const auto cr = static_cast<std::ptrdiff_t>(kr / 2);
    const auto cc = static_cast<std::ptrdiff_t>(kc / 2);
    const auto srows = static_cast<std::ptrdiff_t>(rows);
    for (std::size_t a = 0; a < kr; ++a) {
      const std::ptrdiff_t dr = direction * (static_cast<std::ptrdiff_t>(a) - cr);
      for (std::size_t b = 0; b < kc; ++b) {
        const double weight = kernel_.at(a, b);
        if (weight == 0.0) continue;
        const std::ptrdiff_t dc = direction * (static_cast<std::ptrdiff_t>(b) - cc);
        for (std::size_t r = 0; r < rows; ++r) {
          const auto src = static_cast<std::size_t>(((static_cast<std::ptrdiff_t>(r) + dr) % srows + srows) % srows);
          accumulate_shifted(out.values().data() + r * cols, x.values().data() + src * cols, cols, dc,
                             weight);
        }
      }
    }
    return out;
  }

  Signal kernel_;
};

Shape reduced_shape(const Shape& shape, std::size_t factor) {
  if (factor == 0) throw ArgumentError("downsample factor must be >= 1");
  if (shape.rows() % factor != 0 || (shape.is_grid() && shape.cols() % factor != 0)) {
    throw ShapeError("shape " + shape.to_string() + " not divisible by factor " + std::to_string(factor));
  }
  return shape.is_grid() ? Shape::grid(shape.rows() / factor, shape.cols() / factor)
                         : Shape::vector(shape.rows() / factor);
}

class DownsampleOp final : public LinearOp {
 public:
  DownsampleOp(Shape shape, std::size_t factor)
      : LinearOp(shape, reduced_shape(shape, factor)), factor_(factor) {}
  OpKind kind() const noexcept override { return OpKind::downsample; }

 protected:
  Signal do_apply(const Signal& x) const override {
    Signal out(output_shape());
    const std::size_t cols = input_shape().cols();
    const std::size_t out_cols = output_shape().cols();
    const bool grid = input_shape().is_grid();
    const double scale = 1.0 / static_cast<double>(grid ? factor_ * factor_ : factor_);
    for (std::size_t r = 0; r < input_shape().rows(); ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        const std::size_t target = grid ? (r / factor_) * out_cols + c / factor_ : r / factor_;
        out[target] += scale * x[r * cols + c];
      }
    }
    return out;
  }
  Signal do_adjoint(const Signal& w) const override {
    Signal out(input_shape());
    const std::size_t cols = input_shape().cols();
    const std::size_t out_cols = output_shape().cols();
    const bool grid = input_shape().is_grid();
    const double scale = 1.0 / static_cast<double>(grid ? factor_ * factor_ : factor_);
    for (std::size_t r = 0; r < input_shape().rows(); ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        const std::size_t source = grid ? (r / factor_) * out_cols + c / factor_ : r / factor_;
        out[r * cols + c] = scale * w[source];
      }
    }
    return out;
  }

 private:
  std::size_t factor_;
};

/// Partial DFT matrix of a length-n signal zero-padded to m: rows k < m,
/// columns t < n, entries cos / sin of 2 pi k t / m.
struct DftTable {
  std::size_t m = 0;
  std::size_t n = 0;
  std::vector<double> cos_table;  // m x n
  std::vector<double> sin_table;  // m x n

  DftTable(std::size_t padded, std::size_t length) : m(padded), n(length), cos_table(m * n), sin_table(m * n) {
    for (std::size_t k = 0; k < m; ++k) {
      for (std::size_t t = 0; t < n; ++t) {
        // Reduce k t mod m exactly before converting to an angle.
        const double angle = 2.0 * std::numbers::pi * static_cast<double>((k * t) % m) / static_cast<double>(m);
        cos_table[k * n + t] = std::cos(angle);
        sin_table[k * n + t] = std::sin(angle);
      }
    }
  }
  const double* cos_row(std::size_t k) const { return cos_table.data() + k * n; }
  const double* sin_row(std::size_t k) const { return sin_table.data() + k * n; }
};

std::size_t padded_extent(std::size_t extent, double oversample) {
  const auto m = static_cast<std::size_t>(std::llround(oversample * static_cast<double>(extent)));
  return std::max(m, extent);
}

Shape padded_shape(const Shape& shape, double oversample) {
  if (!(oversample >= 1.0) || !std::isfinite(oversample)) {
    throw ArgumentError("magnitude_dft oversample ratio must be >= 1");
  }
  if (shape.is_grid()) {
    return Shape::grid(padded_extent(shape.rows(), oversample), padded_extent(shape.cols(), oversample));
  }
  return Shape::vector(padded_extent(shape.rows(), oversample));
}

class MagnitudeDftOp final : public ForwardOp {
 public:
  MagnitudeDftOp(Shape shape, double oversample)
      : ForwardOp(shape, padded_shape(shape, oversample)),
        height_(shape.is_grid() ? shape.rows() : 1),
        width_(shape.is_grid() ? shape.cols() : shape.rows()),
        rows_(shape.is_grid() ? output_shape().rows() : 1, height_),
        cols_(shape.is_grid() ? output_shape().cols() : output_shape().rows(), width_) {}

  OpKind kind() const noexcept override { return OpKind::magnitude_dft; }
  bool linear() const noexcept override { return false; }

 protected:
  Signal do_apply(const Signal& x) const override {
    std::vector<double> re, im;
    transform(x, re, im);
    Signal out(output_shape());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::hypot(re[i], im[i]);
    return out;
  }

  // Re(F^H (w . z / |z|)), zero where |z| = 0.
  Signal do_vjp(const Signal& x, const Signal& w) const override {
    std::vector<double> re, im;
    transform(x, re, im);
    const std::size_t mh = rows_.m;
    const std::size_t mw = cols_.m;
    std::vector<double> c_re(mh * mw, 0.0), c_im(mh * mw, 0.0);
    for (std::size_t i = 0; i < c_re.size(); ++i) {
      const double mag = std::hypot(re[i], im[i]);
      if (mag == 0.0) continue;
      c_re[i] = w[i] * re[i] / mag;
      c_im[i] = w[i] * im[i] / mag;
    }
    const auto& k = simd::active();
    // Inverse along the padded row axis: r_re/r_im[r][l] = sum_k e^{+i theta_kr} c[k][l].
    std::vector<double> r_re(height_ * mw, 0.0), r_im(height_ * mw, 0.0);
    for (std::size_t r = 0; r < height_; ++r) {
      for (std::size_t kk = 0; kk < mh; ++kk) {
        const double cs = rows_.cos_row(kk)[r];
        const double sn = rows_.sin_row(kk)[r];
        const double* cre = c_re.data() + kk * mw;
        const double* cim = c_im.data() + kk * mw;
        k.axpy(cs, cre, r_re.data() + r * mw, mw);
        k.axpy(-sn, cim, r_re.data() + r * mw, mw);
        k.axpy(cs, cim, r_im.data() + r * mw, mw);
        k.axpy(sn, cre, r_im.data() + r * mw, mw);
      }
    }
    // Real part of the inverse along columns: out[r][c] = sum_l cos_lc r_re - sin_lc r_im.
    Signal out(input_shape());
    std::vector<double> cos_col(mw), sin_col(mw);
    for (std::size_t c = 0; c < width_; ++c) {
      for (std::size_t l = 0; l < mw; ++l) {
        cos_col[l] = cols_.cos_row(l)[c];
        sin_col[l] = cols_.sin_row(l)[c];
      }
      for (std::size_t r = 0; r < height_; ++r) {
        out[r * width_ + c] = k.dot(cos_col.data(), r_re.data() + r * mw, mw) -
                              k.dot(sin_col.data(), r_im.data() + r * mw, mw);
      }
    }
    return out;
  }

 private:
  // z = F_rows X F_cols^T, split into real and imaginary parts (mh x mw).
  void transform(const Signal& x, std::vector<double>& re, std::vector<double>& im) const {
    const std::size_t mh = rows_.m;
    const std::size_t mw = cols_.m;
    const auto& k = simd::active();
    std::vector<double> row_re(height_ * mw), row_im(height_ * mw);
    for (std::size_t r = 0; r < height_; ++r) {
      const double* xr = x.values().data() + r * width_;
      for (std::size_t l = 0; l < mw; ++l) {
        row_re[r * mw + l] = k.dot(cols_.cos_row(l), xr, width_);
        row_im[r * mw + l] = -k.dot(cols_.sin_row(l), xr, width_);
      }
    }
    re.assign(mh * mw, 0.0);
    im.assign(mh * mw, 0.0);
    for (std::size_t kk = 0; kk < mh; ++kk) {
      double* zre = re.data() + kk * mw;
      double* zim = im.data() + kk * mw;
      for (std::size_t r = 0; r < height_; ++r) {
        const double cs = rows_.cos_row(kk)[r];
        const double sn = rows_.sin_row(kk)[r];
        // (cs - i sn)(a + i b) = cs a + sn b + i (cs b - sn a)
        k.axpy(cs, row_re.data() + r * mw, zre, mw);
        k.axpy(sn, row_im.data() + r * mw, zre, mw);
        k.axpy(cs, row_im.data() + r * mw, zim, mw);
        k.axpy(-sn, row_re.data() + r * mw, zim, mw);
      }
    }
  }

  std::size_t height_;
  std::size_t width_;
  DftTable rows_;
  DftTable cols_;
};

class RangeClipOp final : public ForwardOp {
 public:
  RangeClipOp(Shape shape, double threshold, ClipMode mode)
      : ForwardOp(shape, shape), threshold_(threshold), mode_(mode) {
    if (!(threshold_ > 0.0) || !std::isfinite(threshold_)) {
      throw ArgumentError("range_clip threshold must be > 0");
    }
  }
  OpKind kind() const noexcept override { return OpKind::range_clip; }
  bool linear() const noexcept override { return false; }

 protected:
  Signal do_apply(const Signal& x) const override {
    Signal out(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) {
      out[i] = mode_ == ClipMode::hard ? std::clamp(x[i], -threshold_, threshold_)
                                       : threshold_ * std::tanh(x[i] / threshold_);
    }
    return out;
  }
  Signal do_vjp(const Signal& x, const Signal& w) const override {
    Signal out(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) {
      double slope;
      if (mode_ == ClipMode::hard) {
        slope = std::abs(x[i]) < threshold_ ? 1.0 : 0.0;
      } else {
        const double t = std::tanh(x[i] / threshold_);
        slope = 1.0 - t * t;
      }
      out[i] = slope * w[i];
    }
    return out;
  }

 private:
  double threshold_;
  ClipMode mode_;
};

}  // namespace

Signal ForwardOp::apply(const Signal& x) const {
  require_shape(x, input_, "forward operator input");
  return do_apply(x);
}

Signal ForwardOp::vjp(const Signal& x, const Signal& w) const {
  require_shape(x, input_, "forward operator input");
  require_shape(w, output_, "forward operator cotangent");
  return do_vjp(x, w);
}

Signal ForwardOp::adjoint(const Signal& w) const {
  if (!linear()) throw Error(to_string(kind()) + " is nonlinear and has no adjoint");
  require_shape(w, output_, "forward operator cotangent");
  return do_adjoint(w);
}

Signal ForwardOp::do_adjoint(const Signal&) const {
  throw Error(to_string(kind()) + " has no adjoint");
}

Signal fidelity_gradient(const ForwardOp& op, const Signal& x, const Signal& y, double sigma_y) {
  if (!(sigma_y > 0.0)) throw ArgumentError("fidelity_gradient: sigma_y must be > 0");
  require_shape(y, op.output_shape(), "measurement");
  Signal residual = op.apply(x);
  residual -= y;
  residual *= 1.0 / (sigma_y * sigma_y);
  return op.vjp(x, residual);
}

double fidelity(const ForwardOp& op, const Signal& x, const Signal& y, double sigma_y) {
  if (!(sigma_y > 0.0)) throw ArgumentError("fidelity: sigma_y must be > 0");
  require_shape(y, op.output_shape(), "measurement");
  return squared_distance(op.apply(x), y) / (2.0 * sigma_y * sigma_y);
}

std::unique_ptr<ForwardOp> make_identity(Shape shape) { return std::make_unique<IdentityOp>(shape); }

std::unique_ptr<ForwardOp> make_mask(Shape shape, std::vector<std::size_t> indices) {
  return std::make_unique<MaskOp>(shape, std::move(indices));
}

std::unique_ptr<ForwardOp> make_random_mask(Shape shape, double keep_fraction, RngStream& rng) {
  if (!(keep_fraction > 0.0) || keep_fraction > 1.0) {
    throw ArgumentError("mask keep fraction must be in (0, 1]");
  }
  const std::size_t n = shape.numel();
  const auto keep = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(keep_fraction * static_cast<double>(n))));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Partial Fisher-Yates with the stream's own uniforms keeps the draw portable.
  for (std::size_t i = 0; i < keep; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.uniform() * static_cast<double>(n - i));
    std::swap(order[i], order[std::min(j, n - 1)]);
  }
  order.resize(keep);
  std::sort(order.begin(), order.end());
  return make_mask(shape, std::move(order));
}

std::unique_ptr<ForwardOp> make_blur(Shape shape, Signal kernel) {
  return std::make_unique<BlurOp>(shape, std::move(kernel));
}

Signal gaussian_kernel(std::size_t size, double std_dev, bool two_d) {
  if (size == 0 || !(std_dev > 0.0)) throw ArgumentError("gaussian kernel needs size >= 1 and std > 0");
  const double c = static_cast<double>(size - 1) / 2.0;
  std::vector<double> taps(size);
  for (std::size_t i = 0; i < size; ++i) {
    const double d = static_cast<double>(i) - c;
    taps[i] = std::exp(-0.5 * d * d / (std_dev * std_dev));
  }
  if (!two_d) {
    const double total = std::accumulate(taps.begin(), taps.end(), 0.0);
    for (double& t : taps) t /= total;
    return Signal::vector(std::move(taps));
  }
  std::vector<double> grid(size * size);
  double total = 0.0;
  for (std::size_t r = 0; r < size; ++r) {
    for (std::size_t q = 0; q < size; ++q) total += grid[r * size + q] = taps[r] * taps[q];
  }
  for (double& g : grid) g /= total;
  return Signal(Shape::grid(size, size), std::move(grid));
}

std::unique_ptr<ForwardOp> make_downsample(Shape shape, std::size_t factor) {
  return std::make_unique<DownsampleOp>(shape, factor);
}

Signal upsample_replicate(const Signal& v, std::size_t factor) {
  if (factor == 0) throw ArgumentError("upsample factor must be >= 1");
  const Shape& s = v.shape();
  if (!s.is_grid()) {
    Signal out(Shape::vector(s.rows() * factor));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = v[i / factor];
    return out;
  }
  Signal out(Shape::grid(s.rows() * factor, s.cols() * factor));
  for (std::size_t r = 0; r < out.shape().rows(); ++r) {
    for (std::size_t c = 0; c < out.shape().cols(); ++c) out.at(r, c) = v.at(r / factor, c / factor);
  }
  return out;
}

std::unique_ptr<ForwardOp> make_magnitude_dft(Shape shape, double oversample) {
  return std::make_unique<MagnitudeDftOp>(shape, oversample);
}

std::unique_ptr<ForwardOp> make_range_clip(Shape shape, double threshold, ClipMode mode) {
  return std::make_unique<RangeClipOp>(shape, threshold, mode);
}

}  // namespace sgps

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <functional>
#include <memory>

#include "sgps/error.hpp"
#include "sgps/operators.hpp"
#include "support/gen.hpp"

using namespace sgps;
using sgps::prop::Gen;

namespace {

using OpFactory = std::function<std::unique_ptr<ForwardOp>(Gen&, const Shape&)>;

std::unique_ptr<ForwardOp> random_blur(Gen& g, const Shape& s) {
  const std::size_t kr = g.integer(1, std::min<std::size_t>(s.rows(), 5));
  if (!s.is_grid()) return make_blur(s, g.signal(Shape::vector(kr)));
  const std::size_t kc = g.integer(1, std::min<std::size_t>(s.cols(), 5));
  return make_blur(s, g.signal(Shape::grid(kr, kc)));
}

std::unique_ptr<ForwardOp> random_mask(Gen& g, const Shape& s) {
  return make_random_mask(s, g.uniform(0.1, 1.0), g.rng());
}

Shape divisible_shape(Gen& g, std::size_t f) {
  if (g.coin()) return Shape::vector(f * g.integer(1, 20));
  return Shape::grid(f * g.integer(1, 5), f * g.integer(1, 5));
}

// Direct O(n^2) DFT magnitude on the zero-padded grid.
Signal oracle_magnitude(const Signal& x, const Shape& out) {
  const std::size_t h = x.shape().is_grid() ? x.shape().rows() : 1;
  const std::size_t w = x.shape().is_grid() ? x.shape().cols() : x.shape().rows();
  const std::size_t mh = out.is_grid() ? out.rows() : 1;
  const std::size_t mw = out.is_grid() ? out.cols() : out.rows();
  Signal mag(out);
  for (std::size_t k = 0; k < mh; ++k) {
    for (std::size_t l = 0; l < mw; ++l) {
      std::complex<double> z = 0.0;
      for (std::size_t r = 0; r < h; ++r) {
        for (std::size_t c = 0; c < w; ++c) {
          const double theta = -2.0 * M_PI * (static_cast<double>(k * r) / mh + static_cast<double>(l * c) / mw);
          z += x[r * w + c] * std::polar(1.0, theta);
        }
      }
      mag[k * mw + l] = std::abs(z);
    }
  }
  return mag;
}

}  // namespace

TEST(Operators, IdentityAndMaskExamples) {
  const Signal x = Signal::vector({1, 2, 3, 4});
  EXPECT_EQ(make_identity(x.shape())->apply(x), x);
  const auto mask = make_mask(x.shape(), {3, 0});
  EXPECT_EQ(mask->apply(x), Signal::vector({4, 1}));
  EXPECT_EQ(mask->adjoint(Signal::vector({5, 6})), Signal::vector({6, 0, 0, 5}));
  EXPECT_THROW(make_mask(x.shape(), {1, 1}), ArgumentError);
  EXPECT_THROW(make_mask(x.shape(), {4}), ArgumentError);
  EXPECT_THROW(mask->apply(Signal::vector({1, 2})), ShapeError);
}

TEST(Operators, RandomMaskKeepsRequestedCount) {
  RngStream rng(3, 0);
  const auto op = make_random_mask(Shape::grid(10, 10), 0.37, rng);
  EXPECT_EQ(op->output_shape(), Shape::vector(37));
  EXPECT_THROW(make_random_mask(Shape::vector(10), 0.0, rng), ArgumentError);
}

TEST(Operators, BlurExample) {
  // Circular [0.25, 0.5, 0.25] on a unit impulse.
  const auto op = make_blur(Shape::vector(5), Signal::vector({0.25, 0.5, 0.25}));
  EXPECT_EQ(op->apply(Signal::vector({0, 0, 1, 0, 0})), Signal::vector({0, 0.25, 0.5, 0.25, 0}));
  EXPECT_EQ(op->apply(Signal::vector({1, 0, 0, 0, 0})), Signal::vector({0.5, 0.25, 0, 0, 0.25}));
}

TEST(Operators, BlurMatchesDirectCircularCorrelation) {
  for (std::uint64_t c = 0; c < 60; ++c) {
    Gen g(50, c);
    const Shape s = Shape::grid(g.integer(1, 9), g.integer(1, 9));
    const Signal k = g.signal(Shape::grid(g.integer(1, s.rows()), g.integer(1, s.cols())));
    const Signal x = g.signal(s);
    Signal want(s);
    const auto R = static_cast<long>(s.rows()), C = static_cast<long>(s.cols());
    const auto cr = static_cast<long>(k.shape().rows() / 2), cc = static_cast<long>(k.shape().cols() / 2);
    for (long r = 0; r < R; ++r) {
      for (long col = 0; col < C; ++col) {
        double acc = 0;
        for (long a = 0; a < static_cast<long>(k.shape().rows()); ++a) {
          for (long b = 0; b < static_cast<long>(k.shape().cols()); ++b) {
            const long rr = ((r + a - cr) % R + R) % R, ccol = ((col + b - cc) % C + C) % C;
            acc += k.at(a, b) * x.at(rr, ccol);
          }
        }
        want.at(r, col) = acc;
      }
    }
    EXPECT_LT(prop::max_rel_error(make_blur(s, k)->apply(x), want), 1e-12) << "case " << c;
  }
}

TEST(Operators, GaussianKernelIsNormalizedAndSymmetric) {
  const Signal k1 = gaussian_kernel(5, 1.0, false);
  const Signal k2 = gaussian_kernel(5, 1.0, true);
  double s1 = 0, s2 = 0;
  for (double v : k1.values()) s1 += v;
  for (double v : k2.values()) s2 += v;
  EXPECT_NEAR(s1, 1.0, 1e-14);
  EXPECT_NEAR(s2, 1.0, 1e-14);
  EXPECT_NEAR(k1[0], k1[4], 1e-16);
  EXPECT_NEAR(k1[1] / k1[2], std::exp(-0.5), 1e-14);
  EXPECT_NEAR(k2.at(0, 1), k2.at(1, 0), 1e-16);
}

TEST(Operators, DownsampleExampleAndReplicateInverse) {
  const auto op = make_downsample(Shape::grid(2, 4), 2);
  const Signal x(Shape::grid(2, 4), {1, 2, 3, 4, 5, 6, 7, 8});
  EXPECT_EQ(op->apply(x), Signal(Shape::grid(1, 2), {3.5, 5.5}));
  EXPECT_THROW(make_downsample(Shape::grid(3, 4), 2), ShapeError);
  for (std::uint64_t c = 0; c < 50; ++c) {
    Gen g(51, c);
    const std::size_t f = g.integer(1, 4);
    const Shape s = divisible_shape(g, f);
    const auto d = make_downsample(s, f);
    const Signal v = g.signal(d->output_shape());
    EXPECT_LT(prop::max_rel_error(d->apply(upsample_replicate(v, f)), v), 1e-14) << "case " << c;
  }
}

TEST(OperatorsProperty, LinearOperatorsAreLinearWithExactAdjoint) {
  const std::vector<std::pair<const char*, OpFactory>> factories = {
      {"identity", [](Gen&, const Shape& s) { return make_identity(s); }},
      {"mask", random_mask},
      {"blur", random_blur},
  };
  for (const auto& [name, factory] : factories) {
    for (std::uint64_t c = 0; c < 60; ++c) {
      Gen g(52, c);
      const Shape s = g.shape(10);
      const auto op = factory(g, s);
      const Signal x = g.signal(s), z = g.signal(s), w = g.signal(op->output_shape());
      const double a = g.normal(), b = g.normal();
      const Signal lhs = op->apply(a * x + b * z);
      const Signal rhs = a * op->apply(x) + b * op->apply(z);
      EXPECT_LT(prop::max_rel_error(lhs, rhs), 1e-12) << name << " case " << c;
      const double ax_w = dot(op->apply(x), w), x_atw = dot(x, op->adjoint(w));
      EXPECT_NEAR(ax_w, x_atw, 1e-10 * (1 + std::abs(ax_w))) << name << " case " << c;
      EXPECT_EQ(op->vjp(z, w), op->adjoint(w)) << name;
    }
  }
  for (std::uint64_t c = 0; c < 60; ++c) {
    Gen g(53, c);
    const std::size_t f = g.integer(1, 4);
    const auto op = make_downsample(divisible_shape(g, f), f);
    const Signal x = g.signal(op->input_shape()), w = g.signal(op->output_shape());
    EXPECT_NEAR(dot(op->apply(x), w), dot(x, op->adjoint(w)), 1e-10 * (1 + std::abs(dot(op->apply(x), w))));
  }
}

TEST(OperatorsProperty, MagnitudeDftMatchesDirectTransform) {
  for (std::uint64_t c = 0; c < 30; ++c) {
    Gen g(54, c);
    const Shape s = g.coin() ? Shape::vector(g.integer(1, 16)) : Shape::grid(g.integer(1, 6), g.integer(1, 6));
    const auto op = make_magnitude_dft(s, g.uniform(1.0, 2.5));
    const Signal x = g.signal(s);
    EXPECT_LT(prop::max_rel_error(op->apply(x), oracle_magnitude(x, op->output_shape())), 1e-11)
        << "case " << c;
  }
}

TEST(OperatorsProperty, VjpMatchesFiniteDifferences) {
  const std::vector<std::pair<const char*, OpFactory>> factories = {
      {"magnitude_dft", [](Gen& g, const Shape& s) { return make_magnitude_dft(s, g.uniform(1.0, 2.0)); }},
      {"soft_clip", [](Gen& g, const Shape& s) { return make_range_clip(s, g.uniform(0.3, 2.0), ClipMode::soft); }},
      {"hard_clip", [](Gen& g, const Shape& s) { return make_range_clip(s, g.uniform(0.3, 2.0), ClipMode::hard); }},
      {"blur", random_blur},
  };
  for (const auto& [name, factory] : factories) {
    for (std::uint64_t c = 0; c < 30; ++c) {
      Gen g(55, c);
      const Shape s = g.coin() ? Shape::vector(g.integer(2, 12)) : Shape::grid(g.integer(2, 5), g.integer(2, 5));
      const auto op = factory(g, s);
      const Signal x = g.signal(s), w = g.signal(op->output_shape());
      const Signal grad = op->vjp(x, w);
      const double h = 1e-6;
      Signal fd(s);
      for (std::size_t i = 0; i < x.size(); ++i) {
        Signal xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        fd[i] = (dot(op->apply(xp), w) - dot(op->apply(xm), w)) / (2 * h);
      }
      // The hard clip is piecewise linear; a kink within h of x is improbable
      // for Gaussian draws.
      EXPECT_LT(prop::max_rel_error(grad, fd), 1e-6) << name << " case " << c;
    }
  }
}

TEST(Operators, MagnitudeDftIgnoresZeroBins) {
  const auto op = make_magnitude_dft(Shape::vector(4), 1.0);
  const Signal zero(Shape::vector(4));
  const Signal g = op->vjp(zero, Signal::vector({1, 1, 1, 1}));
  for (double v : g.values()) EXPECT_EQ(v, 0.0);
  EXPECT_THROW(op->adjoint(Signal::vector({1, 1, 1, 1})), Error);
}

TEST(Operators, RangeClipExamples) {
  const Signal x = Signal::vector({-2.0, -0.5, 0.0, 0.5, 2.0});
  EXPECT_EQ(make_range_clip(x.shape(), 1.0, ClipMode::hard)->apply(x), Signal::vector({-1, -0.5, 0, 0.5, 1}));
  const Signal soft = make_range_clip(x.shape(), 1.0, ClipMode::soft)->apply(x);
  EXPECT_NEAR(soft[4], std::tanh(2.0), 1e-15);
  const Signal g = make_range_clip(x.shape(), 1.0, ClipMode::hard)->vjp(x, Signal::filled(x.shape(), 1.0));
  EXPECT_EQ(g, Signal::vector({0, 1, 1, 1, 0}));
}

TEST(Operators, FidelityGradientMatchesFiniteDifferences) {
  Gen g(56, 0);
  const Shape s = Shape::grid(4, 4);
  const auto op = make_blur(s, gaussian_kernel(3, 1.0, true));
  const Signal x = g.signal(s), y = g.signal(s);
  const double sy = 0.3;
  const Signal grad = fidelity_gradient(*op, x, y, sy);
  for (std::size_t i = 0; i < x.size(); ++i) {
    Signal xp = x, xm = x;
    xp[i] += 1e-6;
    xm[i] -= 1e-6;
    EXPECT_NEAR(grad[i], (fidelity(*op, xp, y, sy) - fidelity(*op, xm, y, sy)) / 2e-6, 1e-5 * (1 + std::abs(grad[i])));
  }
  EXPECT_THROW(fidelity_gradient(*op, x, y, 0.0), ArgumentError);
}

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "sgps/config.hpp"
#include "sgps/error.hpp"
#include "sgps/metrics.hpp"
#include "sgps/report.hpp"
#include "sgps/rng.hpp"
#include "sgps/signal.hpp"
#include "support/gen.hpp"

using namespace sgps;
using sgps::prop::Gen;

TEST(Shape, ParseRoundTrip) {
  EXPECT_EQ(Shape::parse("64"), Shape::vector(64));
  EXPECT_EQ(Shape::parse("16x8"), Shape::grid(16, 8));
  EXPECT_EQ(Shape::grid(3, 5).to_string(), "3x5");
  EXPECT_EQ(Shape::grid(3, 5).numel(), 15u);
  EXPECT_THROW(Shape::parse("0x4"), ArgumentError);
  EXPECT_THROW(Shape::parse("4x"), ArgumentError);
  EXPECT_THROW(Shape::parse("abc"), ArgumentError);
}

TEST(Signal, ConstructionChecksSizeAndFiniteness) {
  EXPECT_THROW(Signal(Shape::grid(2, 2), {1, 2, 3}), ShapeError);
  EXPECT_THROW(Signal(Shape::vector(2), {1, std::numeric_limits<double>::quiet_NaN()}), ArgumentError);
  EXPECT_THROW(Signal(Shape::vector(1), {std::numeric_limits<double>::infinity()}), ArgumentError);
  const Signal s(Shape::grid(2, 3), {0, 1, 2, 3, 4, 5});
  EXPECT_DOUBLE_EQ(s.at(1, 2), 5.0);
  EXPECT_TRUE(s.all_finite());
}

TEST(Signal, ArithmeticRejectsShapeMismatch) {
  Signal a(Shape::grid(2, 2));
  const Signal b(Shape::vector(4));
  EXPECT_THROW(a += b, ShapeError);
  EXPECT_THROW(dot(a, b), ShapeError);
}

TEST(Signal, ReductionsMatchNaiveLoops) {
  for (std::uint64_t c = 0; c < 50; ++c) {
    Gen g(11, c);
    const Shape shape = g.shape(9);
    const Signal a = g.signal(shape), b = g.signal(shape);
    double d = 0, sq = 0, mx = -1e300, ma = 0, sum = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      d += a[i] * b[i];
      sq += (a[i] - b[i]) * (a[i] - b[i]);
      mx = std::max(mx, a[i]);
      ma = std::max(ma, std::abs(a[i]));
      sum += a[i];
    }
    EXPECT_NEAR(dot(a, b), d, 1e-12 * (1 + std::abs(d))) << "case " << c;
    EXPECT_NEAR(squared_distance(a, b), sq, 1e-12 * (1 + sq)) << "case " << c;
    EXPECT_EQ(max_value(a), mx);
    EXPECT_EQ(max_abs(a), ma);
    EXPECT_NEAR(mean(a), sum / static_cast<double>(a.size()), 1e-12);
  }
}

TEST(Psnr, IdenticalSignalsGiveInfinity) {
  const Signal a = Signal::vector({0.1, 0.2, 0.3});
  EXPECT_TRUE(std::isinf(psnr(a, a)));
}

TEST(Psnr, HandEvaluatedValue) {
  // mean square difference 0.01 at peak 1: 10 log10(100) = 20 dB.
  const Signal a = Signal::vector({0, 0, 0, 0});
  const Signal b = Signal::vector({0.1, 0.1, 0.1, 0.1});
  EXPECT_NEAR(psnr(a, b, 1.0), 20.0, 1e-9);
  EXPECT_NEAR(psnr(a, b, 2.0), 20.0 + 20.0 * std::log10(2.0), 1e-9);
}

TEST(Psnr, RejectsMismatchAndBadPeak) {
  EXPECT_THROW(psnr(Signal::vector({1, 2}), Signal::vector({1, 2, 3})), ShapeError);
  EXPECT_THROW(psnr(Signal::vector({1}), Signal::vector({2}), 0.0), ArgumentError);
}

TEST(PsnrProperty, SymmetricInItsArguments) {
  for (std::uint64_t c = 0; c < 100; ++c) {
    Gen g(12, c);
    const Shape s = g.shape();
    const Signal a = g.signal(s), b = g.signal(s);
    EXPECT_EQ(psnr(a, b, 1.5), psnr(b, a, 1.5)) << "case " << c;
  }
}

TEST(PsnrProperty, StrictlyDecreasingInConstantOffset) {
  for (std::uint64_t c = 0; c < 50; ++c) {
    Gen g(13, c);
    const Signal a = g.signal(g.shape());
    double previous = std::numeric_limits<double>::infinity();
    for (double offset : {0.001, 0.01, 0.1, 0.5, 1.0, 4.0}) {
      Signal b = a;
      for (double& v : b.values()) v += offset;
      const double p = psnr(a, b);
      EXPECT_LT(p, previous) << "case " << c << " offset " << offset;
      previous = p;
    }
  }
}

TEST(Rng, SameSeedAndStreamRepeat) {
  RngStream a(1, 0), b(1, 0);
  EXPECT_EQ(gaussian_vector(a, 4), gaussian_vector(b, 4));
}

TEST(Rng, StreamsAndSeedsDiffer) {
  RngStream a(1, 0), b(1, 1), c(2, 0);
  const auto va = gaussian_vector(a, 8), vb = gaussian_vector(b, 8), vc = gaussian_vector(c, 8);
  EXPECT_NE(va, vb);
  EXPECT_NE(va, vc);
}

TEST(Rng, SplitDoesNotAdvanceParent) {
  RngStream a(3, 9), b(3, 9);
  const RngStream child = a.split(5);
  EXPECT_EQ(a.next_u64(), b.next_u64());
  EXPECT_NE(child.stream_id(), a.stream_id());
  EXPECT_EQ(a.split(5).stream_id(), child.stream_id());
}

TEST(Rng, PinnedEngineOutput) {
  // std::mt19937_64 and std::seed_seq are fully specified by the standard, so
  // these words hold on every conforming implementation.
  RngStream a(0, 0);
  const std::uint64_t first = a.next_u64();
  std::seed_seq seq{0u, 0u, 0u, 0u};
  std::mt19937_64 reference(seq);
  EXPECT_EQ(first, reference());
}

TEST(Rng, ZeroLengthIsAnError) {
  RngStream a(1, 0);
  EXPECT_THROW(gaussian_vector(a, 0), ArgumentError);
}

TEST(Rng, MomentsWithinCltBounds) {
  // n = 1e5: the sample mean has sd 1/sqrt(n) = 0.0032, sample variance sd
  // sqrt(2/n) = 0.0045; 0.02 is beyond 4 sd for both.
  RngStream a(1, 0);
  const Signal v = gaussian_vector(a, 100000);
  const double m = mean(v);
  double var = 0.0;
  for (double x : v.values()) var += (x - m) * (x - m);
  var /= static_cast<double>(v.size() - 1);
  EXPECT_NEAR(m, 0.0, 0.02);
  EXPECT_GE(var, 0.98);
  EXPECT_LE(var, 1.02);
}

TEST(Rng, IndependentStreamsAreUncorrelated) {
  RngStream a(4, 1), b(4, 2);
  const Signal u = gaussian_vector(a, 20000), v = gaussian_vector(b, 20000);
  const double corr = dot(u, v) / std::sqrt(squared_norm(u) * squared_norm(v));
  EXPECT_LT(std::abs(corr), 4.0 / std::sqrt(20000.0));
}

TEST(Config, DefaultsValidate) {
  SamplerConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_DOUBLE_EQ(cfg.resolved_t_max(), 16.0);
  EXPECT_EQ(cfg.langevin_steps, 100u);
  EXPECT_DOUBLE_EQ(cfg.alpha, 0.5);
  EXPECT_DOUBLE_EQ(cfg.epsilon_divisor, 1000.0);
  EXPECT_DOUBLE_EQ(cfg.rho, 7.0);
  EXPECT_DOUBLE_EQ(cfg.t_min, 0.02);
}

TEST(Config, InvalidFieldsAreNamed) {
  auto field_of = [](SamplerConfig cfg) {
    try {
      cfg.validate();
    } catch (const ConfigError& e) {
      return e.field();
    }
    return std::string("none");
  };
  SamplerConfig c;
  c.alpha = -1;
  EXPECT_EQ(field_of(c), "sampler.alpha");
  c = {};
  c.t_min = 20;
  EXPECT_EQ(field_of(c), "sampler.t_min");
  c = {};
  c.mc_probes = 0;
  EXPECT_EQ(field_of(c), "sampler.mc_probes");
  c = {};
  c.steps = 1;
  EXPECT_EQ(field_of(c), "sampler.steps");
}

TEST(Report, StepCsvGoldenHeader) {
  EXPECT_EQ(kStepCsvVersion, 1);
  EXPECT_EQ(step_csv_header(),
            "step,sigma_t,sigma_hat_raw,sigma_hat_used,sure_value,psnr_x0t,psnr_x0ty,psnr_star,nfe_step");
}

TEST(Report, StepCsvRows) {
  RunReport r;
  StepRecord s;
  s.step = 0;
  s.sigma_t = 16;
  s.sigma_hat_raw = 0.25;
  s.nfe = 3;
  r.steps.push_back(s);
  r.final.wall_seconds = 12.5;
  std::ostringstream out;
  write_step_csv(out, r);
  EXPECT_EQ(out.str(), step_csv_header() + "\n0,16,0.25,nan,nan,nan,nan,nan,3\n");
  EXPECT_EQ(format_number(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(r.summed_step_nfe(), 3u);
}

#include <gtest/gtest.h>

#include <cmath>

#include "sgps/error.hpp"
#include "sgps/sure.hpp"
#include "support/gen.hpp"

using namespace sgps;
using sgps::prop::Gen;

namespace {

// Denoiser without an input gradient, forcing the finite-difference path.
class OpaqueDenoiser final : public Denoiser {
 public:
  explicit OpaqueDenoiser(const Denoiser& inner) : inner_(inner) {}

 protected:
  Signal do_denoise(const Signal& x, double sigma) const override { return inner_.denoise(x, sigma); }

 private:
  const Denoiser& inner_;
};

}  // namespace

TEST(Sure, EpsilonRule) {
  EXPECT_DOUBLE_EQ(sure_epsilon(Signal::vector({0.5, 2.0, -3.0}), 1000.0), 2e-3);
  // Non-positive maximum falls back to the floor.
  EXPECT_DOUBLE_EQ(sure_epsilon(Signal::vector({-1.0, -2.0}), 1000.0), 1e-6 * 3.0);
  EXPECT_THROW(sure_epsilon(Signal::vector({1.0}), 0.0), ArgumentError);
}

TEST(Sure, IdentityDenoiserExample) {
  // D(x) = x: residual 0, divergence n, SURE = n sigma^2.
  const auto d = LinearDenoiser::scaled_identity(4, 1.0);
  const Signal x = Signal::vector({0.1, 0.2, 0.3, 0.4});
  SamplerConfig cfg;
  cfg.mc_probes = 3;
  RngStream rng(1, 0);
  const auto eval = sure_value(d, x, 0.5, cfg, rng);
  EXPECT_NEAR(eval.data_term, 0.0, 1e-30);
  // Each probe estimates b^T b, whose expectation is n.
  double quad = 0.0;
  for (const Signal& b : eval.trace.probes) quad += squared_norm(b) / 3.0;
  EXPECT_NEAR(eval.trace_estimate, quad, 1e-9 * quad);
  EXPECT_NEAR(eval.sure_value, -4 * 0.25 + 2 * 0.25 * quad, 1e-9);
  EXPECT_EQ(eval.trace.probes.size(), 3u);
}

TEST(Sure, ZeroDenoiserExample) {
  // D(x) = 0: SURE = |x|^2 - n sigma^2.
  const auto d = LinearDenoiser::scaled_identity(3, 0.0);
  const Signal x = Signal::vector({1.0, 2.0, 2.0});
  SamplerConfig cfg;
  RngStream rng(2, 0);
  const auto eval = sure_value(d, x, 1.0, cfg, rng);
  EXPECT_NEAR(eval.sure_value, 9.0 - 3.0, 1e-12);
  EXPECT_EQ(eval.trace_estimate, 0.0);
  EXPECT_THROW(sure_value(d, x, 0.0, cfg, rng), ArgumentError);
}

TEST(Sure, ReassembleIsTheStoredValue) {
  for (std::uint64_t c = 0; c < 30; ++c) {
    Gen g(80, c);
    const Shape s = g.shape(5);
    GmmDenoiser d(g.mixture(s, 3, 1.0, 0.2));
    SamplerConfig cfg;
    cfg.mc_probes = g.integer(1, 4);
    const auto eval = sure_value(d, g.signal(s), g.log_uniform(0.05, 1.0), cfg, g.rng());
    EXPECT_EQ(eval.reassemble(), eval.sure_value);
    EXPECT_EQ(eval.n, s.numel());
  }
}

TEST(SureProperty, LinearMapPerProbeIsQuadraticForm) {
  for (std::uint64_t c = 0; c < 40; ++c) {
    Gen g(81, c);
    const std::size_t n = g.integer(1, 30);
    const Eigen::MatrixXd M = g.matrix(n, n);
    LinearDenoiser d(M);
    const Signal x = g.signal(Shape::vector(n));
    const auto est = mc_trace(d, x, 0.3, 5, 1e-3, g.rng());
    for (std::size_t p = 0; p < 5; ++p) {
      const Eigen::VectorXd b = prop::to_vector(est.probes[p]);
      const double want = b.dot(M * b);
      EXPECT_NEAR(est.samples[p], want, 1e-8 * (1 + b.squaredNorm() * M.cwiseAbs().maxCoeff())) << "case " << c;
    }
  }
}

TEST(Sure, McTraceConvergesOnGmm) {
  Gen g(82, 0);
  const Shape s = Shape::vector(16);
  const auto prior = g.mixture(s, 3, 0.5, 0.1);
  GmmDenoiser d(prior);
  const Signal x = g.signal(s);
  const double sigma = 0.3;
  const auto est = mc_trace(d, x, sigma, 4000, 1e-4, g.rng());
  const double exact = prior.jacobian_trace(x, sigma);
  EXPECT_NEAR(est.value, exact, 3 * est.standard_error + 1e-3);
  EXPECT_GT(est.standard_error, 0.0);
}

TEST(Sure, McTraceCountsDenoiserCalls) {
  GmmDenoiser inner(GmmPrior::gaussian(Signal::vector({0, 0, 0}), 1.0));
  CountingDenoiser d(inner);
  RngStream rng(3, 0);
  const Signal x = Signal::vector({1, 2, 3});
  mc_trace(d, x, 0.5, 4, 1e-3, rng);
  EXPECT_EQ(d.count(), 5u);
  d.reset();
  SamplerConfig cfg;
  cfg.mc_probes = 2;
  const auto eval = sure_value(d, x, 0.5, cfg, rng);
  EXPECT_EQ(d.count(), 3u);
  d.reset();
  sure_gradient(d, x, eval);
  EXPECT_EQ(d.count(), 0u);
}

TEST(Sure, RoundoffProbesAreCounted) {
  // A constant denoiser ignores its input, so every probe output equals the base.
  const auto d = LinearDenoiser::scaled_identity(3, 0.0);
  RngStream rng(4, 0);
  const auto est = mc_trace(d, Signal::vector({1, 2, 3}), 0.5, 3, 1e-3, rng);
  EXPECT_EQ(est.roundoff_probes, 3u);
  EXPECT_TRUE(est.roundoff());
}

TEST(SureProperty, AnalyticGradientMatchesFiniteDifferences) {
  for (std::uint64_t c = 0; c < 25; ++c) {
    Gen g(83, c);
    const Shape s = Shape::vector(g.integer(2, 16));
    GmmDenoiser d(g.mixture(s, g.integer(1, 4), 0.5, g.log_uniform(0.05, 0.5)));
    SamplerConfig cfg;
    cfg.mc_probes = g.integer(1, 3);
    cfg.epsilon_divisor = 100.0;
    const Signal x = g.signal(s);
    const auto eval = sure_value(d, x, g.log_uniform(0.1, 1.0), cfg, g.rng());
    const Signal analytic = sure_gradient(d, x, eval);
    // Epsilon can sit at its floor (max(x) <= 0), so the probe term divides
    // by ~1e-6 and a smaller step would be roundoff dominated.
    const double h = 1e-4 * (1 + max_abs(x));
    Signal fd(s);
    for (std::size_t i = 0; i < x.size(); ++i) {
      Signal xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      fd[i] = (sure_expression(d, xp, eval.sigma_used, eval.epsilon, eval.trace.probes) -
               sure_expression(d, xm, eval.sigma_used, eval.epsilon, eval.trace.probes)) /
              (2 * h);
    }
    EXPECT_LT(prop::max_rel_error(analytic, fd), 1e-4) << "case " << c;
  }
}

TEST(Sure, NumericFallbackAgreesWithAnalytic) {
  Gen g(84, 0);
  const Shape s = Shape::vector(6);
  GmmDenoiser d(g.mixture(s, 2, 0.5, 0.2));
  OpaqueDenoiser opaque(d);
  SamplerConfig cfg;
  cfg.epsilon_divisor = 100.0;
  const Signal x = g.signal(s);
  const auto eval = sure_value(d, x, 0.4, cfg, g.rng());
  EXPECT_LT(prop::max_rel_error(sure_gradient(opaque, x, eval), sure_gradient(d, x, eval)), 1e-5);
}

TEST(Sure, ExpressionMatchesEvaluation) {
  Gen g(85, 0);
  const Shape s = Shape::grid(3, 3);
  GmmDenoiser d(g.mixture(s, 2, 0.5, 0.2));
  SamplerConfig cfg;
  cfg.mc_probes = 2;
  const Signal x = g.signal(s);
  const auto eval = sure_value(d, x, 0.4, cfg, g.rng());
  EXPECT_NEAR(sure_expression(d, x, eval.sigma_used, eval.epsilon, eval.trace.probes), eval.sure_value,
              1e-12 * (1 + std::abs(eval.sure_value)));
}

TEST(Sure, UpdateExamples) {
  const Signal x = Signal::vector({1.0, 2.0});
  const Signal g = Signal::vector({0.5, -1.0});
  EXPECT_EQ(sure_update(x, g, 0.0), x);
  EXPECT_EQ(sure_update(x, g, 2.0), Signal::vector({0.0, 4.0}));
  EXPECT_THROW(sure_update(x, g, -1.0), ArgumentError);
  EXPECT_THROW(sure_update(x, Signal::vector({1.0}), 1.0), ShapeError);
}

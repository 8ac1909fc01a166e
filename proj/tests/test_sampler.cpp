#include <gtest/gtest.h>

#include <cmath>

#include "sgps/error.hpp"
#include "sgps/sampler.hpp"
#include "support/gen.hpp"

using namespace sgps;
using sgps::prop::Gen;

namespace {

struct Toy {
  GmmDenoiser den;
  std::unique_ptr<ForwardOp> op;
  Signal x0;
  Signal y;
};

Toy toy_1d(std::uint64_t seed) {
  const Shape s = Shape::vector(16);
  GmmPrior prior = GmmPrior::gaussian(Signal(s), 1.0);
  RngStream rng(seed, 77);
  Signal x0 = prior.sample(rng);
  auto op = make_random_mask(s, 0.5, rng);
  Signal y = op->apply(x0);
  Signal noise = gaussian_like(rng, y.shape());
  noise *= 0.05;
  y += noise;
  return Toy{GmmDenoiser(std::move(prior)), std::move(op), std::move(x0), std::move(y)};
}

SamplerConfig toy_config() {
  SamplerConfig cfg;
  cfg.patch.patch_size = 4;
  return cfg;
}

}  // namespace

TEST(Sampler, NfeAccountingAtDefaults) {
  const Toy t = toy_1d(1);
  SamplerConfig cfg = toy_config();
  auto r = sgps_run(t.den, *t.op, t.y, cfg);
  EXPECT_EQ(r.report.final.total_nfe, 48u);
  EXPECT_EQ(r.report.summed_step_nfe(), 48u);
  for (const auto& s : r.report.steps) EXPECT_EQ(s.nfe, 3u);
  cfg.steps = 33;
  r = sgps_run(t.den, *t.op, t.y, cfg);
  EXPECT_EQ(r.report.final.total_nfe, 99u);
}

TEST(SamplerProperty, NfeLaw) {
  const Toy t = toy_1d(2);
  for (std::uint64_t c = 0; c < 12; ++c) {
    Gen g(90, c);
    SamplerConfig cfg = toy_config();
    cfg.steps = g.integer(2, 10);
    cfg.ode_substeps = g.integer(1, 4);
    cfg.mc_probes = g.integer(1, 4);
    cfg.sure_repeats = g.integer(1, 3);
    cfg.sure_enabled = g.coin();
    cfg.langevin_steps = 10;
    const auto r = sgps_run(t.den, *t.op, t.y, cfg);
    std::size_t want = 0;
    for (const auto& s : r.report.steps) {
      std::size_t sure = 0;
      if (cfg.sure_enabled && !s.sure_skipped) sure = cfg.sure_repeats * (1 + cfg.mc_probes);
      EXPECT_EQ(s.nfe, cfg.ode_substeps + sure) << "case " << c;
      want += cfg.ode_substeps + sure;
    }
    EXPECT_EQ(r.report.final.total_nfe, want);
  }
}

TEST(Sampler, DeterministicForOneStream) {
  const Toy t = toy_1d(3);
  const SamplerConfig cfg = toy_config();
  const auto a = sgps_run(t.den, *t.op, t.y, cfg, RngStream(9, 1), &t.x0);
  const auto b = sgps_run(t.den, *t.op, t.y, cfg, RngStream(9, 1), &t.x0);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.report.final.psnr, b.report.final.psnr);
  const auto c = sgps_run(t.den, *t.op, t.y, cfg, RngStream(10, 1), &t.x0);
  EXPECT_NE(a.x, c.x);
}

TEST(Sampler, ZeroAlphaMatchesDisabledSure) {
  const Toy t = toy_1d(4);
  SamplerConfig cfg = toy_config();
  cfg.alpha = 0.0;
  const auto with = sgps_run(t.den, *t.op, t.y, cfg, RngStream(5, 0), &t.x0);
  cfg.sure_enabled = false;
  const auto without = sgps_run(t.den, *t.op, t.y, cfg, RngStream(5, 0), &t.x0);
  EXPECT_EQ(with.x, without.x);
  for (std::size_t i = 0; i < with.report.steps.size(); ++i) {
    EXPECT_EQ(with.report.steps[i].psnr_star, without.report.steps[i].psnr_star);
  }
}

TEST(Sampler, ReportRecordsPsnrAndSigma) {
  const Toy t = toy_1d(5);
  const auto r = sgps_run(t.den, *t.op, t.y, toy_config(), &t.x0);
  ASSERT_EQ(r.report.steps.size(), 16u);
  EXPECT_EQ(r.report.steps.front().sigma_t, 16.0);
  EXPECT_EQ(r.report.steps.back().sigma_t, 0.02);
  EXPECT_TRUE(std::isfinite(r.report.final.psnr));
  EXPECT_TRUE(std::isfinite(r.report.steps.back().sigma_hat_raw));
  const auto bare = sgps_run(t.den, *t.op, t.y, toy_config());
  EXPECT_TRUE(std::isnan(bare.report.final.psnr));
}

TEST(Sampler, EarlyStepsAreClampedAndNoted) {
  const Toy t = toy_1d(6);
  SamplerConfig cfg = toy_config();
  cfg.sigma_floor = 1e9;
  const auto r = sgps_run(t.den, *t.op, t.y, cfg);
  for (const auto& s : r.report.steps) EXPECT_TRUE(s.sure_skipped);
  EXPECT_EQ(r.report.notes.size(), 16u);
  EXPECT_EQ(r.report.final.total_nfe, 16u);
}

TEST(Sampler, SigmaHatClampAndScale) {
  const Toy t = toy_1d(7);
  SamplerConfig cfg = toy_config();
  cfg.sigma_hat_scale = 1.5;
  const auto r = sgps_run(t.den, *t.op, t.y, cfg);
  for (const auto& s : r.report.steps) {
    if (s.sure_skipped) continue;
    EXPECT_DOUBLE_EQ(s.sigma_hat_used, 1.5 * std::min(s.sigma_hat_raw, s.sigma_t)) << s.step;
  }
}

TEST(Sampler, InvalidInputsAreRejected) {
  const Toy t = toy_1d(8);
  SamplerConfig cfg = toy_config();
  EXPECT_THROW(sgps_run(t.den, *t.op, Signal::vector({1.0}), cfg), ShapeError);
  cfg.alpha = -1;
  EXPECT_THROW(sgps_run(t.den, *t.op, t.y, cfg), ConfigError);
}

TEST(Sampler, NoiseInfluxPairsShareStreams) {
  const Toy t = toy_1d(9);
  const auto trace = noise_influx_trace(t.den, *t.op, t.y, toy_config(), RngStream(3, 0), &t.x0);
  ASSERT_EQ(trace.with_sure.report.steps.size(), trace.without_sure.report.steps.size());
  // The first step is identical up to the SURE correction.
  EXPECT_EQ(trace.with_sure.report.steps[0].psnr_x0ty, trace.without_sure.report.steps[0].psnr_x0ty);
  EXPECT_TRUE(std::isfinite(trace.without_sure.report.steps[3].sigma_hat_star));
}

TEST(DenoiseStep, OneSubstepIsTheDenoiser) {
  Gen g(91, 0);
  const Shape s = Shape::vector(5);
  GmmDenoiser d(g.mixture(s, 3, 1.0, 0.2));
  const Signal x = g.signal(s);
  const auto sched = SigmaSchedule::karras(16, 0.02, 16.0, 7.0);
  EXPECT_EQ(denoise_step(d, x, 2.0, 1, sched), d.denoise(x, 2.0));
  CountingDenoiser counter(d);
  denoise_step(counter, x, 2.0, 5, sched);
  EXPECT_EQ(counter.count(), 5u);
}

TEST(DenoiseStep, SubstepsConvergeToFlowSolution) {
  // Gaussian prior N(m, s^2 I): the flow from sigma_t to 0 maps x to
  // m + (x - m) s / sqrt(s^2 + sigma_t^2).
  const double s2 = 0.25, sigma_t = 5.0;
  Gen g(92, 0);
  const Shape shape = Shape::vector(6);
  const Signal m = g.signal(shape);
  GmmDenoiser d(GmmPrior::gaussian(m, s2));
  const Signal x = m + g.signal(shape, sigma_t);
  const double factor = std::sqrt(s2 / (s2 + sigma_t * sigma_t));
  const Signal exact = m + factor * (x - m);
  const auto sched = SigmaSchedule::karras(16, 0.02, 16.0, 7.0);
  double previous = std::sqrt(squared_distance(denoise_step(d, x, sigma_t, 1, sched), exact));
  for (std::size_t sub : {2, 4, 8, 16, 32, 64}) {
    const double err = std::sqrt(squared_distance(denoise_step(d, x, sigma_t, sub, sched), exact));
    EXPECT_LT(err, previous) << sub;
    previous = err;
  }
  EXPECT_LT(previous, 0.05 * std::sqrt(squared_distance(x, m)) * factor);
}

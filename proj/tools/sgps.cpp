// sgps: command-line front end.
//
//   sgps run <config>        run every sweep point and repeat, write CSV/SVG
//   sgps sweep <config>      same, requires [sweep] axes, prints per-point means
//   sgps influx <config>     paired with/without-SURE noise-level traces
//   sgps estimate <pgm>      patch-PCA noise level of an image
//   sgps synth ...           smooth synthetic image plus Gaussian noise

#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "sgps/error.hpp"
#include "sgps/harness/experiment.hpp"
#include "sgps/harness/pgm.hpp"
#include "sgps/noise_est.hpp"
#include "sgps/simd/kernels.hpp"

using namespace sgps;
using namespace sgps::harness;

namespace {

int report_outcome(const ExperimentOutcome& out, const std::string& dir) {
  for (const auto& f : out.files) std::cout << dir << '/' << f << '\n';
  if (out.failures > 0) {
    std::cerr << out.failures << " of " << out.runs << " runs diverged (see summary)\n";
  }
  return out.exit_code();
}

int cmd_run(const std::string& path, bool require_sweep) {
  const ExperimentConfig cfg = load_experiment_config(path);
  if (require_sweep && !cfg.sweep.any()) throw ConfigError("sweep", "no sweep axes in " + path);
  const std::string dir = resolve_output_dir(cfg);
  const ExperimentOutcome out = run_experiment(cfg, dir);
  if (require_sweep) {
    std::map<std::size_t, std::pair<double, std::size_t>> psnr;
    for (const auto& row : out.rows) {
      if (row.status != "ok") continue;
      auto& acc = psnr[row.sweep_index];
      acc.first += row.final.psnr;
      ++acc.second;
    }
    std::printf("%-6s %-8s %-8s %-8s %-7s %-9s %-7s %s\n", "point", "alpha", "eta", "scale", "probes", "substeps",
                "repeats", "mean_psnr");
    for (const auto& p : expand_sweep(cfg)) {
      const auto it = psnr.find(p.index);
      const double mean = it == psnr.end() ? NAN : it->second.first / static_cast<double>(it->second.second);
      std::printf("%-6zu %-8.4g %-8s %-8.4g %-7zu %-9zu %-7zu %.4f\n", p.index, p.sampler.alpha,
                  p.sampler.langevin_eta ? std::to_string(*p.sampler.langevin_eta).c_str() : "auto",
                  p.sampler.sigma_hat_scale, p.sampler.mc_probes, p.sampler.ode_substeps, p.sampler.sure_repeats, mean);
    }
  }
  return report_outcome(out, dir);
}

int cmd_influx(const std::string& path) {
  const ExperimentConfig cfg = load_experiment_config(path);
  const std::string dir = resolve_output_dir(cfg);
  return report_outcome(run_influx(cfg, dir), dir);
}

int cmd_estimate(const std::string& path, std::size_t patch, std::size_t stride) {
  Signal image;
  try {
    image = read_pgm(path);
  } catch (const Error& e) {
    std::cerr << "sgps estimate: " << e.what() << '\n';
    return kExitFailed;
  }
  PatchConfig cfg;
  cfg.patch_size = patch;
  cfg.stride = stride;
  const NoiseEstimate est = estimate_noise(image, cfg);
  if (est.rank_deficient) {
    std::cerr << "warning: " << est.patches << " patches for dimension " << patch * patch
              << ", estimate is biased low\n";
  }
  std::printf("%.6g\n", est.sigma);
  return kExitOk;
}

int cmd_synth(double sigma, const std::string& size, const std::string& out, std::uint64_t seed, int bits) {
  const Shape shape = Shape::parse(size);
  if (!shape.is_grid()) throw ArgumentError("--size must be HxW");
  RngStream rng(seed, 0);
  write_pgm(out, synth_image(shape.rows(), shape.cols(), sigma, rng), bits);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SURE-guided posterior sampling with analytic priors"};
  app.require_subcommand(1);
  bool show_isa = false;
  app.add_flag("--isa", show_isa, "Print the active SIMD kernel set to stderr");

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run an experiment config");
  run->add_option("config", config_path, "INI or JSON config")->required();
  auto* sweep = app.add_subcommand("sweep", "Run the sweep axes of a config and print per-point means");
  sweep->add_option("config", config_path, "INI or JSON config")->required();
  auto* influx = app.add_subcommand("influx", "Paired with/without-SURE noise-level traces");
  influx->add_option("config", config_path, "INI or JSON config")->required();

  std::string image_path;
  std::size_t patch = 7, stride = 1;
  auto* estimate = app.add_subcommand("estimate", "Patch-PCA noise level of a PGM image");
  estimate->add_option("image", image_path, "P5 PGM file")->required();
  estimate->add_option("--patch", patch, "Patch size")->check(CLI::PositiveNumber);
  estimate->add_option("--stride", stride, "Patch stride")->check(CLI::PositiveNumber);

  double sigma = 0.1;
  std::string size = "64x64", out_path;
  std::uint64_t seed = 0;
  int bits = 16;
  auto* synth = app.add_subcommand("synth", "Write a smooth synthetic image with Gaussian noise");
  synth->add_option("--sigma", sigma, "Noise standard deviation")->required()->check(CLI::NonNegativeNumber);
  synth->add_option("--size", size, "HxW");
  synth->add_option("--out", out_path, "Output PGM path")->required();
  synth->add_option("--seed", seed, "Noise seed");
  synth->add_option("--bits", bits, "8 or 16")->check(CLI::IsMember({8, 16}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }
  if (show_isa) std::cerr << "simd: " << simd::name(simd::active().isa) << '\n';

  try {
    if (*run) return cmd_run(config_path, false);
    if (*sweep) return cmd_run(config_path, true);
    if (*influx) return cmd_influx(config_path);
    if (*estimate) return cmd_estimate(image_path, patch, stride);
    if (*synth) return cmd_synth(sigma, size, out_path, seed, bits);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailed;
  }
  return kExitOk;
}

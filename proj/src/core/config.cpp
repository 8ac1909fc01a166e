#include "sgps/config.hpp"

#include <cmath>

#include "sgps/error.hpp"

namespace sgps {
namespace {

void require(bool ok, const char* field, const char* message) {
  if (!ok) throw ConfigError(field, message);
}

bool positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

void SamplerConfig::validate() const {
  require(steps >= 2, "sampler.steps", "must be >= 2");
  require(std::isfinite(alpha) && alpha >= 0.0, "sampler.alpha", "must be >= 0");
  require(positive(epsilon_divisor), "sampler.epsilon_divisor", "must be > 0");
  require(langevin_steps >= 1, "sampler.langevin_steps", "must be >= 1");
  require(!langevin_eta || positive(*langevin_eta), "sampler.langevin_eta", "must be > 0");
  require(positive(lipschitz_scale), "sampler.lipschitz_scale", "must be > 0");
  require(positive(sigma_y), "sampler.sigma_y", "must be > 0");
  require(positive(rho), "sampler.rho", "must be > 0");
  require(positive(t_min), "sampler.t_min", "must be > 0");
  require(!t_max || positive(*t_max), "sampler.t_max", "must be > 0");
  require(t_min < resolved_t_max(), "sampler.t_min", "must be < t_max");
  require(sure_repeats >= 1, "sampler.sure_repeats", "must be >= 1");
  require(mc_probes >= 1, "sampler.mc_probes", "must be >= 1");
  require(ode_substeps >= 1, "sampler.ode_substeps", "must be >= 1");
  require(std::isfinite(sigma_floor) && sigma_floor >= 0.0, "sampler.sigma_floor", "must be >= 0");
  require(positive(sigma_hat_scale), "sampler.sigma_hat_scale", "must be > 0");
  require(positive(psnr_peak), "sampler.psnr_peak", "must be > 0");
  require(patch.patch_size >= 1, "patch.size", "must be >= 1");
  require(patch.stride >= 1, "patch.stride", "must be >= 1");
  require(std::isfinite(patch.tolerance) && patch.tolerance >= 0.0, "patch.tolerance", "must be >= 0");
}

}  // namespace sgps

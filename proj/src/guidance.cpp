#include "sgps/guidance.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sgps/error.hpp"
#include "sgps/simd/kernels.hpp"

namespace sgps {

double langevin_step_size(const SamplerConfig& cfg, double sigma_t) {
  if (cfg.langevin_eta) return *cfg.langevin_eta;
  return 0.5 * std::min(sigma_t * sigma_t, cfg.sigma_y * cfg.sigma_y) / cfg.lipschitz_scale;
}

Signal langevin_guide(const Signal& x_init, const Signal& x_anchor, double sigma_t, const ForwardOp& op,
                      const Signal& y, const SamplerConfig& cfg, RngStream& rng, std::size_t step) {
  return langevin_guide(x_init, x_anchor, sigma_t, op, y, cfg.sigma_y, langevin_step_size(cfg, sigma_t),
                        cfg.langevin_steps, true, rng, step);
}

Signal langevin_guide(const Signal& x_init, const Signal& x_anchor, double sigma_t, const ForwardOp& op,
                      const Signal& y, double sigma_y, double eta, std::size_t steps, bool inject_noise,
                      RngStream& rng, std::size_t step) {
  require_same_shape(x_init, x_anchor, "langevin_guide anchor");
  if (x_init.shape() != op.input_shape()) throw ShapeError("langevin_guide: x does not match the operator input");
  if (!(sigma_t > 0.0)) throw ArgumentError("langevin_guide: sigma_t must be > 0");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw ArgumentError("langevin_guide: eta must be > 0");
  if (steps == 0) throw ArgumentError("langevin_guide: needs at least one step");

  const auto& k = simd::active();
  const std::size_t n = x_init.size();
  const double prior_weight = 1.0 / (sigma_t * sigma_t);
  const double noise_scale = inject_noise ? std::sqrt(2.0 * eta) : 0.0;

  Signal x = x_init;
  Signal noise(x.shape());
  for (std::size_t j = 0; j < steps; ++j) {
    Signal grad = fidelity_gradient(op, x, y, sigma_y);
    // grad += (x - anchor) / sigma_t^2
    k.axpy(prior_weight, x.values().data(), grad.values().data(), n);
    k.axpy(-prior_weight, x_anchor.values().data(), grad.values().data(), n);
    if (inject_noise) {
      for (std::size_t i = 0; i < n; ++i) noise[i] = rng.normal();
    }
    k.langevin_step(x.values().data(), grad.values().data(), noise.values().data(), eta, noise_scale, n);
    if (!x.all_finite()) {
      throw DivergenceError("guidance", step,
                            "langevin iterate " + std::to_string(j) + " is not finite (eta = " +
                                std::to_string(eta) + ")");
    }
  }
  return x;
}

}  // namespace sgps

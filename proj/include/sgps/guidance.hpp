#pragma once

#include "sgps/config.hpp"
#include "sgps/operators.hpp"
#include "sgps/rng.hpp"
#include "sgps/signal.hpp"

namespace sgps {

/// 0.5 * min(sigma_t^2, sigma_y^2) / lipschitz_scale, or cfg.langevin_eta when set.
double langevin_step_size(const SamplerConfig& cfg, double sigma_t);

/// Unadjusted Langevin chain on
///   U(x) = |x - anchor|^2 / (2 sigma_t^2) + |A(x) - y|^2 / (2 sigma_y^2),
/// x <- x - eta grad U(x) + sqrt(2 eta) xi, for cfg.langevin_steps updates
/// starting at x_init. Never calls the denoiser.
///
/// `step` only labels a DivergenceError raised when an iterate stops being
/// finite.
Signal langevin_guide(const Signal& x_init, const Signal& x_anchor, double sigma_t, const ForwardOp& op,
                      const Signal& y, const SamplerConfig& cfg, RngStream& rng, std::size_t step = 0);

/// Same chain with an explicit step size and an optional noise switch. With
/// inject_noise false the chain is plain gradient descent and draws nothing.
Signal langevin_guide(const Signal& x_init, const Signal& x_anchor, double sigma_t, const ForwardOp& op,
                      const Signal& y, double sigma_y, double eta, std::size_t steps, bool inject_noise,
                      RngStream& rng, std::size_t step = 0);

}  // namespace sgps

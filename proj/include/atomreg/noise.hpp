#pragma once

#include <cstdint>
#include <string>

#include "atomreg/atoms.hpp"
#include "atomreg/bounds.hpp"

namespace atomreg {

/// One realization of the analytic noise field as L isotropic atoms.
struct NoiseDraw {
  Pattern pattern;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  NoiseSpec spec;
};

/// Draws delta_l ~ U[-b, b]^2 and zeta_l ~ N(0, eta^2) for l = 1..L.
/// Deterministic in (spec, seed, stream).
NoiseDraw sample_gaussian_field(const NoiseSpec& spec, std::uint64_t seed, std::uint64_t stream = 0);

/// Adds i.i.d. N(0, eta^2) to every pixel.
RasterImage add_digital_noise(const RasterImage& img, double eta, std::uint64_t seed, std::uint64_t stream = 0);

enum class GenericNoiseMode { CorrelatedSubset, RandomAtoms };

GenericNoiseMode generic_noise_mode_from_string(const std::string& name);

/// Structured noise pattern z with ||z|| = target_nu.
///   CorrelatedSubset: n_atoms distinct atoms of p (same parameters and coefficients).
///   RandomAtoms: n_atoms atoms with centres in [-b, b]^2 (b = max(4, p's centre radius)),
///   scales in [0.1, 0.3], random rotation and coefficients in [-1, 1].
/// Throws std::invalid_argument when a correlated subset asks for more atoms than p has.
Pattern make_generic_noise(const Pattern& p, GenericNoiseMode mode, int n_atoms, double target_nu, std::uint64_t seed,
                           std::uint64_t stream = 0);

/// Noise parameters after smoothing with an isotropic kernel of size rho:
/// eps_hat = sqrt(eps^2 + rho^2), eta_hat = eps^2 / (eps^2 + rho^2) * eta.
NoiseSpec smoothed_noise_params(const NoiseSpec& spec, double rho);

}  // namespace atomreg

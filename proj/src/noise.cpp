#include "atomreg/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "atomreg/rng.hpp"

namespace atomreg {

NoiseDraw sample_gaussian_field(const NoiseSpec& spec, std::uint64_t seed, std::uint64_t stream) {
  spec.validate();
  if (spec.kind != NoiseKind::GaussianAnalytic) {
    throw std::invalid_argument("sample_gaussian_field needs a gaussian-analytic noise spec");
  }
  Philox rng(seed, stream);
  std::vector<Atom> atoms;
  atoms.reserve(static_cast<std::size_t>(spec.L));
  const Vec2 scale(spec.epsilon, spec.epsilon);
  for (int l = 0; l < spec.L; ++l) {
    const double dx = rng.uniform(-spec.b, spec.b);
    const double dy = rng.uniform(-spec.b, spec.b);
    const double zeta = spec.eta * rng.normal();
    atoms.push_back(Atom::make(zeta, 0.0, Vec2(dx, dy), scale));
  }
  NoiseDraw draw;
  draw.pattern = Pattern(std::move(atoms));
  draw.seed = seed;
  draw.stream = stream;
  draw.spec = spec;
  return draw;
}

RasterImage add_digital_noise(const RasterImage& img, double eta, std::uint64_t seed, std::uint64_t stream) {
  img.validate();
  if (!(eta >= 0.0)) throw std::invalid_argument("eta must be nonnegative");
  RasterImage out = img;
  if (eta == 0.0) return out;
  Philox rng(seed, stream);
  for (auto& v : out.pixels) v += eta * rng.normal();
  return out;
}

GenericNoiseMode generic_noise_mode_from_string(const std::string& name) {
  if (name == "correlated-subset" || name == "correlated") return GenericNoiseMode::CorrelatedSubset;
  if (name == "random-atoms" || name == "random") return GenericNoiseMode::RandomAtoms;
  throw std::invalid_argument("unknown generic noise mode '" + name + "'");
}

Pattern make_generic_noise(const Pattern& p, GenericNoiseMode mode, int n_atoms, double target_nu, std::uint64_t seed,
                           std::uint64_t stream) {
  if (n_atoms < 1) throw std::invalid_argument("noise pattern needs at least one atom");
  if (!(target_nu >= 0.0)) throw std::invalid_argument("target norm must be nonnegative");
  Philox rng(seed, stream);
  std::vector<Atom> atoms;
  if (mode == GenericNoiseMode::CorrelatedSubset) {
    if (static_cast<std::size_t>(n_atoms) > p.size()) {
      throw std::invalid_argument("correlated subset asks for " + std::to_string(n_atoms) + " atoms but the pattern has " +
                                  std::to_string(p.size()));
    }
    std::vector<std::size_t> idx(p.size());
    std::iota(idx.begin(), idx.end(), 0);
    // Partial Fisher-Yates; the chosen atoms keep their original order.
    for (int i = 0; i < n_atoms; ++i) {
      const std::size_t j = i + rng.below(idx.size() - i);
      std::swap(idx[i], idx[j]);
    }
    std::vector<std::size_t> chosen(idx.begin(), idx.begin() + n_atoms);
    std::sort(chosen.begin(), chosen.end());
    for (auto i : chosen) atoms.push_back(p[i]);
  } else {
    const double b = std::max(4.0, p.center_radius());
    for (int i = 0; i < n_atoms; ++i) {
      const double c = rng.uniform(-1.0, 1.0);
      const double psi = rng.uniform(0.0, std::numbers::pi);
      const double tx = rng.uniform(-b, b);
      const double ty = rng.uniform(-b, b);
      const double sx = rng.uniform(0.1, 0.3);
      const double sy = rng.uniform(0.1, 0.3);
      atoms.push_back(Atom::make(c, psi, Vec2(tx, ty), Vec2(sx, sy)));
    }
  }
  Pattern z(std::move(atoms));
  const double n = pattern_norm(z);
  if (target_nu == 0.0 || n == 0.0) return scale_pattern(z, 0.0);
  return scale_pattern(z, target_nu / n);
}

NoiseSpec smoothed_noise_params(const NoiseSpec& spec, double rho) {
  if (!(rho >= 0.0)) throw std::invalid_argument("filter size must be nonnegative");
  if (rho == 0.0) return spec;
  NoiseSpec out = spec;
  const double e2 = spec.epsilon * spec.epsilon;
  out.epsilon = std::sqrt(e2 + rho * rho);
  out.eta = e2 / (e2 + rho * rho) * spec.eta;
  return out;
}

}  // namespace atomreg

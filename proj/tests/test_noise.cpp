#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>

#include "atomreg/bounds.hpp"
#include "atomreg/distance.hpp"
#include "atomreg/noise.hpp"
#include "oracles.hpp"

using namespace atomreg;

namespace {

NoiseSpec spec(int L, double eps, double eta, double b = 4.0) {
  NoiseSpec n;
  n.L = L;
  n.epsilon = eps;
  n.eta = eta;
  n.b = b;
  return n;
}

}  // namespace

TEST(Philox, KnownAnswers) {
  using B = std::array<std::uint32_t, 4>;
  EXPECT_EQ(Philox::block({0, 0, 0, 0}, {0, 0}), (B{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
  EXPECT_EQ(Philox::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}),
            (B{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
  EXPECT_EQ(Philox::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}),
            (B{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(Philox, StreamsAreReplayableAndDistinct) {
  Philox a(7, 3), b(7, 3), c(7, 4), d(8, 3);
  for (int i = 0; i < 10; ++i) {
    const std::uint32_t x = a.next_u32();
    EXPECT_EQ(x, b.next_u32());
    EXPECT_NE(x, c.next_u32());
    EXPECT_NE(x, d.next_u32());
  }
  EXPECT_EQ(stream_id(1, 5), (std::uint64_t{1} << 40) ^ 5u);
}

TEST(Philox, UniformAndBelowRanges) {
  Philox r(9, 0);
  for (int i = 0; i < 10000; ++i) {
    const double u = r.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    EXPECT_LT(r.below(7), 7u);
  }
}

TEST(GaussianField, ZeroEtaGivesZeroCoefficients) {
  const NoiseDraw d = sample_gaussian_field(spec(50, 0.1, 0.0), 1);
  ASSERT_EQ(d.pattern.size(), 50u);
  for (const auto& a : d.pattern) EXPECT_EQ(a.coeff, 0.0);
}

TEST(GaussianField, AtomLayout) {
  const NoiseDraw d = sample_gaussian_field(spec(200, 0.2, 0.1, 3.0), 2, 5);
  ASSERT_EQ(d.pattern.size(), 200u);
  EXPECT_EQ(d.seed, 2u);
  EXPECT_EQ(d.stream, 5u);
  for (const auto& a : d.pattern) {
    EXPECT_EQ(a.sigma.x(), 0.2);
    EXPECT_EQ(a.sigma.y(), 0.2);
    EXPECT_LE(std::abs(a.tau.x()), 3.0);
    EXPECT_LE(std::abs(a.tau.y()), 3.0);
  }
}

TEST(GaussianField, Deterministic) {
  const NoiseDraw a = sample_gaussian_field(spec(30, 0.1, 0.2), 11, 4);
  const NoiseDraw b = sample_gaussian_field(spec(30, 0.1, 0.2), 11, 4);
  const NoiseDraw c = sample_gaussian_field(spec(30, 0.1, 0.2), 12, 4);
  for (std::size_t i = 0; i < 30; ++i) {
    EXPECT_EQ(a.pattern[i].coeff, b.pattern[i].coeff);
    EXPECT_EQ(a.pattern[i].tau, b.pattern[i].tau);
  }
  EXPECT_NE(a.pattern[0].coeff, c.pattern[0].coeff);
}

TEST(GaussianField, CoefficientStatistics) {
  const double eta = 0.3;
  const int n = 100000;
  const NoiseDraw d = sample_gaussian_field(spec(n, 0.1, eta), 3);
  double sum = 0.0, sq = 0.0, cx = 0.0;
  for (const auto& a : d.pattern) {
    sum += a.coeff;
    sq += a.coeff * a.coeff;
    cx += a.tau.x();
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  EXPECT_LT(std::abs(mean), 4 * eta / std::sqrt(n));
  EXPECT_LT(std::abs(var / (eta * eta) - 1.0), 0.05);
  // Uniform centres on [-4, 4]: mean 0 with standard deviation 8 / sqrt(12 n).
  EXPECT_LT(std::abs(cx / n), 4 * 8 / std::sqrt(12.0 * n));
}

TEST(GaussianField, MeanDeviationMatchesMonteCarlo) {
  const NoiseSpec n = spec(750, 0.1, 0.051);
  Philox rng(4, 0);
  const Pattern p = oracle::random_pattern(rng, 3);
  const Vec2 u(0.3, -0.2);
  const Pattern diff = add_patterns(p, scale_pattern(translate_pattern(p, u), -1.0));
  const int draws = 5000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < draws; ++i) {
    const Pattern w = sample_gaussian_field(n, 99, i).pattern;
    const double h = -2.0 * pattern_inner_product(diff, translate_pattern(w, u)) + oracle::field_energy(w, n.epsilon);
    sum += h;
    sq += h * h;
  }
  const double mean = sum / draws;
  const double se = std::sqrt((sq / draws - mean * mean) / draws);
  EXPECT_LT(std::abs(mean - mean_deviation(n)), 4 * se);
  EXPECT_NEAR(mean_deviation(n), 0.03064, 1e-5);
}

TEST(DigitalNoise, ZeroEtaIsIdentity) {
  RasterImage img(8, 8, 1.0);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) img.pixels[i] = 0.01 * static_cast<double>(i);
  const RasterImage out = add_digital_noise(img, 0.0, 1);
  EXPECT_EQ(out.pixels, img.pixels);
}

TEST(DigitalNoise, VarianceAndSeeds) {
  RasterImage img(256, 256, 1.0);
  const double eta = 0.2;
  const RasterImage a = add_digital_noise(img, eta, 5);
  const RasterImage b = add_digital_noise(img, eta, 6);
  double sum = 0.0, sq = 0.0;
  for (double v : a.pixels) {
    sum += v;
    sq += v * v;
  }
  const double n = static_cast<double>(a.pixels.size());
  EXPECT_LT(std::abs((sq / n - (sum / n) * (sum / n)) / (eta * eta) - 1.0), 0.05);
  EXPECT_NE(a.pixels, b.pixels);
  EXPECT_EQ(add_digital_noise(img, eta, 5).pixels, a.pixels);
}

TEST(GenericNoise, NormIsExact) {
  Philox rng(6, 0);
  const Pattern p = oracle::random_pattern(rng, 20);
  for (auto mode : {GenericNoiseMode::CorrelatedSubset, GenericNoiseMode::RandomAtoms}) {
    const Pattern z = make_generic_noise(p, mode, 5, 0.37, 1);
    EXPECT_EQ(z.size(), 5u);
    EXPECT_NEAR(pattern_norm(z), 0.37, 1e-10);
  }
}

TEST(GenericNoise, ZeroTargetGivesZeroPattern) {
  Philox rng(7, 0);
  const Pattern p = oracle::random_pattern(rng, 10);
  EXPECT_TRUE(make_generic_noise(p, GenericNoiseMode::RandomAtoms, 5, 0.0, 1).is_zero());
  EXPECT_TRUE(make_generic_noise(p, GenericNoiseMode::CorrelatedSubset, 5, 0.0, 1).is_zero());
}

TEST(GenericNoise, FullSubsetIsARescaledCopy) {
  Philox rng(8, 0);
  const Pattern p = oracle::random_pattern(rng, 10);
  const Pattern z = make_generic_noise(p, GenericNoiseMode::CorrelatedSubset, 10, pattern_norm(p), 3);
  // Same atoms in some order; the whole pattern is preserved.
  EXPECT_NEAR(pattern_distance(p, z, Vec2::Zero()), 0.0, 1e-10 * pattern_inner_product(p, p));
  auto key = [](const Atom& a) { return std::make_pair(a.tau.x(), a.tau.y()); };
  std::vector<std::pair<double, double>> kp, kz;
  for (const auto& a : p) kp.push_back(key(a));
  for (const auto& a : z) kz.push_back(key(a));
  std::sort(kp.begin(), kp.end());
  std::sort(kz.begin(), kz.end());
  EXPECT_EQ(kp, kz);
}

TEST(GenericNoise, SubsetLargerThanPatternThrows) {
  Philox rng(9, 0);
  const Pattern p = oracle::random_pattern(rng, 4);
  EXPECT_THROW(make_generic_noise(p, GenericNoiseMode::CorrelatedSubset, 5, 1.0, 1), std::invalid_argument);
}

TEST(GenericNoise, RandomAtomsCorrelateLess) {
  Philox rng(10, 0);
  std::vector<double> corr, rand;
  for (int i = 0; i < 20; ++i) {
    const Pattern p = oracle::random_pattern(rng, 20);
    const double nu = 0.1;
    const Pattern zc = make_generic_noise(p, GenericNoiseMode::CorrelatedSubset, 5, nu, i);
    const Pattern zr = make_generic_noise(p, GenericNoiseMode::RandomAtoms, 5, nu, i);
    const double norm = pattern_norm(p) * nu;
    corr.push_back(correlation_bound(p, zc, 4.0) / norm);
    rand.push_back(correlation_bound(p, zr, 4.0) / norm);
  }
  std::sort(corr.begin(), corr.end());
  std::sort(rand.begin(), rand.end());
  EXPECT_LT(rand[10], corr[10]);
}

TEST(GenericNoise, ModeNames) {
  EXPECT_EQ(generic_noise_mode_from_string("correlated-subset"), GenericNoiseMode::CorrelatedSubset);
  EXPECT_EQ(generic_noise_mode_from_string("random-atoms"), GenericNoiseMode::RandomAtoms);
  EXPECT_THROW(generic_noise_mode_from_string("other"), std::invalid_argument);
}

TEST(SmoothedNoise, FormulaValues) {
  const NoiseSpec n = spec(750, 0.1, 1.0);
  const NoiseSpec s = smoothed_noise_params(n, 1.0);
  EXPECT_NEAR(s.epsilon, std::sqrt(1.01), 1e-15);
  EXPECT_NEAR(s.epsilon, 1.004988, 1e-6);
  EXPECT_NEAR(s.eta, 0.01 / 1.01, 1e-15);
  EXPECT_NEAR(s.eta, 0.009901, 1e-6);
  EXPECT_EQ(s.L, 750);
  const NoiseSpec z = smoothed_noise_params(n, 0.0);
  EXPECT_EQ(z.epsilon, n.epsilon);
  EXPECT_EQ(z.eta, n.eta);
}

TEST(SmoothedNoise, ConsistentWithSmoothingTheField) {
  const NoiseSpec n = spec(20, 0.1, 0.5);
  const NoiseDraw d = sample_gaussian_field(n, 13);
  const double rho = 0.7;
  const NoiseSpec s = smoothed_noise_params(n, rho);
  const Pattern w = smooth_pattern(d.pattern, rho);
  for (std::size_t i = 0; i < w.size(); ++i) {
    EXPECT_NEAR(w[i].sigma.x(), s.epsilon, 1e-15);
    EXPECT_NEAR(w[i].sigma.y(), s.epsilon, 1e-15);
    EXPECT_NEAR(w[i].coeff, d.pattern[i].coeff * s.eta / n.eta, 1e-15);
  }
}

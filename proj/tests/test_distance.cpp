#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "atomreg/distance.hpp"
#include "oracles.hpp"

using namespace atomreg;

namespace {

constexpr double kPi = std::numbers::pi;

Pattern unit_pattern() { return Pattern({Atom::make(1.0, 0.0, Vec2::Zero(), Vec2(1, 1))}); }

}  // namespace

TEST(Translation, ValidatesDirection) {
  EXPECT_THROW(Translation::make(1.0, Vec2(1.0, 1.0)), std::invalid_argument);
  EXPECT_THROW(Translation::make(-1.0, Vec2(1.0, 0.0)), std::invalid_argument);
  const Translation t = Translation::from_angle(2.0, kPi / 2);
  EXPECT_NEAR(t.vector().x(), 0.0, 1e-15);
  EXPECT_NEAR(t.vector().y(), 2.0, 1e-15);
}

TEST(PairTerms, UnitAtomsAtSameCentre) {
  const Atom a = Atom::make(1.0, 0.0, Vec2::Zero(), Vec2(1, 1));
  for (double ang : {0.0, 0.7, 2.0}) {
    const PairTerms t = pair_terms(a, a, Vec2(std::cos(ang), std::sin(ang)));
    EXPECT_NEAR(t.a_jk, 0.5, 1e-15);
    EXPECT_NEAR(t.b_jk, 0.0, 1e-15);
    EXPECT_NEAR(t.c_jk, 0.0, 1e-15);
    EXPECT_NEAR(t.q_jk, kPi, 1e-14);
  }
}

TEST(PairTerms, ShiftedUnitAtoms) {
  const Atom a = Atom::make(1.0, 0.0, Vec2::Zero(), Vec2(1, 1));
  const Atom b = Atom::make(1.0, 0.0, Vec2(2.0, 0.0), Vec2(1, 1));
  const PairTerms t = pair_terms(a, b, Vec2(1.0, 0.0));
  EXPECT_NEAR(t.a_jk, 0.5, 1e-15);
  EXPECT_NEAR(t.b_jk, 1.0, 1e-15);
  EXPECT_NEAR(t.c_jk, 2.0, 1e-15);
  EXPECT_NEAR(t.q_jk, kPi * std::exp(-2.0), 1e-14);
}

TEST(PairTerms, MatchesDirectMatrixEvaluation) {
  Philox rng(31, 0);
  for (int i = 0; i < 20; ++i) {
    const Atom j = oracle::random_atom(rng);
    const Atom k = oracle::random_atom(rng);
    const double ang = rng.uniform(0, 2 * kPi);
    const Vec2 T(std::cos(ang), std::sin(ang));
    auto cov = [](const Atom& a) {
      const double c = std::cos(a.psi), s = std::sin(a.psi);
      Mat2 r;
      r << c, -s, s, c;
      Mat2 d = Mat2::Zero();
      d(0, 0) = a.sigma.x() * a.sigma.x();
      d(1, 1) = a.sigma.y() * a.sigma.y();
      return Mat2(r * d * r.transpose());
    };
    const Mat2 S = 0.5 * (cov(j) + cov(k));
    const Mat2 Si = S.inverse();
    const Vec2 d = k.tau - j.tau;
    const PairTerms t = pair_terms(j, k, T);
    EXPECT_NEAR(t.a_jk, 0.5 * T.dot(Si * T), 1e-12);
    EXPECT_NEAR(t.b_jk, 0.5 * T.dot(Si * d), 1e-12);
    EXPECT_NEAR(t.c_jk, 0.5 * d.dot(Si * d), 1e-11);
    const double q = kPi * j.sigma.prod() * k.sigma.prod() * std::exp(-0.5 * d.dot(Si * d)) / std::sqrt(S.determinant());
    EXPECT_NEAR(t.q_jk, q, 1e-12 * std::max(1.0, q));
    EXPECT_GT(t.a_jk, 0.0);
    EXPECT_GE(t.c_jk, 0.0);
  }
}

TEST(PairTerms, DirectionSymmetry) {
  Philox rng(32, 0);
  for (int i = 0; i < 20; ++i) {
    const Atom j = oracle::random_atom(rng);
    const Atom k = oracle::random_atom(rng);
    const double ang = rng.uniform(0, 2 * kPi);
    const Vec2 T(std::cos(ang), std::sin(ang));
    const PairTerms p = pair_terms(j, k, T);
    const PairTerms m = pair_terms(j, k, -T);
    EXPECT_NEAR(p.a_jk, m.a_jk, 1e-14);
    EXPECT_NEAR(p.b_jk, -m.b_jk, 1e-14);
  }
}

TEST(PairTerms, NearSingularCovarianceFails) {
  const Atom j = Atom::make(1.0, 0.0, Vec2::Zero(), Vec2(1e-9, 1.0));
  EXPECT_THROW(pair_terms(j, j, Vec2(1.0, 0.0)), NumericError);
}

TEST(PatternDistance, UnitAtom) {
  const Pattern p = unit_pattern();
  EXPECT_EQ(pattern_distance(p, p, Vec2::Zero()), 0.0);
  EXPECT_NEAR(pattern_distance(p, p, Vec2(2.0, 0.0)), kPi * (1.0 - std::exp(-2.0)), 1e-14);
  EXPECT_NEAR(pattern_distance(p, p, Translation::from_angle(2.0, 1.1)), kPi * (1.0 - std::exp(-2.0)), 1e-13);
}

TEST(PatternDistance, SymmetricInTranslation) {
  Philox rng(33, 0);
  const Pattern p = oracle::random_pattern(rng, 10);
  for (int i = 0; i < 10; ++i) {
    const Vec2 u(rng.uniform(-3, 3), rng.uniform(-3, 3));
    EXPECT_NEAR(pattern_distance(p, p, u), pattern_distance(p, p, Vec2(-u)), 1e-12);
  }
}

TEST(PatternDistance, ApproachesTwiceTheEnergyFarAway) {
  Philox rng(34, 0);
  const Pattern p = oracle::random_pattern(rng, 10);
  const double far = 50.0 * (p.center_radius() + p.max_sigma());
  const double n2 = pattern_inner_product(p, p);
  EXPECT_LT(oracle::rel_err(pattern_distance(p, p, Vec2(far, 0.3 * far)), 2 * n2), 1e-6);
}

TEST(PatternDistance, ExpansionIdentity) {
  Philox rng(35, 0);
  const Pattern p = oracle::random_pattern(rng, 10);
  for (int i = 0; i < 10; ++i) {
    const Vec2 u(rng.uniform(-3, 3), rng.uniform(-3, 3));
    const double expansion = 2 * pattern_inner_product(p, p) - 2 * pattern_inner_product(p, translate_pattern(p, u));
    EXPECT_NEAR(pattern_distance(p, p, u), expansion, 1e-10);
  }
}

TEST(PatternDistance, TwoPatternsMatchQuadrature) {
  Philox rng(36, 0);
  const Pattern p = oracle::random_pattern(rng, 3);
  const Pattern q = oracle::random_pattern(rng, 3);
  const Vec2 u(0.7, -1.2);
  const Pattern qu = translate_pattern(q, u);
  const oracle::Box b = oracle::support_box({&p, &qu});
  const double want = oracle::integrate2d(
      [&](double x, double y) {
        const double d = oracle::pattern_value(p, x, y) - oracle::pattern_value(qu, x, y);
        return d * d;
      },
      b.x0, b.x1, b.y0, b.y1);
  EXPECT_LT(oracle::rel_err(pattern_distance(p, q, u), want), 1e-8);
}

TEST(PatternDistance, SelfDistanceMatchesQuadrature) {
  Philox rng(37, 0);
  const Pattern p = oracle::random_pattern(rng, 3);
  const Vec2 u(1.3, 0.4);
  EXPECT_LT(oracle::rel_err(pattern_distance(p, p, u), oracle::self_distance(p, u)), 1e-8);
}

TEST(DistanceDerivative, UnitAtom) {
  const Pattern p = unit_pattern();
  EXPECT_EQ(distance_derivative(p, Translation::make(0.0, Vec2(1, 0))), 0.0);
  EXPECT_NEAR(distance_derivative(p, Translation::make(1.0, Vec2(0, 1))), kPi * std::exp(-0.5), 1e-14);
  EXPECT_NEAR(distance_derivative(p, Translation::make(1.0, Vec2(0, 1))), 1.90547, 1e-5);
}

TEST(DistanceDerivative, RandomPatternMatchesCentralDifference) {
  Philox rng(38, 0);
  for (int i = 0; i < 10; ++i) {
    const Pattern p = oracle::random_pattern(rng, 20);
    const double t = rng.uniform(0.2, 3.0);
    const double ang = rng.uniform(0, 2 * kPi);
    const Vec2 T(std::cos(ang), std::sin(ang));
    auto f = [&](double s) { return pattern_distance(p, p, Vec2(s * T)); };
    const double fd = oracle::central_diff(f, t, 1e-5);
    EXPECT_LT(oracle::rel_err(distance_derivative(p, Translation::make(t, T)), fd), 1e-5) << i;
  }
}

TEST(DistanceDerivative, SameForOppositeDirections) {
  Philox rng(39, 0);
  const Pattern p = oracle::random_pattern(rng, 12);
  for (int i = 0; i < 10; ++i) {
    const double t = rng.uniform(0.1, 4.0);
    const double ang = rng.uniform(0, 2 * kPi);
    const Vec2 T(std::cos(ang), std::sin(ang));
    EXPECT_NEAR(distance_derivative(p, Translation::make(t, T)), distance_derivative(p, Translation::make(t, -T)),
                1e-12);
  }
}

TEST(DistanceSecondDerivative, UnitAtom) {
  const Pattern p = unit_pattern();
  EXPECT_NEAR(distance_second_derivative(p, Translation::make(0.0, Vec2(1, 0))), kPi, 1e-14);
  EXPECT_NEAR(distance_second_derivative(p, Translation::make(1.0, Vec2(1, 0))), 0.0, 1e-14);
}

TEST(DistanceSecondDerivative, RandomPatternMatchesSecondDifference) {
  Philox rng(40, 0);
  for (int i = 0; i < 10; ++i) {
    const Pattern p = oracle::random_pattern(rng, 20);
    const double t = rng.uniform(0.2, 3.0);
    const double ang = rng.uniform(0, 2 * kPi);
    const Vec2 T(std::cos(ang), std::sin(ang));
    auto f = [&](double s) { return pattern_distance(p, p, Vec2(s * T)); };
    const double fd = oracle::second_diff(f, t, 1e-3);
    EXPECT_LT(oracle::rel_err(distance_second_derivative(p, Translation::make(t, T)), fd), 1e-4) << i;
  }
}

// The pair term e^{-(a t^2 + 2 b t)} (a t + b) has derivative
// e^{...} (a - 2 (a t + b)^2), which changes sign at (+-sqrt(a/2) - b) / a.
TEST(DistanceDerivative, PairTermExtremaLocations) {
  Philox rng(41, 0);
  for (int i = 0; i < 10; ++i) {
    const Atom j = oracle::random_atom(rng);
    const Atom k = oracle::random_atom(rng);
    const PairTerms pt = pair_terms(j, k, Vec2(1.0, 0.0));
    const double a = pt.a_jk;
    const double b = pt.b_jk;
    auto term = [&](double t) { return std::exp(-(a * t * t + 2 * b * t)) * (a * t + b); };
    for (double mu : {(-std::sqrt(a / 2) - b) / a, (std::sqrt(a / 2) - b) / a}) {
      const double h = 1e-4 / std::sqrt(a);
      const double left = oracle::central_diff(term, mu - 10 * h, h);
      const double right = oracle::central_diff(term, mu + 10 * h, h);
      EXPECT_LT(left * right, 0.0);
    }
  }
}

TEST(CrossTable, DistanceMatchesPatternDistance) {
  Philox rng(42, 0);
  const Pattern p = oracle::random_pattern(rng, 6);
  const Pattern q = oracle::random_pattern(rng, 6);
  const CrossTable ct(p, q);
  for (int i = 0; i < 10; ++i) {
    const Vec2 u(rng.uniform(-3, 3), rng.uniform(-3, 3));
    const double want = pattern_inner_product(p, p) + pattern_inner_product(q, q) -
                        2 * pattern_inner_product(p, translate_pattern(q, u));
    EXPECT_NEAR(ct.distance(u), std::max(0.0, want), 1e-11);
    EXPECT_NEAR(pattern_distance(p, q, u), std::max(0.0, want), 1e-11);
  }
}

TEST(CrossTable, JetMatchesFiniteDifferences) {
  Philox rng(43, 0);
  const Pattern p = oracle::random_pattern(rng, 6);
  const Pattern q = oracle::random_pattern(rng, 6);
  const CrossTable ct(p, q);
  const double h = 1e-4;
  for (int i = 0; i < 5; ++i) {
    const Vec2 u(rng.uniform(-2, 2), rng.uniform(-2, 2));
    const CrossTable::Jet j = ct.correlation_jet(u);
    EXPECT_NEAR(j.value, ct.correlation(u), 1e-13);
    const Vec2 ex(h, 0), ey(0, h);
    const Vec2 g((ct.correlation(u + ex) - ct.correlation(u - ex)) / (2 * h),
                 (ct.correlation(u + ey) - ct.correlation(u - ey)) / (2 * h));
    EXPECT_NEAR((j.gradient - g).norm(), 0.0, 1e-7);
    EXPECT_NEAR((ct.correlation_gradient(u) - g).norm(), 0.0, 1e-7);
    const double hxx = (ct.correlation(u + ex) - 2 * ct.correlation(u) + ct.correlation(u - ex)) / (h * h);
    const double hxy = (ct.correlation(u + ex + ey) - ct.correlation(u + ex - ey) - ct.correlation(u - ex + ey) +
                        ct.correlation(u - ex - ey)) /
                       (4 * h * h);
    EXPECT_NEAR(j.hessian(0, 0), hxx, 1e-5);
    EXPECT_NEAR(j.hessian(0, 1), hxy, 1e-5);
    EXPECT_NEAR(j.hessian(1, 0), hxy, 1e-5);
  }
}

TEST(DirectionalDerivative, MatchesFiniteDifference) {
  Philox rng(44, 0);
  const Pattern p = oracle::random_pattern(rng, 6);
  const Pattern q = oracle::random_pattern(rng, 6);
  const Vec2 u(0.5, -0.25);
  const Vec2 T = Vec2(3, 4) / 5.0;
  const double h = 1e-5;
  const double fd = (pattern_distance(p, q, Vec2(u + h * T)) - pattern_distance(p, q, Vec2(u - h * T))) / (2 * h);
  EXPECT_NEAR(directional_derivative(p, q, u, T), fd, 1e-6 * std::max(1.0, std::abs(fd)));
}

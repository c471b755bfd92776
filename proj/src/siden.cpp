#include "atomreg/siden.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace atomreg {

AlphaCoefficients alpha_coefficients(const DirectionalProfile& profile) {
  AlphaCoefficients out;
  double a4 = 0.0;
  for (const auto& e : profile.entries()) {
    const double q = e.weight * e.kq * safe_exp(-e.c);
    const double b2 = e.b * e.b;
    out.alpha1 += q * (2.0 * e.a - 4.0 * b2);
    out.alpha3 += q * (-8.0 / 3.0 * b2 * b2 + 8.0 * b2 * e.a - 2.0 * e.a * e.a);
    a4 += e.weight * e.abs_kq * safe_exp(b2 / e.a - e.c) * std::pow(e.a, 2.5);
  }
  out.alpha4 = -1.37 * a4;
  return out;
}

AlphaCoefficients alpha_coefficients(const Pattern& p, const Vec2& T) {
  return alpha_coefficients(DirectionalProfile(p, T));
}

double cubic_root_bound(const AlphaCoefficients& alpha) {
  if (!(alpha.alpha1 > 0.0)) return 0.0;
  const double a4 = std::abs(alpha.alpha4);
  auto poly = [&](double t) { return (a4 * t - alpha.alpha3) * t * t - alpha.alpha1; };
  if (a4 == 0.0) {
    // Degenerate quadratic; only positive when alpha3 < 0.
    if (alpha.alpha3 < 0.0) return std::sqrt(alpha.alpha1 / -alpha.alpha3);
    return 0.0;
  }
  double hi = 1.0;
  while (poly(hi) <= 0.0) hi *= 2.0;
  double lo = 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (poly(mid) > 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double delta_T(const Pattern& p, const Vec2& T) { return cubic_root_bound(alpha_coefficients(p, T)); }

double SidenEstimate::min_delta() const {
  if (delta.empty()) return 0.0;
  return *std::min_element(delta.begin(), delta.end());
}

SidenEstimate siden_boundary(const Pattern& p, int n_directions, double rho) {
  if (n_directions < 4 || n_directions % 2 != 0) {
    throw std::invalid_argument("direction count must be even and at least 4");
  }
  const Pattern ps = rho > 0.0 ? smooth_pattern(p, rho) : p;
  const auto pairs = self_pairs(ps);
  const int half = n_directions / 2;
  SidenEstimate est;
  est.rho = rho;
  est.directions.resize(n_directions);
  est.delta.resize(n_directions);
  for (int i = 0; i < half; ++i) {
    const double theta = std::numbers::pi * i / half;
    const Vec2 T(std::cos(theta), std::sin(theta));
    const auto alpha = alpha_coefficients(DirectionalProfile(pairs, T));
    const double d = cubic_root_bound(alpha);
    if (!(alpha.alpha1 > 0.0)) est.degenerate += 2;
    est.directions[i] = T;
    est.directions[i + half] = -T;
    est.delta[i] = d;
    est.delta[i + half] = d;
  }
  return est;
}

double siden_area(const SidenEstimate& est) {
  const std::size_t n = est.delta.size();
  if (n < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = est.delta[i] * est.directions[i];
    const Vec2 b = est.delta[(i + 1) % n] * est.directions[(i + 1) % n];
    twice += a.x() * b.y() - a.y() * b.x();
  }
  return std::abs(0.5 * twice);
}

std::optional<double> true_siden_boundary(const DirectionalProfile& profile, double t_max) {
  if (!(t_max > 0.0)) throw std::invalid_argument("t_max must be positive");
  constexpr int kSteps = 2000;
  const double step = t_max / kSteps;
  double prev_t = 0.0;
  for (int i = 1; i <= kSteps; ++i) {
    const double t = step * i;
    if (profile.derivative(t) <= 0.0) {
      double lo = prev_t;
      double hi = t;
      while (hi - lo > 1e-8) {
        const double mid = 0.5 * (lo + hi);
        if (profile.derivative(mid) <= 0.0) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
      return hi;
    }
    prev_t = t;
  }
  return std::nullopt;
}

std::optional<double> true_siden_boundary(const Pattern& p, const Vec2& T, double t_max) {
  return true_siden_boundary(DirectionalProfile(p, T), t_max);
}

}  // namespace atomreg

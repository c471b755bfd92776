#pragma once

#include <optional>
#include <vector>

#include "atomreg/distance.hpp"

namespace atomreg {

struct AlphaCoefficients {
  double alpha1 = 0.0;
  double alpha3 = 0.0;
  double alpha4 = 0.0;
};

/// Taylor constants of f' along T:
///   alpha1 = sum c_j c_k Q (2a - 4b^2)
///   alpha3 = sum c_j c_k Q (-8/3 b^4 + 8 b^2 a - 2 a^2)
///   alpha4 = -1.37 sum |c_j c_k| Q exp(b^2/a) a^{5/2}
AlphaCoefficients alpha_coefficients(const Pattern& p, const Vec2& T);
AlphaCoefficients alpha_coefficients(const DirectionalProfile& profile);

/// Positive root of |alpha4| t^3 - alpha3 t^2 - alpha1, or 0 when alpha1 <= 0.
double cubic_root_bound(const AlphaCoefficients& alpha);
double delta_T(const Pattern& p, const Vec2& T);

struct SidenEstimate {
  std::vector<Vec2> directions;
  std::vector<double> delta;
  double rho = 0.0;
  /// Number of sampled directions where alpha1 <= 0 forced delta = 0.
  int degenerate = 0;

  double min_delta() const;
};

/// delta_T on n/2 uniform angles in [0, pi), mirrored onto [pi, 2pi).
/// The pattern is smoothed by rho first when rho > 0.
SidenEstimate siden_boundary(const Pattern& p, int n_directions, double rho = 0.0);

/// Shoelace area of the sampled boundary polygon.
double siden_area(const SidenEstimate& est);

/// First t in (0, t_max] where f'(tT) drops to <= 0, located by a scan with
/// step t_max/2000 refined by bisection to 1e-8.
std::optional<double> true_siden_boundary(const Pattern& p, const Vec2& T, double t_max);
std::optional<double> true_siden_boundary(const DirectionalProfile& profile, double t_max);

}  // namespace atomreg

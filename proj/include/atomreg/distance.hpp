#pragma once

#include <vector>

#include "atomreg/atoms.hpp"

namespace atomreg {

/// Translation tT with magnitude t >= 0 and unit direction T.
struct Translation {
  double t = 0.0;
  Vec2 T = Vec2(1.0, 0.0);

  static Translation make(double t, const Vec2& T);
  static Translation from_angle(double t, double theta);
  Vec2 vector() const { return t * T; }
};

/// Per atom pair constants along a direction T.
struct PairTerms {
  Mat2 sigma_jk = Mat2::Identity();
  double a_jk = 0.0;
  double b_jk = 0.0;
  double c_jk = 0.0;
  double q_jk = 0.0;
  Vec2 direction = Vec2(1.0, 0.0);
};

/// Sigma_jk = (Psi_j sigma_j^2 Psi_j^T + Psi_k sigma_k^2 Psi_k^T) / 2 and the
/// derived a, b, c, Q. Throws NumericError when Sigma_jk is near singular.
PairTerms pair_terms(const Atom& j, const Atom& k, const Vec2& T);

/// Direction independent data of an atom pair (j, k).
struct PairData {
  Mat2 sigma_inv;    // Sigma_jk^-1
  Vec2 dtau;         // tau_k - tau_j
  double c = 0.0;    // dtau^T Sigma^-1 dtau / 2
  double kq = 0.0;   // c_j c_k pi |sigma_j sigma_k| / sqrt|Sigma|  (Q without exp(-c))
  double abs_kq = 0.0;
  double weight = 1.0;  // 1 on the diagonal, 2 for folded off-diagonal pairs
  int j = 0;
  int k = 0;
};

/// Folded pair list (j <= k) of a single pattern; every directional quantity
/// of the self distance f is symmetric under j <-> k.
std::vector<PairData> self_pairs(const Pattern& p);

/// Pair constants of p restricted to one direction T, ready for repeated
/// evaluation of f, f' and f'' along the ray tT.
class DirectionalProfile {
 public:
  struct Entry {
    double a, b, c, kq, abs_kq, weight;
  };

  DirectionalProfile(const std::vector<PairData>& pairs, const Vec2& T);
  DirectionalProfile(const Pattern& p, const Vec2& T) : DirectionalProfile(self_pairs(p), T) {}

  double value(double t) const;
  double derivative(double t) const;
  double second_derivative(double t) const;
  const std::vector<Entry>& entries() const { return entries_; }

 private:
  std::vector<Entry> entries_;
};

/// Cached pair data for u -> <x, y(. - u)>, used for distances between two
/// different patterns at many translations.
class CrossTable {
 public:
  CrossTable(const Pattern& x, const Pattern& y);

  /// <x, y(. - u)>.
  double correlation(const Vec2& u) const;
  /// Gradient of correlation() with respect to u.
  Vec2 correlation_gradient(const Vec2& u) const;
  /// Value, gradient and Hessian of correlation() in one pass.
  struct Jet {
    double value = 0.0;
    Vec2 gradient = Vec2::Zero();
    Mat2 hessian = Mat2::Zero();
  };
  Jet correlation_jet(const Vec2& u) const;
  /// ||x - y(. - u)||^2, clamped at 0.
  double distance(const Vec2& u) const;
  /// Gradient of distance() with respect to u.
  Vec2 distance_gradient(const Vec2& u) const;
  double norm_x_sq() const { return nx_; }
  double norm_y_sq() const { return ny_; }

 private:
  struct Entry {
    Mat2 sigma_inv;
    Vec2 dtau;  // tau_y - tau_x
    double amp;
  };
  std::vector<Entry> entries_;
  double nx_ = 0.0;
  double ny_ = 0.0;
};

/// ||p - q(. - u)||^2. Exactly 0 when q equals p and u = 0.
double pattern_distance(const Pattern& p, const Pattern& q, const Translation& u);
double pattern_distance(const Pattern& p, const Pattern& q, const Vec2& u);

/// d/dt f(tT) with f(tT) = ||p - p(. - tT)||^2.
double distance_derivative(const Pattern& p, const Translation& u);
/// d^2/dt^2 f(tT).
double distance_second_derivative(const Pattern& p, const Translation& u);

/// Derivative of pattern_distance(p, q, u + sT) with respect to s at s = 0.
double directional_derivative(const Pattern& p, const Pattern& q, const Vec2& u, const Vec2& T);

}  // namespace atomreg

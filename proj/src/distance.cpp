#include "atomreg/distance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace atomreg {

namespace {

constexpr double kPi = std::numbers::pi;

void require_unit(const Vec2& T) {
  if (std::abs(T.norm() - 1.0) > 1e-12) {
    std::ostringstream msg;
    msg << "direction must be a unit vector, got norm " << T.norm();
    throw std::invalid_argument(msg.str());
  }
}

Mat2 pair_covariance(const Atom& j, const Atom& k) {
  return 0.5 * (j.covariance() + k.covariance());
}

Mat2 checked_inverse(const Mat2& sigma) {
  Eigen::SelfAdjointEigenSolver<Mat2> es(sigma);
  const double lo = es.eigenvalues()(0);
  const double hi = es.eigenvalues()(1);
  if (!(lo > 0.0) || hi / lo > 1e14) {
    std::ostringstream msg;
    msg << "pair covariance is numerically singular (condition number " << (lo > 0.0 ? hi / lo : INFINITY) << ")";
    throw NumericError(msg.str());
  }
  return sigma.inverse();
}

double quad(const Mat2& m, const Vec2& v) { return v.dot(m * v); }

}  // namespace

Translation Translation::make(double t, const Vec2& T) {
  if (!(t >= 0.0)) throw std::invalid_argument("translation magnitude must be nonnegative");
  require_unit(T);
  return {t, T};
}

Translation Translation::from_angle(double t, double theta) {
  return make(t, Vec2(std::cos(theta), std::sin(theta)));
}

PairTerms pair_terms(const Atom& j, const Atom& k, const Vec2& T) {
  require_unit(T);
  PairTerms out;
  out.sigma_jk = pair_covariance(j, k);
  const Mat2 inv = checked_inverse(out.sigma_jk);
  const Vec2 d = k.tau - j.tau;
  out.a_jk = 0.5 * quad(inv, T);
  out.b_jk = 0.5 * T.dot(inv * d);
  out.c_jk = 0.5 * quad(inv, d);
  out.q_jk = kPi * j.scale_det() * k.scale_det() * safe_exp(-out.c_jk) / std::sqrt(out.sigma_jk.determinant());
  out.direction = T;
  return out;
}

std::vector<PairData> self_pairs(const Pattern& p) {
  std::vector<PairData> out;
  const int n = static_cast<int>(p.size());
  out.reserve(static_cast<std::size_t>(n) * (n + 1) / 2);
  for (int j = 0; j < n; ++j) {
    for (int k = j; k < n; ++k) {
      const Atom& aj = p[j];
      const Atom& ak = p[k];
      if (aj.coeff == 0.0 || ak.coeff == 0.0) continue;
      PairData d;
      const Mat2 sigma = pair_covariance(aj, ak);
      d.sigma_inv = checked_inverse(sigma);
      d.dtau = ak.tau - aj.tau;
      d.c = 0.5 * quad(d.sigma_inv, d.dtau);
      d.kq = aj.coeff * ak.coeff * kPi * aj.scale_det() * ak.scale_det() / std::sqrt(sigma.determinant());
      d.abs_kq = std::abs(d.kq);
      d.weight = (j == k) ? 1.0 : 2.0;
      d.j = j;
      d.k = k;
      out.push_back(d);
    }
  }
  return out;
}

DirectionalProfile::DirectionalProfile(const std::vector<PairData>& pairs, const Vec2& T) {
  require_unit(T);
  entries_.reserve(pairs.size());
  for (const auto& d : pairs) {
    const Vec2 st = d.sigma_inv * T;
    entries_.push_back({0.5 * T.dot(st), 0.5 * st.dot(d.dtau), d.c, d.kq, d.abs_kq, d.weight});
  }
}

double DirectionalProfile::value(double t) const {
  double sum = 0.0;
  for (const auto& e : entries_) {
    const double at2 = e.a * t * t;
    const double bt = 2.0 * e.b * t;
    const double term = 2.0 * safe_exp(-e.c) - safe_exp(-(e.c + at2 + bt)) - safe_exp(-(e.c + at2 - bt));
    sum += e.weight * 0.5 * e.kq * term;
  }
  return sum;
}

double DirectionalProfile::derivative(double t) const {
  double sum = 0.0;
  for (const auto& e : entries_) {
    const double at2 = e.a * t * t;
    const double bt = 2.0 * e.b * t;
    const double s = safe_exp(-(e.c + at2 + bt)) * (e.a * t + e.b) + safe_exp(-(e.c + at2 - bt)) * (e.a * t - e.b);
    sum += e.weight * e.kq * s;
  }
  return sum;
}

double DirectionalProfile::second_derivative(double t) const {
  double sum = 0.0;
  for (const auto& e : entries_) {
    const double at2 = e.a * t * t;
    const double bt = 2.0 * e.b * t;
    const double up = e.a * t + e.b;
    const double dn = e.a * t - e.b;
    const double s = safe_exp(-(e.c + at2 + bt)) * (e.a - 2.0 * up * up) +
                     safe_exp(-(e.c + at2 - bt)) * (e.a - 2.0 * dn * dn);
    sum += e.weight * e.kq * s;
  }
  return sum;
}

CrossTable::CrossTable(const Pattern& x, const Pattern& y) {
  entries_.reserve(x.size() * y.size());
  for (const auto& aj : x) {
    for (const auto& ak : y) {
      if (aj.coeff == 0.0 || ak.coeff == 0.0) continue;
      const Mat2 sigma = pair_covariance(aj, ak);
      Entry e;
      e.sigma_inv = checked_inverse(sigma);
      e.dtau = ak.tau - aj.tau;
      e.amp = aj.coeff * ak.coeff * 0.5 * kPi * aj.scale_det() * ak.scale_det() / std::sqrt(sigma.determinant());
      entries_.push_back(e);
    }
  }
  nx_ = pattern_inner_product(x, x);
  ny_ = pattern_inner_product(y, y);
}

double CrossTable::correlation(const Vec2& u) const {
  double sum = 0.0;
  for (const auto& e : entries_) {
    const Vec2 d = e.dtau + u;
    sum += e.amp * safe_exp(-0.5 * quad(e.sigma_inv, d));
  }
  return sum;
}

Vec2 CrossTable::correlation_gradient(const Vec2& u) const {
  Vec2 g = Vec2::Zero();
  for (const auto& e : entries_) {
    const Vec2 d = e.dtau + u;
    const Vec2 sd = e.sigma_inv * d;
    g -= e.amp * safe_exp(-0.5 * d.dot(sd)) * sd;
  }
  return g;
}

CrossTable::Jet CrossTable::correlation_jet(const Vec2& u) const {
  Jet j;
  for (const auto& e : entries_) {
    const Vec2 d = e.dtau + u;
    const Vec2 sd = e.sigma_inv * d;
    const double v = e.amp * safe_exp(-0.5 * d.dot(sd));
    j.value += v;
    j.gradient -= v * sd;
    j.hessian += v * (sd * sd.transpose() - e.sigma_inv);
  }
  return j;
}

double CrossTable::distance(const Vec2& u) const {
  return std::max(0.0, nx_ + ny_ - 2.0 * correlation(u));
}

Vec2 CrossTable::distance_gradient(const Vec2& u) const { return -2.0 * correlation_gradient(u); }

namespace {

bool same_atoms(const Pattern& p, const Pattern& q) {
  if (p.size() != q.size()) return false;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Atom& a = p[i];
    const Atom& b = q[i];
    if (a.coeff != b.coeff || a.psi != b.psi || a.tau != b.tau || a.sigma != b.sigma) return false;
  }
  return true;
}

}  // namespace

double pattern_distance(const Pattern& p, const Pattern& q, const Vec2& u) {
  if (same_atoms(p, q)) {
    // Self distance written as a sum of 2e^{-c} - e^{-(...)} - e^{-(...)}
    // terms, which vanishes exactly at u = 0.
    const double t = u.norm();
    if (t == 0.0) return 0.0;
    return std::max(0.0, DirectionalProfile(p, u / t).value(t));
  }
  return CrossTable(p, q).distance(u);
}

double pattern_distance(const Pattern& p, const Pattern& q, const Translation& u) {
  require_unit(u.T);
  return pattern_distance(p, q, u.vector());
}

double distance_derivative(const Pattern& p, const Translation& u) {
  if (u.t == 0.0) return 0.0;
  return DirectionalProfile(p, u.T).derivative(u.t);
}

double distance_second_derivative(const Pattern& p, const Translation& u) {
  return DirectionalProfile(p, u.T).second_derivative(u.t);
}

double directional_derivative(const Pattern& p, const Pattern& q, const Vec2& u, const Vec2& T) {
  require_unit(T);
  return CrossTable(p, q).distance_gradient(u).dot(T);
}

}  // namespace atomreg

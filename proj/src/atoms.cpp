#include "atomreg/atoms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace atomreg {

double safe_exp(double exponent) {
  if (exponent < -700.0) return 0.0;
  return std::exp(exponent);
}

Atom Atom::make(double coeff, double psi, const Vec2& tau, const Vec2& sigma) {
  if (!(sigma.x() > 0.0) || !(sigma.y() > 0.0)) {
    std::ostringstream msg;
    msg << "atom scales must be positive, got (" << sigma.x() << ", " << sigma.y() << ")";
    throw std::invalid_argument(msg.str());
  }
  if (!std::isfinite(coeff) || !std::isfinite(psi) || !tau.allFinite()) {
    throw std::invalid_argument("atom parameters must be finite");
  }
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double reduced = std::fmod(psi, two_pi);
  if (reduced < 0.0) reduced += two_pi;
  if (reduced >= two_pi) reduced = 0.0;
  Atom a;
  a.coeff = coeff;
  a.psi = reduced;
  a.tau = tau;
  a.sigma = sigma;
  return a;
}

Mat2 Atom::rotation() const {
  const double c = std::cos(psi);
  const double s = std::sin(psi);
  Mat2 r;
  r << c, -s, s, c;
  return r;
}

Mat2 Atom::covariance() const {
  const Mat2 r = rotation();
  const Vec2 s2 = sigma.cwiseProduct(sigma);
  return r * s2.asDiagonal() * r.transpose();
}

double Atom::value_at(const Vec2& x) const {
  const Vec2 local = rotation().transpose() * (x - tau);
  const double ux = local.x() / sigma.x();
  const double uy = local.y() / sigma.y();
  return coeff * safe_exp(-(ux * ux + uy * uy));
}

Pattern::Pattern(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw std::invalid_argument("a pattern needs at least one atom");
}

bool Pattern::is_zero() const {
  return std::all_of(atoms_.begin(), atoms_.end(), [](const Atom& a) { return a.coeff == 0.0; });
}

double Pattern::value_at(const Vec2& x) const {
  double v = 0.0;
  for (const auto& a : atoms_) v += a.value_at(x);
  return v;
}

double Pattern::max_sigma() const {
  double m = 0.0;
  for (const auto& a : atoms_) m = std::max({m, a.sigma.x(), a.sigma.y()});
  return m;
}

double Pattern::center_radius() const {
  double m = 0.0;
  for (const auto& a : atoms_) m = std::max(m, a.tau.norm());
  return m;
}

Pattern add_patterns(const Pattern& p, const Pattern& q) {
  std::vector<Atom> atoms(p.begin(), p.end());
  atoms.insert(atoms.end(), q.begin(), q.end());
  return Pattern(std::move(atoms));
}

Pattern scale_pattern(const Pattern& p, double s) {
  std::vector<Atom> atoms(p.begin(), p.end());
  for (auto& a : atoms) a.coeff *= s;
  return Pattern(std::move(atoms));
}

RasterImage::RasterImage(int w, int h, double ext) : width(w), height(h), extent(ext) {
  if (w <= 0 || h <= 0) throw std::invalid_argument("raster dimensions must be positive");
  if (!(ext > 0.0)) throw std::invalid_argument("raster extent must be positive");
  pixels.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0.0);
}

Vec2 RasterImage::pixel_center(int row, int col) const {
  const double x = -extent + (col + 0.5) * pixel_width();
  const double y = extent - (row + 0.5) * pixel_height();
  return {x, y};
}

void RasterImage::validate() const {
  if (width <= 0 || height <= 0) throw std::invalid_argument("raster dimensions must be positive");
  if (!(extent > 0.0)) throw std::invalid_argument("raster extent must be positive");
  if (pixels.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw std::invalid_argument("raster pixel count does not match width x height");
  }
}

double atom_inner_product(const Atom& a, const Atom& b) {
  if (a.coeff == 0.0 || b.coeff == 0.0) return 0.0;
  const Mat2 sigma = 0.5 * (a.covariance() + b.covariance());
  const double det = sigma.determinant();
  const Vec2 d = b.tau - a.tau;
  const double c = 0.5 * d.dot(sigma.ldlt().solve(d));
  const double q = std::numbers::pi * (a.scale_det() * b.scale_det()) / std::sqrt(det);
  return (a.coeff * b.coeff) * 0.5 * q * safe_exp(-c);
}

double pattern_inner_product(const Pattern& p, const Pattern& q) {
  double sum = 0.0;
  for (const auto& a : p) {
    for (const auto& b : q) sum += atom_inner_product(a, b);
  }
  return sum;
}

double pattern_norm(const Pattern& p) {
  return std::sqrt(std::max(0.0, pattern_inner_product(p, p)));
}

Pattern smooth_pattern(const Pattern& p, double rho) {
  if (!(rho >= 0.0)) throw std::invalid_argument("filter size must be nonnegative");
  if (rho == 0.0) return p;
  std::vector<Atom> atoms(p.begin(), p.end());
  const double r2 = rho * rho;
  for (auto& a : atoms) {
    const double sx2 = a.sigma.x() * a.sigma.x() + r2;
    const double sy2 = a.sigma.y() * a.sigma.y() + r2;
    a.coeff *= a.sigma.x() * a.sigma.y() / std::sqrt(sx2 * sy2);
    a.sigma = Vec2(std::sqrt(sx2), std::sqrt(sy2));
  }
  return Pattern(std::move(atoms));
}

Pattern translate_pattern(const Pattern& p, const Vec2& u) {
  std::vector<Atom> atoms(p.begin(), p.end());
  for (auto& a : atoms) a.tau += u;
  return Pattern(std::move(atoms));
}

RasterImage evaluate_pattern(const Pattern& p, const RasterShape& grid) {
  RasterImage img(grid);
  for (int r = 0; r < img.height; ++r) {
    for (int c = 0; c < img.width; ++c) img.at(r, c) = p.value_at(img.pixel_center(r, c));
  }
  return img;
}

}  // namespace atomreg

#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/LU>

namespace atomreg {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Raised when a numeric precondition fails at run time (singular matrix,
/// non positive definite curvature, etc.).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// exp() that returns exactly 0 for exponents below -700.
double safe_exp(double exponent);

/// One Gaussian atom c * phi(sigma^-1 Psi^-1 (X - tau)) with phi(X) = exp(-|X|^2).
struct Atom {
  double coeff = 0.0;
  double psi = 0.0;                  // rotation, radians in [0, 2pi)
  Vec2 tau = Vec2::Zero();           // translation
  Vec2 sigma = Vec2::Ones();         // per-axis scale in the atom frame

  /// Validating constructor; reduces psi into [0, 2pi).
  static Atom make(double coeff, double psi, const Vec2& tau, const Vec2& sigma);

  Mat2 rotation() const;
  /// Psi sigma^2 Psi^T.
  Mat2 covariance() const;
  /// |sigma| = sigma_x * sigma_y.
  double scale_det() const { return sigma.x() * sigma.y(); }
  double value_at(const Vec2& x) const;
};

/// Finite weighted sum of atoms. Holds at least one atom; zero coefficients are
/// allowed so that noise-free and zero patterns stay representable.
class Pattern {
 public:
  Pattern() = default;
  explicit Pattern(std::vector<Atom> atoms);

  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }
  const Atom& operator[](std::size_t i) const { return atoms_[i]; }
  std::span<const Atom> atoms() const { return atoms_; }
  auto begin() const { return atoms_.begin(); }
  auto end() const { return atoms_.end(); }

  bool is_zero() const;
  double value_at(const Vec2& x) const;
  /// Largest atom scale (max over sigma_x, sigma_y).
  double max_sigma() const;
  /// Radius of the smallest origin-centred disc containing every atom centre.
  double center_radius() const;

 private:
  std::vector<Atom> atoms_;
};

/// Concatenation p + q.
Pattern add_patterns(const Pattern& p, const Pattern& q);
/// s * p.
Pattern scale_pattern(const Pattern& p, double s);

/// Shape of a sampling grid over [-extent, extent]^2.
struct RasterShape {
  int width = 0;
  int height = 0;
  double extent = 1.0;
};

/// Row-major raster sampled at pixel centres; row 0 is the largest y.
struct RasterImage {
  int width = 0;
  int height = 0;
  double extent = 1.0;
  std::vector<double> pixels;

  RasterImage() = default;
  RasterImage(int w, int h, double ext);
  explicit RasterImage(const RasterShape& shape) : RasterImage(shape.width, shape.height, shape.extent) {}

  RasterShape shape() const { return {width, height, extent}; }
  double pixel_width() const { return 2.0 * extent / width; }
  double pixel_height() const { return 2.0 * extent / height; }
  double pixel_area() const { return pixel_width() * pixel_height(); }
  /// Plane coordinate of the centre of pixel (row, col).
  Vec2 pixel_center(int row, int col) const;
  double& at(int row, int col) { return pixels[static_cast<std::size_t>(row) * width + col]; }
  double at(int row, int col) const { return pixels[static_cast<std::size_t>(row) * width + col]; }
  void validate() const;
};

/// c_j c_k * integral of phi_j phi_k over the plane.
double atom_inner_product(const Atom& a, const Atom& b);
/// Bilinear extension over all atom pairs.
double pattern_inner_product(const Pattern& p, const Pattern& q);
/// L2 norm of p.
double pattern_norm(const Pattern& p);

/// Convolution with the unit-mass isotropic Gaussian kernel of size rho.
/// Keeps K, psi and tau; sigma_hat = sqrt(rho^2 + sigma^2) per axis and the
/// coefficient shrinks by |sigma| / |sigma_hat|.
Pattern smooth_pattern(const Pattern& p, double rho);

/// Shifts every atom centre by u, i.e. returns p(X - u).
Pattern translate_pattern(const Pattern& p, const Vec2& u);

/// Samples p at the pixel centres of the grid.
RasterImage evaluate_pattern(const Pattern& p, const RasterShape& grid);

}  // namespace atomreg

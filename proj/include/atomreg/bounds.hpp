#pragma once

#include <optional>
#include <string>
#include <vector>

#include "atomreg/atoms.hpp"

namespace atomreg {

enum class NoiseKind { GaussianAnalytic, Generic };

const char* to_string(NoiseKind kind);
NoiseKind noise_kind_from_string(const std::string& name);

/// Noise model parameters. For the analytic model the noise is
/// w(X) = sum_l zeta_l exp(-|X - delta_l|^2 / eps^2) with L atoms,
/// zeta_l ~ N(0, eta^2) and delta_l uniform on [-b, b]^2.
struct NoiseSpec {
  NoiseKind kind = NoiseKind::GaussianAnalytic;
  int L = 750;
  double epsilon = 0.1;
  double eta = 0.0;
  double b = 4.0;
  double nu = 0.0;

  void validate() const;
};

struct SecondDerivativeConstants {
  double r0 = 0.0;  // smallest eigenvalue of R0
  double r2 = 0.0;  // <= 0
  double r3 = 0.0;  // < 0
};

/// Lower-bound constants for d^2 f / dt^2. Throws NumericError when R0 is not
/// positive definite.
SecondDerivativeConstants second_derivative_constants(const Pattern& p);

/// R0 = sum c_j c_k Q_jk (Sigma^-1 - Sigma^-1 dtau dtau^T Sigma^-1); T^T R0 T = f''(0) along T.
Mat2 curvature_matrix(const Pattern& p);

/// sqrt(r0 / (2|r2| + 2^{2/3} r0^{1/3} |r3|^{2/3})).
double tbar0(double r0, double r2, double r3);
double tbar0(const SecondDerivativeConstants& r);

/// Per-atom constants of the noise analysis.
struct NoiseAtomTerms {
  Mat2 phi;          // Psi (sigma^2 + E^2)^-1 Psi^T
  double alpha = 0;  // smaller eigenvalue of phi
  double beta = 0;   // larger eigenvalue of phi
  double kappa = 0;  // pi |sigma| eps^2 / sqrt|sigma^2 + E^2|
};

std::vector<NoiseAtomTerms> noise_atom_terms(const Pattern& p, double epsilon);

/// Uniform upper bound C on Var(h(0) - h(tT)) / eta^2 over the ball of radius tbar0.
double var_dh_constant(const Pattern& p, const NoiseSpec& noise, double tbar0);
/// Uniform upper bound C on Var(h''(tT)) / eta^2 over the ball of radius tbar0.
double var_h2_constant(const Pattern& p, const NoiseSpec& noise, double tbar0);
/// Sharper numeric variant of var_h2_constant: the exact variance with the
/// box average over noise centres replaced by the whole-plane integral, which
/// is translation invariant and maximized over directions.
double var_h2_constant_sharp(const Pattern& p, const NoiseSpec& noise);

/// E[h] = (pi/2) L eta^2 eps^2.
double mean_deviation(const NoiseSpec& noise);

/// ||(T.grad)^2 p||^2 in closed form.
double second_derivative_norm_sq(const Pattern& p, const Vec2& T);
/// Upper bound on ||d^2 p(. + tT)/dt^2|| over all t and T, inflated by 5%.
double second_derivative_norm_bound(const Pattern& p);

/// Uniform bound on |<p(. + u), z>| over |u| <= t_max, inflated by 2%.
double correlation_bound(const Pattern& p, const Pattern& z, double t_max);

struct GenericBound {
  double nu0 = 0.0;
  std::optional<double> ru0;
  std::string diagnostic;
};

struct UncorrelatedBound {
  double rpz = 0.0;
  double nu0 = 0.0;
  std::optional<double> qu0;
  std::string diagnostic;
};

/// Flat report of every bound constant.
struct BoundReport {
  double r0_lb = 0.0;
  double r2_lb = 0.0;
  double r3_lb = 0.0;
  double c_var_dh = 0.0;
  double c_var_h2 = 0.0;
  double c_var_h2_sharp = 0.0;
  double tbar0 = 0.0;
  double eta = 0.0;
  double eta0 = 0.0;
  double s = 2.0;
  std::optional<double> rt0;
  double probability = 0.0;
  bool two_sided = false;
  bool sharpened = false;
  double rp = 0.0;
  double rp2 = 0.0;
  double nu = 0.0;
  double nu0 = 0.0;
  std::optional<double> ru0;
  std::optional<double> rpz;
  std::optional<double> nu0_uncorrelated;
  std::optional<double> qu0;
  std::vector<std::string> diagnostics;

  /// "key = value" lines, one constant per line.
  std::string to_text() const;
  static std::string csv_header();
  std::string csv_row() const;
};

/// Probabilistic alignment error bound for analytic Gaussian noise. With
/// sharpened = true the numeric variance constant replaces the lemma constant.
BoundReport gaussian_bound(const Pattern& p, const NoiseSpec& noise, double s = 2.0, bool two_sided = false,
                           bool sharpened = false);

/// Bound for arbitrary noise of norm nu.
GenericBound generic_bound(const Pattern& p, double nu, bool two_sided = false);
GenericBound generic_bound(double r0, double tbar, double rp, double rp2, double nu, bool two_sided);

/// Bound for noise z with small correlation to every translate of p. Throws
/// NumericError when r_pz >= tbar0^2 r0 / 8.
UncorrelatedBound uncorrelated_bound(const Pattern& p, const Pattern& z, double nu, double t_max);
UncorrelatedBound uncorrelated_bound(double r0, double tbar, double rp2, double rpz, double nu);

/// Fills rp, rp2, nu0, ru0 (and rpz, nu0_uncorrelated, qu0 when z is given).
void add_generic_bounds(BoundReport& report, const Pattern& p, double nu, const Pattern* z = nullptr,
                        double t_max = 8.0);

}  // namespace atomreg

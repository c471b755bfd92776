#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "atomreg/atoms.hpp"
#include "atomreg/bounds.hpp"
#include "atomreg/distance.hpp"

namespace atomreg {

/// Gradient descent with Armijo backtracking. With barzilai_borwein the
/// backtracking starts from the Barzilai-Borwein step instead of initial_step
/// after the first iteration.
struct DescentOptions {
  int max_iters = 500;
  double grad_tol = 1e-8;
  double initial_step = 1.0;
  bool barzilai_borwein = true;
  double armijo_c = 1e-4;
  double shrink = 0.5;
  int max_backtracks = 60;
  bool record_trace = false;
};

struct RegistrationResult {
  Vec2 translation = Vec2::Zero();
  double distance_value = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<std::pair<double, Vec2>> stage_trace;
  /// Objective after every accepted step (only with DescentOptions::record_trace).
  std::vector<double> distance_trace;
  /// Grid size used by the coarse stage, 0 when no grid was searched.
  std::size_t grid_points = 0;
};

/// Minimizes E(v) = ||q - p(. - v)||^2 = pattern_distance(q, p, v) from init.
/// When q = translate_pattern(p, u) the global minimum is at v = u.
/// The gradient is assembled from the directional derivatives along the
/// canonical axes.
RegistrationResult descend(const Pattern& p, const Pattern& q, const Vec2& init, const DescentOptions& opts = {});
RegistrationResult descend(const CrossTable& objective, const Vec2& init, const DescentOptions& opts = {});

/// Square covering grid of [-t_range, t_range]^2 whose spacing is
/// sqrt(2) * min_T delta_T of the pattern smoothed by rho.
struct TranslationGrid {
  Vec2 u1 = Vec2(1.0, 0.0);
  Vec2 u2 = Vec2(0.0, 1.0);
  double spacing = 0.0;
  int per_axis = 0;
  /// Row-major points; row index runs along y, column index along x.
  std::vector<Vec2> points;
  double rho = 0.0;
  double r_cover = 0.0;

  std::size_t size() const { return points.size(); }
};

/// Throws NumericError when the SIDEN estimate is degenerate along some
/// sampled direction.
TranslationGrid build_grid(const Pattern& p, double rho, double t_range, int n_directions = 128);

struct TwoStageOptions {
  double t_range = 4.0;
  int n_directions = 128;
  DescentOptions descent;
};

/// Smooths both patterns by rho, picks the grid point with the smallest
/// distance (ties go to the lowest row, then column) and descends from it.
RegistrationResult two_stage_register(const Pattern& p, const Pattern& q, double rho, const TwoStageOptions& opts = {});
/// Same, with a prebuilt grid (grid.rho is used as the filter size).
RegistrationResult two_stage_register(const Pattern& p, const Pattern& q, const TranslationGrid& grid,
                                      const DescentOptions& opts = {});

struct ScheduleOptions {
  double c = 1.0;
  double rho_floor = 0.1;
  double rho_min = 0.0;
};

/// Decreasing filter sizes for coarse-to-fine registration.
/// rho_1 = c * max(sqrt(t*^2 - 1), rho_floor); later stages follow the
/// Gaussian or generic noise update rule and fall back to halving when the
/// rule is undefined or does not decrease.
std::vector<double> plan_schedule(double t_star_hint, const NoiseSpec& noise, int n_stages,
                                  const ScheduleOptions& opts = {});

/// Stage 1 is two_stage_register at schedule[0]; every later stage descends on
/// the pair smoothed by schedule[k] from the previous estimate.
RegistrationResult multiscale_register(const Pattern& p, const Pattern& q, const std::vector<double>& schedule,
                                       const TwoStageOptions& opts = {});

/// CSV columns: seed,rho,eta_or_nu,true_tx,true_ty,est_tx,est_ty,error,iterations,converged
std::string registration_csv_header();
std::string registration_csv_row(std::uint64_t seed, double rho, double eta_or_nu, const Vec2& truth,
                                 const RegistrationResult& r);

}  // namespace atomreg

#include "atomreg/registration.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "atomreg/siden.hpp"

namespace atomreg {

namespace {
// Relative to max(1, ||x||^2 + ||y||^2), the scale of the rounding error in
// distance().
constexpr double kStallGradient = 1e-6;
}  // namespace

RegistrationResult descend(const CrossTable& objective, const Vec2& init, const DescentOptions& opts) {
  const Vec2 ex(1.0, 0.0);
  const Vec2 ey(0.0, 1.0);
  RegistrationResult res;
  Vec2 v = init;
  double e = objective.distance(v);
  if (opts.record_trace) res.distance_trace.push_back(e);
  Vec2 prev_v = v;
  Vec2 prev_g = Vec2::Zero();
  for (;;) {
    const Vec2 full = objective.distance_gradient(v);
    const Vec2 g(full.dot(ex), full.dot(ey));
    const double gn2 = g.squaredNorm();
    if (std::sqrt(gn2) <= opts.grad_tol) {
      res.converged = true;
      break;
    }
    if (res.iterations >= opts.max_iters) break;
    double step = opts.initial_step;
    if (opts.barzilai_borwein && res.iterations > 0) {
      const Vec2 sv = v - prev_v;
      const double sy = sv.dot(g - prev_g);
      if (sy > 0.0) step = sv.squaredNorm() / sy;
    }
    prev_v = v;
    prev_g = g;
    bool accepted = false;
    for (int bt = 0; bt < opts.max_backtracks; ++bt) {
      const Vec2 cand = v - step * g;
      const double ec = objective.distance(cand);
      if (ec < e && ec <= e - opts.armijo_c * step * gn2) {
        v = cand;
        e = ec;
        accepted = true;
        break;
      }
      step *= opts.shrink;
    }
    if (!accepted) {
      // The objective no longer resolves a sufficient decrease in double
      // precision; accept the point when the gradient is at rounding level.
      const double scale = std::max(1.0, objective.norm_x_sq() + objective.norm_y_sq());
      res.converged = std::sqrt(gn2) <= kStallGradient * scale;
      break;
    }
    ++res.iterations;
    if (opts.record_trace) res.distance_trace.push_back(e);
  }
  res.translation = v;
  res.distance_value = e;
  return res;
}

RegistrationResult descend(const Pattern& p, const Pattern& q, const Vec2& init, const DescentOptions& opts) {
  return descend(CrossTable(q, p), init, opts);
}

TranslationGrid build_grid(const Pattern& p, double rho, double t_range, int n_directions) {
  if (!(t_range > 0.0)) throw std::invalid_argument("t_range must be positive");
  const auto est = siden_boundary(p, n_directions, rho);
  const double r_min = est.min_delta();
  if (!(r_min > 0.0)) {
    throw NumericError("SIDEN estimate is degenerate (delta_T = 0 along some direction); cannot build a grid");
  }
  TranslationGrid g;
  g.rho = rho;
  g.r_cover = r_min;
  g.spacing = std::sqrt(2.0) * r_min;
  g.per_axis = std::max(1, static_cast<int>(std::ceil(2.0 * t_range / g.spacing - 1e-12)));
  g.u1 = Vec2(g.spacing, 0.0);
  g.u2 = Vec2(0.0, g.spacing);
  const double start = -(g.per_axis - 1) * g.spacing / 2.0;
  g.points.reserve(static_cast<std::size_t>(g.per_axis) * g.per_axis);
  for (int r = 0; r < g.per_axis; ++r) {
    for (int c = 0; c < g.per_axis; ++c) g.points.emplace_back(start + c * g.spacing, start + r * g.spacing);
  }
  return g;
}

RegistrationResult two_stage_register(const Pattern& p, const Pattern& q, const TranslationGrid& grid,
                                      const DescentOptions& opts) {
  const Pattern ps = smooth_pattern(p, grid.rho);
  const Pattern qs = smooth_pattern(q, grid.rho);
  const CrossTable objective(qs, ps);
  std::size_t best = 0;
  double best_val = INFINITY;
  for (std::size_t i = 0; i < grid.points.size(); ++i) {
    const double v = objective.distance(grid.points[i]);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  RegistrationResult res = descend(objective, grid.points.at(best), opts);
  res.grid_points = grid.points.size();
  res.stage_trace.emplace_back(grid.rho, res.translation);
  return res;
}

RegistrationResult two_stage_register(const Pattern& p, const Pattern& q, double rho, const TwoStageOptions& opts) {
  const TranslationGrid grid = build_grid(p, rho, opts.t_range, opts.n_directions);
  return two_stage_register(p, q, grid, opts.descent);
}

std::vector<double> plan_schedule(double t_star_hint, const NoiseSpec& noise, int n_stages, const ScheduleOptions& opts) {
  if (!(t_star_hint > 0.0)) throw std::invalid_argument("t_star_hint must be positive");
  if (n_stages < 1) throw std::invalid_argument("n_stages must be at least 1");
  const double rad0 = t_star_hint * t_star_hint - 1.0;
  std::vector<double> out;
  out.push_back(opts.c * std::max(rad0 > 0.0 ? std::sqrt(rad0) : 0.0, opts.rho_floor));
  for (int k = 1; k < n_stages; ++k) {
    const double prev = out.back();
    double next = -1.0;
    if (noise.kind == NoiseKind::GaussianAnalytic) {
      const double den = 1.0 - noise.eta * prev;
      if (den > 0.0) {
        const double radicand = noise.eta * prev * prev * prev / den - 1.0;
        if (radicand > 0.0 && std::isfinite(radicand)) next = std::sqrt(radicand);
      }
    } else {
      if (noise.nu < 1.0) {
        const double radicand = noise.nu / (1.0 - noise.nu) * (1.0 + prev * prev) - 1.0;
        if (radicand > 0.0 && std::isfinite(radicand)) next = std::sqrt(radicand);
      }
    }
    if (!(next > 0.0) || next >= prev) next = 0.5 * prev;
    out.push_back(next);
  }
  // Clamp to rho_min and keep the sequence strictly decreasing.
  std::vector<double> clamped;
  for (double r : out) {
    const double v = std::max(r, opts.rho_min);
    if (!clamped.empty() && !(v < clamped.back())) break;
    clamped.push_back(v);
  }
  return clamped;
}

RegistrationResult multiscale_register(const Pattern& p, const Pattern& q, const std::vector<double>& schedule,
                                       const TwoStageOptions& opts) {
  if (schedule.empty()) throw std::invalid_argument("schedule must not be empty");
  for (std::size_t i = 1; i < schedule.size(); ++i) {
    if (!(schedule[i] < schedule[i - 1])) throw std::invalid_argument("schedule must be strictly decreasing");
  }
  RegistrationResult res = two_stage_register(p, q, schedule[0], opts);
  int iterations = res.iterations;
  for (std::size_t k = 1; k < schedule.size(); ++k) {
    const Pattern ps = smooth_pattern(p, schedule[k]);
    const Pattern qs = smooth_pattern(q, schedule[k]);
    RegistrationResult stage = descend(CrossTable(qs, ps), res.translation, opts.descent);
    iterations += stage.iterations;
    stage.stage_trace = std::move(res.stage_trace);
    stage.stage_trace.emplace_back(schedule[k], stage.translation);
    stage.grid_points = res.grid_points;
    res = std::move(stage);
  }
  res.iterations = iterations;
  return res;
}

std::string registration_csv_header() {
  return "seed,rho,eta_or_nu,true_tx,true_ty,est_tx,est_ty,error,iterations,converged";
}

std::string registration_csv_row(std::uint64_t seed, double rho, double eta_or_nu, const Vec2& truth,
                                 const RegistrationResult& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%llu,%.10g,%.10g,%.12g,%.12g,%.12g,%.12g,%.12g,%d,%d",
                static_cast<unsigned long long>(seed), rho, eta_or_nu, truth.x(), truth.y(), r.translation.x(),
                r.translation.y(), (r.translation - truth).norm(), r.iterations, r.converged ? 1 : 0);
  return buf;
}

}  // namespace atomreg

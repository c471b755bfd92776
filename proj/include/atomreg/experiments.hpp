#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "atomreg/atoms.hpp"
#include "atomreg/bounds.hpp"
#include "atomreg/rng.hpp"

namespace atomreg {

/// Raised for unknown keys, unparsable values and violated config invariants.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parameter ranges of random reference patterns. Rotations are drawn
/// uniformly in [0, pi).
struct RandomPatternSpec {
  int atoms = 20;
  double coeff_min = -1.0;
  double coeff_max = 1.0;
  double tau_range = 4.0;
  double sigma_min = 0.3;
  double sigma_max = 2.0;
};

Pattern random_pattern(const RandomPatternSpec& spec, Philox& rng);
Pattern random_pattern(const RandomPatternSpec& spec, std::uint64_t seed, std::uint64_t stream);

/// Synthetic stand-ins for the face and digit images, size x size pixels
/// covering [-1, 1]^2.
RasterImage synthetic_face_raster(int size = 32);
RasterImage synthetic_digit_raster(int size = 32);
/// Matching pursuit decompositions of the synthetic rasters with the default dictionary.
Pattern face_pattern(int n_atoms = 20, int size = 32);
Pattern digit_pattern(int n_atoms = 20, int size = 32);

enum class Subcommand { SidenSweep, ErrorSweep, GridCount, Bounds, Register, Decompose };
const char* to_string(Subcommand cmd);

struct SweepConfig {
  /// random | face | digit | file
  std::string pattern_source = "random";
  std::string pattern_file;
  RandomPatternSpec random;
  /// Matching pursuit atoms for the face and digit patterns.
  int mp_atoms = 20;
  std::vector<double> rho_list{0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
  std::vector<double> eta_list{0.0, 0.01, 0.02, 0.03, 0.04, 0.05};
  std::vector<double> nu_list{0.0, 0.05, 0.1, 0.2, 0.3};
  /// Number of reference patterns (random source only).
  int patterns = 4;
  /// Trials per reference pattern.
  int trials = 10;
  std::uint64_t seed = 1;
  /// Half-width of the translation range; unset means the pattern half-width
  /// (4 for random patterns, 1 for face and digit).
  std::optional<double> t_range;
  int n_directions = 128;
  /// Search radius for the true SIDEN boundary.
  double siden_t_max = 12.0;
  NoiseSpec noise;
  /// Unset means the pattern half-width, as for t_range.
  std::optional<double> noise_b;
  std::string generic_mode = "correlated-subset";
  int generic_atoms = 5;
  double s = 2.0;
  bool two_sided = false;
  bool sharpened = false;
  std::string out;
  int threads = 1;

  /// Applies one "key = value" setting.
  void set(const std::string& key, const std::string& value);
  /// Applies every non-comment "key = value" line of a config text.
  void apply_text(const std::string& text);
  void apply_file(const std::string& path);
  void validate() const;
  /// Every key with its current value, one "key = value" line each.
  std::string to_text() const;

  double pattern_half_width() const;
  double effective_t_range() const;
  NoiseSpec effective_noise() const;
};

std::vector<std::string> config_keys();
SweepConfig default_config(Subcommand cmd);

/// The reference pattern for a config: random patterns come from stream
/// (pattern tag, index); other sources ignore the index.
Pattern reference_pattern(const SweepConfig& cfg, int index);

/// Runs fn(i) for i in [0, n) on up to `threads` workers and rethrows the
/// first exception.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

struct SidenTrial {
  Vec2 direction = Vec2::Zero();
  std::vector<double> delta_hat;
  std::vector<std::optional<double>> omega_hat;
  /// True when a boundary crossing was found at every rho.
  bool valid() const;
};

std::vector<SidenTrial> siden_sweep_trials(const SweepConfig& cfg);
/// Columns: rho,mean_delta_hat,mean_omega_hat,n_valid. Means run over the
/// trials whose boundary crossing exists at every rho; when there is none,
/// mean_delta_hat averages all trials and mean_omega_hat is empty.
std::string run_siden_sweep(const SweepConfig& cfg);

struct ErrorRecord {
  int pattern = 0;
  int trial = 0;
  double rho = 0.0;
  /// eta for Gaussian noise, nu for generic noise.
  double level = 0.0;
  Vec2 truth = Vec2::Zero();
  Vec2 estimate = Vec2::Zero();
  double error = 0.0;
  int iterations = 0;
  bool converged = false;
  /// R_t0 (Gaussian) or R_u0 (generic) of the smoothed pair, when defined.
  std::optional<double> bound;
  /// Admissible level in the units of `level`.
  double level0 = 0.0;
};

/// Records ordered by (rho, level, pattern, trial). The noise of a trial is
/// drawn once at unit level and scaled, so every level sees the same draw.
std::vector<ErrorRecord> error_sweep_records(const SweepConfig& cfg);
/// Columns: rho,eta|nu,mean_error,mean_bound,bound_violation_rate,n_trials,n_bounded,mean_level0.
/// mean_bound and bound_violation_rate cover the trials with a defined bound
/// and are empty when there is none; a violation is error > bound + 1e-6.
std::string run_error_sweep(const SweepConfig& cfg);
std::string error_sweep_csv(const SweepConfig& cfg, const std::vector<ErrorRecord>& records);

/// Columns: rho,grid_points,product with product = grid_points * (1 + rho^2).
/// grid_points is averaged over the reference patterns.
std::string run_grid_count(const SweepConfig& cfg);

struct BoundsOutput {
  std::string text;
  std::string csv;
};
/// One report per rho for reference pattern 0 and the configured noise.
BoundsOutput run_bounds_report(const SweepConfig& cfg);

std::string format_number(double v);

}  // namespace atomreg

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "atomreg/atoms.hpp"

namespace atomreg {

/// Raised for unreadable or malformed input files.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class RasterFormat { Pgm, Csv };

/// Picks the format from the file extension (.pgm or .csv).
RasterFormat raster_format_from_path(const std::string& path);
RasterFormat raster_format_from_string(const std::string& name);

/// Loads a grayscale raster. PGM (P2 or P5, 8 or 16 bit) pixels are mapped to
/// value / maxval; CSV is headerless, one image row per line. The extent is
/// taken from `extent` when given, else from the "<path>.meta" sidecar
/// ("extent = <value>"), else 1.
RasterImage load_raster(const std::string& path, RasterFormat format, std::optional<double> extent = std::nullopt);
RasterImage load_raster(const std::string& path, std::optional<double> extent = std::nullopt);

/// Writes the raster and its "<path>.meta" sidecar. PGM output is 16-bit P5
/// with values clamped to [0, 1]; CSV keeps full double precision.
void save_raster(const RasterImage& img, const std::string& path, RasterFormat format);
void save_raster(const RasterImage& img, const std::string& path);

/// Sampling grids of the matching pursuit dictionary.
struct DictionarySpec {
  /// Rotations used for anisotropic shapes; isotropic shapes use psi = 0 only.
  std::vector<double> psi_steps;
  /// Atom centres sit on every tau_stride-th pixel centre.
  int tau_stride = 2;
  /// Scales; shapes are (s, s) and every (s_i, s_j) with s_i > s_j.
  std::vector<double> sigma_values;

  void validate() const;
};

/// psi in {0, pi/8, ..., 7pi/8}, tau stride 2, sigma in
/// {0.05, 0.1, 0.2, 0.4, 0.8, 1.2} * extent.
DictionarySpec default_dictionary(double extent);

struct MatchingPursuitResult {
  Pattern pattern;
  RasterImage residual;
  /// Residual energy (sum of squares) before the first and after every step.
  std::vector<double> residual_energy;
  /// Dictionary index chosen at every step.
  std::vector<std::size_t> selected;
  /// True when the image carried no energy and zero-coefficient atoms were returned.
  bool degenerate = false;
};

/// Greedy decomposition: each step picks the dictionary atom with the largest
/// |<r, phi>| / ||phi|| (lowest index on ties), uses coefficient
/// <r, phi> / ||phi||^2 and subtracts it from the residual r.
MatchingPursuitResult matching_pursuit_detailed(const RasterImage& img, const DictionarySpec& dict, int n_atoms);
Pattern matching_pursuit(const RasterImage& img, const DictionarySpec& dict, int n_atoms);

/// Pattern CSV: header "coeff,psi,tau_x,tau_y,sigma_x,sigma_y", one atom per row.
void save_pattern_csv(const Pattern& p, const std::string& path);
Pattern load_pattern_csv(const std::string& path);
std::string pattern_to_csv(const Pattern& p);
Pattern pattern_from_csv(const std::string& text);

}  // namespace atomreg

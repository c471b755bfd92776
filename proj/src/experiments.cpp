#include "atomreg/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "atomreg/distance.hpp"
#include "atomreg/ingestion.hpp"
#include "atomreg/noise.hpp"
#include "atomreg/registration.hpp"
#include "atomreg/siden.hpp"

namespace atomreg {

namespace {

// Stream tags; every random quantity of a sweep lives on its own stream.
constexpr std::uint64_t kTagPattern = 1;
constexpr std::uint64_t kTagSiden = 2;
constexpr std::uint64_t kTagTarget = 3;
constexpr std::uint64_t kTagNoise = 4;
constexpr std::uint64_t kTagBoundsNoise = 5;

constexpr double kPi = std::numbers::pi;

}  // namespace

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

Pattern random_pattern(const RandomPatternSpec& spec, Philox& rng) {
  if (spec.atoms < 1) throw std::invalid_argument("random pattern needs at least one atom");
  std::vector<Atom> atoms;
  atoms.reserve(static_cast<std::size_t>(spec.atoms));
  for (int i = 0; i < spec.atoms; ++i) {
    const double c = rng.uniform(spec.coeff_min, spec.coeff_max);
    const double psi = rng.uniform(0.0, kPi);
    const double tx = rng.uniform(-spec.tau_range, spec.tau_range);
    const double ty = rng.uniform(-spec.tau_range, spec.tau_range);
    const double sx = rng.uniform(spec.sigma_min, spec.sigma_max);
    const double sy = rng.uniform(spec.sigma_min, spec.sigma_max);
    atoms.push_back(Atom::make(c, psi, Vec2(tx, ty), Vec2(sx, sy)));
  }
  return Pattern(std::move(atoms));
}

Pattern random_pattern(const RandomPatternSpec& spec, std::uint64_t seed, std::uint64_t stream) {
  Philox rng(seed, stream);
  return random_pattern(spec, rng);
}

namespace {

double segment_distance(const Vec2& x, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double t = std::clamp((x - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
  return (x - a - t * ab).norm();
}

double smoothstep(double e0, double e1, double x) {
  const double t = std::clamp((x - e0) / (e1 - e0), 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

template <class F>
RasterImage render(int size, F&& f) {
  if (size < 4) throw std::invalid_argument("synthetic raster needs at least 4 pixels per side");
  RasterImage img(size, size, 1.0);
  for (int r = 0; r < size; ++r) {
    for (int c = 0; c < size; ++c) img.at(r, c) = f(img.pixel_center(r, c));
  }
  return img;
}

}  // namespace

RasterImage synthetic_face_raster(int size) {
  return render(size, [](const Vec2& x) {
    const double rr = std::hypot(x.x() / 0.7, x.y() / 0.85);
    double v = 0.7 * smoothstep(1.05, 0.9, rr);
    for (double ex : {-0.28, 0.28}) {
      v -= 0.5 * std::exp(-(x - Vec2(ex, 0.25)).squaredNorm() / (0.09 * 0.09));
    }
    v -= 0.25 * std::exp(-std::pow(segment_distance(x, Vec2(0.0, 0.15), Vec2(0.0, -0.1)) / 0.06, 2));
    // Mouth: y = -0.45 + 0.8 x^2 on |x| < 0.3.
    double dm = 1e9;
    for (int i = 0; i < 12; ++i) {
      const double x0 = -0.3 + 0.05 * i;
      const double x1 = x0 + 0.05;
      dm = std::min(dm, segment_distance(x, Vec2(x0, -0.45 + 0.8 * x0 * x0), Vec2(x1, -0.45 + 0.8 * x1 * x1)));
    }
    v -= 0.4 * std::exp(-dm * dm / (0.07 * 0.07));
    return v;
  });
}

RasterImage synthetic_digit_raster(int size) {
  return render(size, [](const Vec2& x) {
    std::vector<std::pair<Vec2, Vec2>> strokes{
        {Vec2(-0.35, 0.7), Vec2(0.4, 0.7)},
        {Vec2(-0.35, 0.7), Vec2(-0.38, 0.08)},
    };
    // Bowl of the "5": arc around (0, -0.3) from 130 degrees clockwise to -140 degrees.
    const Vec2 centre(0.0, -0.3);
    const double a0 = 130.0 * kPi / 180.0;
    const double a1 = -140.0 * kPi / 180.0;
    const int n = 24;
    for (int i = 0; i < n; ++i) {
      const double t0 = a0 + (a1 - a0) * i / n;
      const double t1 = a0 + (a1 - a0) * (i + 1) / n;
      strokes.emplace_back(centre + 0.4 * Vec2(std::cos(t0), std::sin(t0)),
                           centre + 0.4 * Vec2(std::cos(t1), std::sin(t1)));
    }
    double d = 1e9;
    for (const auto& [a, b] : strokes) d = std::min(d, segment_distance(x, a, b));
    return std::exp(-d * d / (0.09 * 0.09));
  });
}

Pattern face_pattern(int n_atoms, int size) {
  return matching_pursuit(synthetic_face_raster(size), default_dictionary(1.0), n_atoms);
}

Pattern digit_pattern(int n_atoms, int size) {
  return matching_pursuit(synthetic_digit_raster(size), default_dictionary(1.0), n_atoms);
}

const char* to_string(Subcommand cmd) {
  switch (cmd) {
    case Subcommand::SidenSweep:
      return "siden-sweep";
    case Subcommand::ErrorSweep:
      return "error-sweep";
    case Subcommand::GridCount:
      return "grid-count";
    case Subcommand::Bounds:
      return "bounds";
    case Subcommand::Register:
      return "register";
    case Subcommand::Decompose:
      return "decompose";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Config

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw ConfigError("invalid number '" + value + "' for key '" + key + "'");
  }
  return out;
}

long long parse_int(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  long long out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ConfigError("invalid integer '" + value + "' for key '" + key + "'");
  }
  return out;
}

int parse_int32(const std::string& key, const std::string& value) {
  const long long v = parse_int(key, value);
  if (v < -2147483647LL || v > 2147483647LL) throw ConfigError("integer out of range for key '" + key + "'");
  return static_cast<int>(v);
}

bool parse_bool(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("invalid boolean '" + value + "' for key '" + key + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, item));
  if (out.empty()) throw ConfigError("empty list for key '" + key + "'");
  return out;
}

std::string list_text(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += shortest(v[i]);
  }
  return out;
}

}  // namespace

std::vector<std::string> config_keys() {
  return {"pattern.source", "pattern.file",      "pattern.atoms",   "pattern.coeff_min", "pattern.coeff_max",
          "pattern.tau_range", "pattern.sigma_min", "pattern.sigma_max", "pattern.mp_atoms", "sweep.rho_list",
          "sweep.eta_list", "sweep.nu_list",     "sweep.patterns",  "sweep.trials",      "seed",
          "t_range",        "grid.n_directions", "siden.t_max",     "noise.kind",        "noise.L",
          "noise.epsilon",  "noise.eta",         "noise.b",         "noise.nu",          "noise.mode",
          "noise.atoms",    "bound.s",           "bound.two_sided", "bound.sharpened",   "out",
          "threads"};
}

void SweepConfig::set(const std::string& raw_key, const std::string& value) {
  const std::string key = trim(raw_key);
  const std::string v = trim(value);
  if (key == "pattern.source") {
    if (v != "random" && v != "face" && v != "digit" && v != "file") {
      throw ConfigError("pattern.source must be random, face, digit or file (got '" + v + "')");
    }
    pattern_source = v;
  } else if (key == "pattern.file") {
    pattern_file = v;
  } else if (key == "pattern.atoms") {
    random.atoms = parse_int32(key, v);
  } else if (key == "pattern.coeff_min") {
    random.coeff_min = parse_double(key, v);
  } else if (key == "pattern.coeff_max") {
    random.coeff_max = parse_double(key, v);
  } else if (key == "pattern.tau_range") {
    random.tau_range = parse_double(key, v);
  } else if (key == "pattern.sigma_min") {
    random.sigma_min = parse_double(key, v);
  } else if (key == "pattern.sigma_max") {
    random.sigma_max = parse_double(key, v);
  } else if (key == "pattern.mp_atoms") {
    mp_atoms = parse_int32(key, v);
  } else if (key == "sweep.rho_list") {
    rho_list = parse_list(key, v);
  } else if (key == "sweep.eta_list") {
    eta_list = parse_list(key, v);
  } else if (key == "sweep.nu_list") {
    nu_list = parse_list(key, v);
  } else if (key == "sweep.patterns") {
    patterns = parse_int32(key, v);
  } else if (key == "sweep.trials") {
    trials = parse_int32(key, v);
  } else if (key == "seed") {
    const long long s = parse_int(key, v);
    if (s < 0) throw ConfigError("seed must be nonnegative");
    seed = static_cast<std::uint64_t>(s);
  } else if (key == "t_range") {
    if (v == "auto") {
      t_range.reset();
    } else {
      t_range = parse_double(key, v);
    }
  } else if (key == "grid.n_directions") {
    n_directions = parse_int32(key, v);
  } else if (key == "siden.t_max") {
    siden_t_max = parse_double(key, v);
  } else if (key == "noise.kind") {
    try {
      noise.kind = noise_kind_from_string(v);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  } else if (key == "noise.L") {
    noise.L = parse_int32(key, v);
  } else if (key == "noise.epsilon") {
    noise.epsilon = parse_double(key, v);
  } else if (key == "noise.eta") {
    noise.eta = parse_double(key, v);
  } else if (key == "noise.b") {
    if (v == "auto") {
      noise_b.reset();
    } else {
      noise_b = parse_double(key, v);
    }
  } else if (key == "noise.nu") {
    noise.nu = parse_double(key, v);
  } else if (key == "noise.mode") {
    try {
      generic_noise_mode_from_string(v);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    generic_mode = v;
  } else if (key == "noise.atoms") {
    generic_atoms = parse_int32(key, v);
  } else if (key == "bound.s") {
    s = parse_double(key, v);
  } else if (key == "bound.two_sided") {
    two_sided = parse_bool(key, v);
  } else if (key == "bound.sharpened") {
    sharpened = parse_bool(key, v);
  } else if (key == "out") {
    out = v;
  } else if (key == "threads") {
    threads = parse_int32(key, v);
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

void SweepConfig::apply_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + " has no '='");
    set(line.substr(0, eq), line.substr(eq + 1));
  }
}

void SweepConfig::apply_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  apply_text(ss.str());
}

void SweepConfig::validate() const {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
  };
  require(pattern_source != "file" || !pattern_file.empty(), "pattern.source = file needs pattern.file");
  require(random.atoms >= 1, "pattern.atoms must be at least 1");
  require(random.coeff_min <= random.coeff_max, "pattern.coeff_min must not exceed pattern.coeff_max");
  require(random.tau_range >= 0.0, "pattern.tau_range must be nonnegative");
  require(random.sigma_min > 0.0 && random.sigma_min <= random.sigma_max,
          "pattern.sigma_min must be positive and not exceed pattern.sigma_max");
  require(mp_atoms >= 1, "pattern.mp_atoms must be at least 1");
  require(!rho_list.empty() && !eta_list.empty() && !nu_list.empty(), "sweep lists must be nonempty");
  for (double r : rho_list) require(r >= 0.0, "sweep.rho_list entries must be nonnegative");
  for (double e : eta_list) require(e >= 0.0, "sweep.eta_list entries must be nonnegative");
  for (double n : nu_list) require(n >= 0.0, "sweep.nu_list entries must be nonnegative");
  require(patterns >= 1, "sweep.patterns must be at least 1");
  require(trials >= 1, "sweep.trials must be at least 1");
  require(!t_range || *t_range > 0.0, "t_range must be positive");
  require(n_directions >= 4 && n_directions % 2 == 0, "grid.n_directions must be even and at least 4");
  require(siden_t_max > 0.0, "siden.t_max must be positive");
  require(!noise_b || *noise_b > 0.0, "noise.b must be positive");
  require(generic_atoms >= 1, "noise.atoms must be at least 1");
  require(s > std::sqrt(2.0), "bound.s must exceed sqrt(2)");
  require(threads >= 1, "threads must be at least 1");
  try {
    effective_noise().validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

std::string SweepConfig::to_text() const {
  std::ostringstream os;
  auto line = [&](const char* key, const std::string& v) { os << key << " = " << v << '\n'; };
  line("pattern.source", pattern_source);
  line("pattern.file", pattern_file);
  line("pattern.atoms", std::to_string(random.atoms));
  line("pattern.coeff_min", shortest(random.coeff_min));
  line("pattern.coeff_max", shortest(random.coeff_max));
  line("pattern.tau_range", shortest(random.tau_range));
  line("pattern.sigma_min", shortest(random.sigma_min));
  line("pattern.sigma_max", shortest(random.sigma_max));
  line("pattern.mp_atoms", std::to_string(mp_atoms));
  line("sweep.rho_list", list_text(rho_list));
  line("sweep.eta_list", list_text(eta_list));
  line("sweep.nu_list", list_text(nu_list));
  line("sweep.patterns", std::to_string(patterns));
  line("sweep.trials", std::to_string(trials));
  line("seed", std::to_string(seed));
  line("t_range", t_range ? shortest(*t_range) : "auto");
  line("grid.n_directions", std::to_string(n_directions));
  line("siden.t_max", shortest(siden_t_max));
  line("noise.kind", to_string(noise.kind));
  line("noise.L", std::to_string(noise.L));
  line("noise.epsilon", shortest(noise.epsilon));
  line("noise.eta", shortest(noise.eta));
  line("noise.b", noise_b ? shortest(*noise_b) : "auto");
  line("noise.nu", shortest(noise.nu));
  line("noise.mode", generic_mode);
  line("noise.atoms", std::to_string(generic_atoms));
  line("bound.s", shortest(s));
  line("bound.two_sided", two_sided ? "true" : "false");
  line("bound.sharpened", sharpened ? "true" : "false");
  line("out", out);
  line("threads", std::to_string(threads));
  return os.str();
}

double SweepConfig::pattern_half_width() const { return pattern_source == "random" ? random.tau_range : 1.0; }

double SweepConfig::effective_t_range() const { return t_range ? *t_range : std::max(pattern_half_width(), 1e-3); }

NoiseSpec SweepConfig::effective_noise() const {
  NoiseSpec n = noise;
  n.b = noise_b ? *noise_b : std::max(pattern_half_width(), 1e-3);
  return n;
}

SweepConfig default_config(Subcommand cmd) {
  SweepConfig cfg;
  switch (cmd) {
    case Subcommand::SidenSweep:
      cfg.random.atoms = 40;
      cfg.patterns = 1;
      cfg.trials = 300;
      break;
    case Subcommand::ErrorSweep:
      cfg.patterns = 4;
      cfg.trials = 10;
      cfg.rho_list = {0.0, 1.0, 2.0, 3.0};
      break;
    case Subcommand::GridCount:
      cfg.patterns = 10;
      break;
    case Subcommand::Bounds:
      cfg.rho_list = {0.0};
      cfg.noise.eta = 0.001;
      break;
    case Subcommand::Register:
    case Subcommand::Decompose:
      cfg.rho_list = {0.0};
      break;
  }
  return cfg;
}

Pattern reference_pattern(const SweepConfig& cfg, int index) {
  if (cfg.pattern_source == "random") {
    return random_pattern(cfg.random, cfg.seed, stream_id(kTagPattern, static_cast<std::uint64_t>(index)));
  }
  if (cfg.pattern_source == "face") return face_pattern(cfg.mp_atoms);
  if (cfg.pattern_source == "digit") return digit_pattern(cfg.mp_atoms);
  try {
    return load_pattern_csv(cfg.pattern_file);
  } catch (const FormatError& e) {
    throw ConfigError(e.what());
  }
}

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  const int workers = std::max(1, std::min(threads, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!first) first = std::current_exception();
          next.store(n);
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

// ---------------------------------------------------------------------------
// SIDEN sweep

bool SidenTrial::valid() const {
  return !omega_hat.empty() && std::all_of(omega_hat.begin(), omega_hat.end(), [](const auto& o) { return o.has_value(); });
}

std::vector<SidenTrial> siden_sweep_trials(const SweepConfig& cfg) {
  cfg.validate();
  const int n = cfg.pattern_source == "random" ? cfg.trials * cfg.patterns : cfg.trials;
  const Pattern fixed = cfg.pattern_source == "random" ? Pattern() : reference_pattern(cfg, 0);
  std::vector<SidenTrial> out(static_cast<std::size_t>(n));
  parallel_for(n, cfg.threads, [&](int i) {
    Philox rng(cfg.seed, stream_id(kTagSiden, static_cast<std::uint64_t>(i)));
    const Pattern p = cfg.pattern_source == "random" ? random_pattern(cfg.random, rng) : fixed;
    const double ang = rng.uniform(0.0, 2.0 * kPi);
    SidenTrial& t = out[static_cast<std::size_t>(i)];
    t.direction = Vec2(std::cos(ang), std::sin(ang));
    for (double rho : cfg.rho_list) {
      const DirectionalProfile prof(smooth_pattern(p, rho), t.direction);
      t.delta_hat.push_back(cubic_root_bound(alpha_coefficients(prof)));
      t.omega_hat.push_back(true_siden_boundary(prof, cfg.siden_t_max));
    }
  });
  return out;
}

std::string run_siden_sweep(const SweepConfig& cfg) {
  const auto trials = siden_sweep_trials(cfg);
  std::ostringstream os;
  os << "rho,mean_delta_hat,mean_omega_hat,n_valid\n";
  std::size_t n_valid = 0;
  for (const auto& t : trials) n_valid += t.valid() ? 1 : 0;
  for (std::size_t k = 0; k < cfg.rho_list.size(); ++k) {
    double sd = 0.0;
    double so = 0.0;
    std::size_t count = 0;
    for (const auto& t : trials) {
      if (n_valid > 0 && !t.valid()) continue;
      sd += t.delta_hat[k];
      if (n_valid > 0) so += *t.omega_hat[k];
      ++count;
    }
    os << format_number(cfg.rho_list[k]) << ',' << format_number(count ? sd / count : 0.0) << ','
       << (n_valid > 0 ? format_number(so / count) : std::string()) << ',' << n_valid << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Error sweep

std::vector<ErrorRecord> error_sweep_records(const SweepConfig& cfg) {
  cfg.validate();
  const NoiseSpec base = cfg.effective_noise();
  const bool gaussian = base.kind == NoiseKind::GaussianAnalytic;
  const std::vector<double>& levels = gaussian ? cfg.eta_list : cfg.nu_list;
  const double t_range = cfg.effective_t_range();
  const int n_pat = cfg.pattern_source == "random" ? cfg.patterns : 1;
  const std::size_t n_rho = cfg.rho_list.size();
  const std::size_t n_lvl = levels.size();
  const std::size_t per_cell = static_cast<std::size_t>(n_pat) * cfg.trials;
  std::vector<ErrorRecord> out(n_rho * n_lvl * per_cell);
  const GenericNoiseMode mode = generic_noise_mode_from_string(cfg.generic_mode);

  std::vector<Pattern> refs;
  for (int i = 0; i < n_pat; ++i) refs.push_back(reference_pattern(cfg, i));

  // One work item per (pattern, rho): the grid and the bounds are shared by
  // all trials and levels of that item.
  const int items = n_pat * static_cast<int>(n_rho);
  parallel_for(items, cfg.threads, [&](int item) {
    const int pi = item / static_cast<int>(n_rho);
    const std::size_t ri = static_cast<std::size_t>(item) % n_rho;
    const double rho = cfg.rho_list[ri];
    const Pattern& p = refs[static_cast<std::size_t>(pi)];
    const Pattern ps = smooth_pattern(p, rho);
    const TranslationGrid grid = build_grid(p, rho, t_range, cfg.n_directions);
    const NoiseSpec unit_hat = [&] {
      NoiseSpec n = base;
      n.eta = 1.0;
      return smoothed_noise_params(n, rho);
    }();
    // eta_hat = gain * eta.
    const double gain = unit_hat.eta;

    std::vector<std::optional<double>> gauss_bounds(n_lvl);
    std::vector<double> gauss_level0(n_lvl, 0.0);
    std::optional<SecondDerivativeConstants> rc;
    double rp = 0.0;
    double rp2 = 0.0;
    if (gaussian) {
      for (std::size_t li = 0; li < n_lvl; ++li) {
        NoiseSpec nh = unit_hat;
        nh.eta = gain * levels[li];
        const BoundReport rep = gaussian_bound(ps, nh, cfg.s, cfg.two_sided, cfg.sharpened);
        gauss_bounds[li] = rep.rt0;
        gauss_level0[li] = rep.eta0 / gain;
      }
    } else {
      rc = second_derivative_constants(ps);
      rp = pattern_norm(ps);
      rp2 = second_derivative_norm_bound(ps);
    }

    for (int tr = 0; tr < cfg.trials; ++tr) {
      const std::uint64_t trial_id = static_cast<std::uint64_t>(pi) * cfg.trials + tr;
      Philox trng(cfg.seed, stream_id(kTagTarget, trial_id));
      const Vec2 truth(trng.uniform(-t_range, t_range), trng.uniform(-t_range, t_range));
      const std::uint64_t noise_stream = stream_id(kTagNoise, trial_id);
      Pattern unit_noise;
      if (gaussian) {
        NoiseSpec n = base;
        n.eta = 1.0;
        unit_noise = sample_gaussian_field(n, cfg.seed, noise_stream).pattern;
      } else {
        unit_noise = make_generic_noise(p, mode, cfg.generic_atoms, 1.0, cfg.seed, noise_stream);
      }
      const double unit_hat_norm = gaussian ? 0.0 : pattern_norm(smooth_pattern(unit_noise, rho));
      for (std::size_t li = 0; li < n_lvl; ++li) {
        const double level = levels[li];
        const Pattern target = translate_pattern(add_patterns(p, scale_pattern(unit_noise, level)), truth);
        const RegistrationResult res = two_stage_register(p, target, grid);
        ErrorRecord rec;
        rec.pattern = pi;
        rec.trial = tr;
        rec.rho = rho;
        rec.level = level;
        rec.truth = truth;
        rec.estimate = res.translation;
        rec.error = (res.translation - truth).norm();
        rec.iterations = res.iterations;
        rec.converged = res.converged;
        if (gaussian) {
          rec.bound = gauss_bounds[li];
          rec.level0 = gauss_level0[li];
        } else {
          const double nu_hat = level * unit_hat_norm;
          const GenericBound gb = generic_bound(rc->r0, tbar0(*rc), rp, rp2, nu_hat, cfg.two_sided);
          rec.bound = gb.ru0;
          rec.level0 = unit_hat_norm > 0.0 ? gb.nu0 / unit_hat_norm : 0.0;
        }
        out[(ri * n_lvl + li) * per_cell + trial_id] = rec;
      }
    }
  });
  return out;
}

std::string error_sweep_csv(const SweepConfig& cfg, const std::vector<ErrorRecord>& records) {
  const bool gaussian = cfg.effective_noise().kind == NoiseKind::GaussianAnalytic;
  const std::vector<double>& levels = gaussian ? cfg.eta_list : cfg.nu_list;
  const std::size_t n_lvl = levels.size();
  const std::size_t per_cell = records.size() / (cfg.rho_list.size() * n_lvl);
  std::ostringstream os;
  os << "rho," << (gaussian ? "eta" : "nu")
     << ",mean_error,mean_bound,bound_violation_rate,n_trials,n_bounded,mean_level0\n";
  for (std::size_t ri = 0; ri < cfg.rho_list.size(); ++ri) {
    for (std::size_t li = 0; li < n_lvl; ++li) {
      double se = 0.0;
      double sb = 0.0;
      double sl = 0.0;
      std::size_t nb = 0;
      std::size_t viol = 0;
      for (std::size_t k = 0; k < per_cell; ++k) {
        const ErrorRecord& r = records[(ri * n_lvl + li) * per_cell + k];
        se += r.error;
        sl += r.level0;
        if (r.bound) {
          ++nb;
          sb += *r.bound;
          if (r.error > *r.bound + 1e-6) ++viol;
        }
      }
      os << format_number(cfg.rho_list[ri]) << ',' << format_number(levels[li]) << ','
         << format_number(se / per_cell) << ',' << (nb ? format_number(sb / nb) : "") << ','
         << (nb ? format_number(static_cast<double>(viol) / nb) : "") << ',' << per_cell << ',' << nb << ','
         << format_number(sl / per_cell) << '\n';
    }
  }
  return os.str();
}

std::string run_error_sweep(const SweepConfig& cfg) { return error_sweep_csv(cfg, error_sweep_records(cfg)); }

// ---------------------------------------------------------------------------
// Grid count and bounds

std::string run_grid_count(const SweepConfig& cfg) {
  cfg.validate();
  const int n_pat = cfg.pattern_source == "random" ? cfg.patterns : 1;
  const double t_range = cfg.effective_t_range();
  const std::size_t n_rho = cfg.rho_list.size();
  std::vector<double> counts(static_cast<std::size_t>(n_pat) * n_rho);
  parallel_for(n_pat, cfg.threads, [&](int pi) {
    const Pattern p = reference_pattern(cfg, pi);
    for (std::size_t ri = 0; ri < n_rho; ++ri) {
      counts[static_cast<std::size_t>(pi) * n_rho + ri] =
          static_cast<double>(build_grid(p, cfg.rho_list[ri], t_range, cfg.n_directions).size());
    }
  });
  std::ostringstream os;
  os << "rho,grid_points,product\n";
  for (std::size_t ri = 0; ri < n_rho; ++ri) {
    double sum = 0.0;
    for (int pi = 0; pi < n_pat; ++pi) sum += counts[static_cast<std::size_t>(pi) * n_rho + ri];
    const double mean = sum / n_pat;
    const double rho = cfg.rho_list[ri];
    os << format_number(rho) << ',' << format_number(mean) << ',' << format_number(mean * (1.0 + rho * rho)) << '\n';
  }
  return os.str();
}

BoundsOutput run_bounds_report(const SweepConfig& cfg) {
  cfg.validate();
  const Pattern p = reference_pattern(cfg, 0);
  const NoiseSpec base = cfg.effective_noise();
  BoundsOutput out;
  std::ostringstream text;
  std::ostringstream csv;
  csv << "rho," << BoundReport::csv_header() << '\n';
  for (double rho : cfg.rho_list) {
    const Pattern ps = smooth_pattern(p, rho);
    BoundReport rep;
    if (base.kind == NoiseKind::GaussianAnalytic) {
      rep = gaussian_bound(ps, smoothed_noise_params(base, rho), cfg.s, cfg.two_sided, cfg.sharpened);
    } else {
      const auto r = second_derivative_constants(ps);
      rep.r0_lb = r.r0;
      rep.r2_lb = r.r2;
      rep.r3_lb = r.r3;
      rep.tbar0 = tbar0(r);
      rep.s = cfg.s;
      rep.two_sided = cfg.two_sided;
      const Pattern z = make_generic_noise(p, generic_noise_mode_from_string(cfg.generic_mode), cfg.generic_atoms,
                                           base.nu, cfg.seed, stream_id(kTagBoundsNoise, 0));
      const Pattern zs = smooth_pattern(z, rho);
      add_generic_bounds(rep, ps, pattern_norm(zs), &zs, cfg.effective_t_range() * std::sqrt(2.0));
    }
    text << "rho = " << format_number(rho) << '\n' << rep.to_text() << '\n';
    csv << format_number(rho) << ',' << rep.csv_row() << '\n';
  }
  out.text = text.str();
  out.csv = csv.str();
  return out;
}

}  // namespace atomreg

#include "atomreg/ingestion.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace atomreg {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::optional<double> read_sidecar(const std::string& path) {
  std::ifstream in(path + ".meta");
  if (!in) return std::nullopt;
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(0, eq);
    key.erase(std::remove_if(key.begin(), key.end(), [](unsigned char c) { return std::isspace(c); }), key.end());
    if (key != "extent") continue;
    try {
      return std::stod(line.substr(eq + 1));
    } catch (const std::exception&) {
      throw FormatError("malformed extent in '" + path + ".meta'");
    }
  }
  return std::nullopt;
}

void write_sidecar(const std::string& path, double extent) {
  std::ofstream out(path + ".meta");
  if (!out) throw FormatError("cannot write '" + path + ".meta'");
  out << "extent = " << fmt17(extent) << '\n';
}

// Reads the next whitespace-separated PGM header token, skipping comments.
std::string pgm_token(const std::string& data, std::size_t& pos) {
  for (;;) {
    while (pos < data.size() && std::isspace(static_cast<unsigned char>(data[pos]))) ++pos;
    if (pos < data.size() && data[pos] == '#') {
      while (pos < data.size() && data[pos] != '\n') ++pos;
      continue;
    }
    break;
  }
  const std::size_t start = pos;
  while (pos < data.size() && !std::isspace(static_cast<unsigned char>(data[pos]))) ++pos;
  if (start == pos) throw FormatError("truncated PGM header");
  return data.substr(start, pos - start);
}

int parse_positive(const std::string& tok, const char* what) {
  try {
    std::size_t used = 0;
    const long v = std::stol(tok, &used);
    if (used != tok.size() || v <= 0) throw std::invalid_argument(what);
    return static_cast<int>(v);
  } catch (const std::exception&) {
    throw FormatError(std::string("malformed PGM header: bad ") + what + " '" + tok + "'");
  }
}

RasterImage load_pgm(const std::string& path, double extent) {
  const std::string data = read_file(path);
  std::size_t pos = 0;
  const std::string magic = pgm_token(data, pos);
  if (magic == "P3" || magic == "P6" || magic == "P1" || magic == "P4") {
    throw FormatError("'" + path + "' is not a grayscale PGM (magic " + magic + ")");
  }
  if (magic != "P2" && magic != "P5") throw FormatError("malformed PGM header: unknown magic '" + magic + "'");
  const int w = parse_positive(pgm_token(data, pos), "width");
  const int h = parse_positive(pgm_token(data, pos), "height");
  const int maxval = parse_positive(pgm_token(data, pos), "maxval");
  if (maxval > 65535) throw FormatError("malformed PGM header: maxval above 65535");
  RasterImage img(w, h, extent);
  const std::size_t n = img.pixels.size();
  if (magic == "P2") {
    for (std::size_t i = 0; i < n; ++i) {
      std::string tok;
      try {
        tok = pgm_token(data, pos);
      } catch (const FormatError&) {
        throw FormatError("PGM pixel count does not match " + std::to_string(w) + "x" + std::to_string(h));
      }
      const int v = std::stoi(tok);
      if (v < 0 || v > maxval) throw FormatError("PGM pixel value out of range");
      img.pixels[i] = static_cast<double>(v) / maxval;
    }
  } else {
    ++pos;  // single whitespace after maxval
    const std::size_t bytes = maxval < 256 ? 1 : 2;
    if (data.size() < pos + n * bytes) {
      throw FormatError("PGM pixel count does not match " + std::to_string(w) + "x" + std::to_string(h));
    }
    for (std::size_t i = 0; i < n; ++i) {
      int v;
      if (bytes == 1) {
        v = static_cast<unsigned char>(data[pos + i]);
      } else {
        v = (static_cast<unsigned char>(data[pos + 2 * i]) << 8) | static_cast<unsigned char>(data[pos + 2 * i + 1]);
      }
      if (v > maxval) throw FormatError("PGM pixel value out of range");
      img.pixels[i] = static_cast<double>(v) / maxval;
    }
  }
  return img;
}

RasterImage load_csv(const std::string& path, double extent) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw FormatError("malformed CSV cell '" + cell + "' in '" + path + "'");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw FormatError("CSV rows have different lengths in '" + path + "'");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty() || rows.front().empty()) throw FormatError("empty CSV raster '" + path + "'");
  RasterImage img(static_cast<int>(rows.front().size()), static_cast<int>(rows.size()), extent);
  for (int r = 0; r < img.height; ++r) {
    for (int c = 0; c < img.width; ++c) img.at(r, c) = rows[r][c];
  }
  return img;
}

}  // namespace

RasterFormat raster_format_from_string(const std::string& name) {
  const std::string n = lower(name);
  if (n == "pgm") return RasterFormat::Pgm;
  if (n == "csv") return RasterFormat::Csv;
  throw std::invalid_argument("unknown raster format '" + name + "'");
}

RasterFormat raster_format_from_path(const std::string& path) {
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos) throw std::invalid_argument("cannot infer raster format of '" + path + "'");
  return raster_format_from_string(path.substr(dot + 1));
}

RasterImage load_raster(const std::string& path, RasterFormat format, std::optional<double> extent) {
  double ext = 1.0;
  if (extent) {
    ext = *extent;
  } else if (auto side = read_sidecar(path)) {
    ext = *side;
  }
  if (!(ext > 0.0)) throw FormatError("raster extent must be positive");
  return format == RasterFormat::Pgm ? load_pgm(path, ext) : load_csv(path, ext);
}

RasterImage load_raster(const std::string& path, std::optional<double> extent) {
  return load_raster(path, raster_format_from_path(path), extent);
}

void save_raster(const RasterImage& img, const std::string& path, RasterFormat format) {
  img.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write '" + path + "'");
  if (format == RasterFormat::Pgm) {
    constexpr int kMax = 65535;
    out << "P5\n" << img.width << ' ' << img.height << '\n' << kMax << '\n';
    for (double v : img.pixels) {
      const int q = static_cast<int>(std::lround(std::clamp(v, 0.0, 1.0) * kMax));
      out.put(static_cast<char>(q >> 8));
      out.put(static_cast<char>(q & 0xff));
    }
  } else {
    for (int r = 0; r < img.height; ++r) {
      for (int c = 0; c < img.width; ++c) {
        if (c) out << ',';
        out << fmt17(img.at(r, c));
      }
      out << '\n';
    }
  }
  if (!out) throw FormatError("write failed for '" + path + "'");
  write_sidecar(path, img.extent);
}

void save_raster(const RasterImage& img, const std::string& path) {
  save_raster(img, path, raster_format_from_path(path));
}

void DictionarySpec::validate() const {
  if (psi_steps.empty()) throw std::invalid_argument("dictionary needs at least one rotation");
  if (sigma_values.empty()) throw std::invalid_argument("dictionary needs at least one scale");
  if (tau_stride < 1) throw std::invalid_argument("dictionary tau stride must be at least 1");
  for (double s : sigma_values) {
    if (!(s > 0.0)) throw std::invalid_argument("dictionary scales must be positive");
  }
}

DictionarySpec default_dictionary(double extent) {
  DictionarySpec d;
  for (int i = 0; i < 8; ++i) d.psi_steps.push_back(std::numbers::pi * i / 8.0);
  d.tau_stride = 2;
  for (double f : {0.05, 0.1, 0.2, 0.4, 0.8, 1.2}) d.sigma_values.push_back(f * extent);
  return d;
}

namespace {

struct Shape {
  double psi;
  Vec2 sigma;
};

std::vector<Shape> dictionary_shapes(const DictionarySpec& dict) {
  std::vector<double> sig = dict.sigma_values;
  std::sort(sig.begin(), sig.end());
  sig.erase(std::unique(sig.begin(), sig.end()), sig.end());
  std::vector<Shape> shapes;
  for (double s : sig) shapes.push_back({0.0, Vec2(s, s)});
  for (std::size_t i = 0; i < sig.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      for (double psi : dict.psi_steps) shapes.push_back({psi, Vec2(sig[i], sig[j])});
    }
  }
  return shapes;
}

}  // namespace

MatchingPursuitResult matching_pursuit_detailed(const RasterImage& img, const DictionarySpec& dict, int n_atoms) {
  img.validate();
  dict.validate();
  if (n_atoms < 1) throw std::invalid_argument("matching pursuit needs n_atoms >= 1");
  const int W = img.width;
  const int H = img.height;
  const double pw = img.pixel_width();
  const double ph = img.pixel_height();
  const auto shapes = dictionary_shapes(dict);

  // Each shape is rendered once on a (2H-1) x (2W-1) canvas centred on pixel
  // (H-1, W-1); a dictionary atom centred on pixel (r0, c0) reads the canvas
  // window starting at (H-1-r0, W-1-c0).
  const int CW = 2 * W - 1;
  const int CH = 2 * H - 1;
  std::vector<std::vector<double>> canvas(shapes.size(), std::vector<double>(static_cast<std::size_t>(CW) * CH));
  for (std::size_t s = 0; s < shapes.size(); ++s) {
    const Atom a = Atom::make(1.0, shapes[s].psi, Vec2::Zero(), shapes[s].sigma);
    for (int r = 0; r < CH; ++r) {
      for (int c = 0; c < CW; ++c) {
        const Vec2 x((c - (W - 1)) * pw, -(r - (H - 1)) * ph);
        canvas[s][static_cast<std::size_t>(r) * CW + c] = a.value_at(x);
      }
    }
  }
  std::vector<std::pair<int, int>> centres;
  for (int r = 0; r < H; r += dict.tau_stride) {
    for (int c = 0; c < W; c += dict.tau_stride) centres.emplace_back(r, c);
  }
  const std::size_t n_dict = shapes.size() * centres.size();
  auto window_dot = [&](std::size_t s, int r0, int c0, const std::vector<double>& field) {
    const double* cv = canvas[s].data();
    double acc = 0.0;
    for (int r = 0; r < H; ++r) {
      const double* crow = cv + static_cast<std::size_t>(r + H - 1 - r0) * CW + (W - 1 - c0);
      const double* frow = field.data() + static_cast<std::size_t>(r) * W;
      for (int c = 0; c < W; ++c) acc += crow[c] * frow[c];
    }
    return acc;
  };
  std::vector<double> norm2(n_dict);
  for (std::size_t s = 0; s < shapes.size(); ++s) {
    const double* cv = canvas[s].data();
    for (std::size_t t = 0; t < centres.size(); ++t) {
      const auto [r0, c0] = centres[t];
      double acc = 0.0;
      for (int r = 0; r < H; ++r) {
        const double* crow = cv + static_cast<std::size_t>(r + H - 1 - r0) * CW + (W - 1 - c0);
        for (int c = 0; c < W; ++c) acc += crow[c] * crow[c];
      }
      norm2[s * centres.size() + t] = acc;
    }
  }

  MatchingPursuitResult out;
  out.residual = img;
  auto energy = [&]() {
    double e = 0.0;
    for (double v : out.residual.pixels) e += v * v;
    return e;
  };
  out.residual_energy.push_back(energy());
  out.degenerate = out.residual_energy.front() == 0.0;
  std::vector<Atom> atoms;
  for (int step = 0; step < n_atoms; ++step) {
    std::size_t best = 0;
    double best_score = -1.0;
    double best_corr = 0.0;
    for (std::size_t s = 0; s < shapes.size(); ++s) {
      for (std::size_t t = 0; t < centres.size(); ++t) {
        const std::size_t idx = s * centres.size() + t;
        if (norm2[idx] <= 0.0) continue;
        const double corr = window_dot(s, centres[t].first, centres[t].second, out.residual.pixels);
        const double score = std::abs(corr) / std::sqrt(norm2[idx]);
        if (score > best_score) {
          best_score = score;
          best = idx;
          best_corr = corr;
        }
      }
    }
    const std::size_t s = best / centres.size();
    const auto [r0, c0] = centres[best % centres.size()];
    const double coeff = best_corr / norm2[best];
    const double* cv = canvas[s].data();
    for (int r = 0; r < H; ++r) {
      const double* crow = cv + static_cast<std::size_t>(r + H - 1 - r0) * CW + (W - 1 - c0);
      for (int c = 0; c < W; ++c) out.residual.at(r, c) -= coeff * crow[c];
    }
    atoms.push_back(Atom::make(coeff, shapes[s].psi, img.pixel_center(r0, c0), shapes[s].sigma));
    out.selected.push_back(best);
    out.residual_energy.push_back(energy());
  }
  out.pattern = Pattern(std::move(atoms));
  return out;
}

Pattern matching_pursuit(const RasterImage& img, const DictionarySpec& dict, int n_atoms) {
  return matching_pursuit_detailed(img, dict, n_atoms).pattern;
}

std::string pattern_to_csv(const Pattern& p) {
  std::ostringstream os;
  os << "coeff,psi,tau_x,tau_y,sigma_x,sigma_y\n";
  for (const auto& a : p) {
    os << fmt17(a.coeff) << ',' << fmt17(a.psi) << ',' << fmt17(a.tau.x()) << ',' << fmt17(a.tau.y()) << ','
       << fmt17(a.sigma.x()) << ',' << fmt17(a.sigma.y()) << '\n';
  }
  return os.str();
}

Pattern pattern_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty pattern file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "coeff,psi,tau_x,tau_y,sigma_x,sigma_y") throw FormatError("unexpected pattern header '" + line + "'");
  std::vector<Atom> atoms;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> v;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        v.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw FormatError("malformed number on pattern line " + std::to_string(lineno));
      }
    }
    if (v.size() != 6) throw FormatError("pattern line " + std::to_string(lineno) + " needs 6 fields");
    try {
      atoms.push_back(Atom::make(v[0], v[1], Vec2(v[2], v[3]), Vec2(v[4], v[5])));
    } catch (const std::invalid_argument& e) {
      throw FormatError("pattern line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (atoms.empty()) throw FormatError("pattern file has no atoms");
  return Pattern(std::move(atoms));
}

void save_pattern_csv(const Pattern& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write '" + path + "'");
  out << pattern_to_csv(p);
}

Pattern load_pattern_csv(const std::string& path) { return pattern_from_csv(read_file(path)); }

}  // namespace atomreg

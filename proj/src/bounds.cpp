#include "atomreg/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "atomreg/distance.hpp"

namespace atomreg {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

Vec2 eigenvalues(const Mat2& m) {
  Eigen::SelfAdjointEigenSolver<Mat2> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

/// Maximizes fn(T) over unit directions: 64 samples in [0, pi) followed by a
/// golden section refinement around the best sample. fn must be even in T.
template <typename Fn>
double maximize_over_directions(Fn&& fn) {
  constexpr int kSamples = 64;
  auto at = [&](double theta) { return fn(Vec2(std::cos(theta), std::sin(theta))); };
  double best = -INFINITY;
  double best_theta = 0.0;
  for (int i = 0; i < kSamples; ++i) {
    const double theta = kPi * i / kSamples;
    const double v = at(theta);
    if (v > best) {
      best = v;
      best_theta = theta;
    }
  }
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = best_theta - kPi / kSamples;
  double hi = best_theta + kPi / kSamples;
  double x1 = hi - gr * (hi - lo);
  double x2 = lo + gr * (hi - lo);
  double f1 = at(x1);
  double f2 = at(x2);
  for (int it = 0; it < 60; ++it) {
    if (f1 > f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = at(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = at(x2);
    }
  }
  return std::max({best, f1, f2});
}

struct AxisTerms {
  double b_frak, c_frak, d_frak;
};

// Per-axis pieces of the Delta-h variance bound for atoms j, k.
AxisTerms axis_terms(double tj, double tk, double bj, double bk, double tb, double b) {
  const double s = bj + bk;
  const double m = (bj * tj + bk * tk) / s;
  const double bf = s * std::max(std::pow(b + tb - m, 2), std::pow(-b - tb - m, 2));
  const double shift = tb * bj / s;
  const double cf = s * std::max(std::pow(b + shift - m, 2), std::pow(-b - shift - m, 2));
  const double dt = tk - tj;
  const double df = bj * bk / s * std::max(std::pow(-tb + dt, 2), std::pow(tb + dt, 2));
  return {bf, cf, df};
}

double d_axis(double tj, double tk, double wj, double wk, double b) {
  const double s = wj + wk;
  const double h = -(wj * tj + wk * tk) / s;
  const double g = (wj * tj * tj + wk * tk * tk) / s;
  const double rs = std::sqrt(s);
  return std::sqrt(kPi) / (4.0 * b) / rs * std::exp(-s * (g - h * h)) *
         (std::erf(rs * (b + h)) - std::erf(rs * (-b + h)));
}

}  // namespace

const char* to_string(NoiseKind kind) {
  return kind == NoiseKind::GaussianAnalytic ? "gaussian-analytic" : "generic";
}

NoiseKind noise_kind_from_string(const std::string& name) {
  if (name == "gaussian-analytic" || name == "gaussian") return NoiseKind::GaussianAnalytic;
  if (name == "generic") return NoiseKind::Generic;
  throw std::invalid_argument("unknown noise kind '" + name + "'");
}

void NoiseSpec::validate() const {
  if (L < 1) throw std::invalid_argument("noise.L must be at least 1");
  if (!(epsilon > 0.0)) throw std::invalid_argument("noise.epsilon must be positive");
  if (!(b > 0.0)) throw std::invalid_argument("noise.b must be positive");
  if (!(eta >= 0.0)) throw std::invalid_argument("noise.eta must be nonnegative");
  if (!(nu >= 0.0)) throw std::invalid_argument("noise.nu must be nonnegative");
}

Mat2 curvature_matrix(const Pattern& p) {
  Mat2 r0 = Mat2::Zero();
  for (const auto& d : self_pairs(p)) {
    const double q = d.weight * d.kq * safe_exp(-d.c);
    const Vec2 v = d.sigma_inv * d.dtau;
    r0 += q * (d.sigma_inv - v * v.transpose());
  }
  return r0;
}

SecondDerivativeConstants second_derivative_constants(const Pattern& p) {
  const auto pairs = self_pairs(p);
  Mat2 r0m = Mat2::Zero();
  double r2p = 0.0;
  double r3 = 0.0;
  const double c3 = 5.46 / std::pow(2.0, 2.5);
  for (const auto& d : pairs) {
    const double q = d.weight * d.kq * safe_exp(-d.c);
    const Vec2 v = d.sigma_inv * d.dtau;
    r0m += q * (d.sigma_inv - v * v.transpose());
    const Vec2 ev = eigenvalues(d.sigma_inv);
    const double lmin = ev(0);
    const double lmax = ev(1);
    const double r2max = v.squaredNorm();  // largest eigenvalue of v v^T
    const double a_hi2 = 0.25 * lmax * lmax;
    const double a_lo2 = 0.25 * lmin * lmin;
    const double b2a = 0.125 * r2max * lmax;
    const double b4 = r2max * r2max / 16.0;
    if (d.kq > 0.0) {
      r2p += q * (-8.0 * b4 - 6.0 * a_hi2);
    } else if (d.kq < 0.0) {
      r2p += q * (24.0 * b2a - 6.0 * a_lo2);
    }
    r3 -= d.weight * c3 * d.abs_kq * std::pow(lmax, 2.5);
  }
  SecondDerivativeConstants out;
  out.r0 = eigenvalues(r0m)(0);
  out.r2 = std::min(r2p, 0.0);
  out.r3 = r3;
  if (!(out.r0 > 0.0)) {
    std::ostringstream msg;
    msg << "curvature matrix R0 is not positive definite (smallest eigenvalue " << out.r0 << ")";
    throw NumericError(msg.str());
  }
  return out;
}

double tbar0(double r0, double r2, double r3) {
  if (!(r0 > 0.0)) throw std::invalid_argument("r0 must be positive");
  const double den = 2.0 * std::abs(r2) + std::pow(2.0, 2.0 / 3.0) * std::cbrt(r0) * std::pow(std::abs(r3), 2.0 / 3.0);
  if (!(den > 0.0)) throw std::invalid_argument("r2 and r3 cannot both vanish");
  return std::sqrt(r0 / den);
}

double tbar0(const SecondDerivativeConstants& r) { return tbar0(r.r0, r.r2, r.r3); }

std::vector<NoiseAtomTerms> noise_atom_terms(const Pattern& p, double epsilon) {
  std::vector<NoiseAtomTerms> out;
  out.reserve(p.size());
  const double e2 = epsilon * epsilon;
  for (const auto& a : p) {
    const double sx2 = a.sigma.x() * a.sigma.x() + e2;
    const double sy2 = a.sigma.y() * a.sigma.y() + e2;
    const Mat2 r = a.rotation();
    NoiseAtomTerms t;
    t.phi = r * Vec2(1.0 / sx2, 1.0 / sy2).asDiagonal() * r.transpose();
    t.alpha = std::min(1.0 / sx2, 1.0 / sy2);
    t.beta = std::max(1.0 / sx2, 1.0 / sy2);
    t.kappa = kPi * a.scale_det() * e2 / std::sqrt(sx2 * sy2);
    out.push_back(t);
  }
  return out;
}

double var_dh_constant(const Pattern& p, const NoiseSpec& noise, double tb) {
  noise.validate();
  if (!(tb > 0.0)) throw std::invalid_argument("tbar0 must be positive");
  const auto terms = noise_atom_terms(p, noise.epsilon);
  const double b = noise.b;
  double sum = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    for (std::size_t k = 0; k < p.size(); ++k) {
      const double cc = p[j].coeff * p[k].coeff;
      if (cc == 0.0) continue;
      const auto& tj = terms[j];
      const auto& tk = terms[k];
      const Vec2& pj = p[j].tau;
      const Vec2& pk = p[k].tau;
      const double dist2 = (pk - pj).squaredNorm();
      const double sb = tj.beta + tk.beta;
      const double sa = tj.alpha + tk.alpha;
      const auto ax = axis_terms(pj.x(), pk.x(), tj.beta, tk.beta, tb, b);
      const auto ay = axis_terms(pj.y(), pk.y(), tj.beta, tk.beta, tb, b);
      const double weight = cc * tj.kappa * tk.kappa;
      if (cc > 0.0) {
        const double bbar = kPi / (4.0 * b * b * sa) * std::exp(-tj.alpha * tk.alpha * dist2 / sa);
        const double clow = std::exp(-ax.c_frak - ay.c_frak - ax.d_frak - ay.d_frak);
        const double dbar = d_axis(pj.x(), pk.x(), tj.alpha, tk.alpha, b) * d_axis(pj.y(), pk.y(), tj.alpha, tk.alpha, b);
        sum += weight * (bbar - 2.0 * clow + dbar);
      } else {
        const double blow = std::exp(-ax.b_frak - ay.b_frak - tj.beta * tk.beta * dist2 / sb);
        const double chigh = kPi / (4.0 * b * b * sa);
        const double dlow = d_axis(pj.x(), pk.x(), tj.beta, tk.beta, b) * d_axis(pj.y(), pk.y(), tj.beta, tk.beta, b);
        sum += weight * (blow - 2.0 * chigh + dlow);
      }
    }
  }
  return 4.0 * noise.L * sum;
}

double var_h2_constant(const Pattern& p, const NoiseSpec& noise, double tb) {
  noise.validate();
  if (!(tb > 0.0)) throw std::invalid_argument("tbar0 must be positive");
  const auto terms = noise_atom_terms(p, noise.epsilon);
  const double b = noise.b;
  const double b2x4 = 4.0 * b * b;
  const double lconst = (std::pow(3.0, 0.75) + std::pow(3.0, 1.25)) * std::exp(-std::sqrt(3.0) / 2.0) / 16.0 +
                        3.0 * std::sqrt(kPi) / std::pow(2.0, 4.5);
  const double nconst = std::exp(-0.5) / 4.0 + std::sqrt(kPi) / std::pow(2.0, 2.5);
  std::vector<double> e_bar(p.size());
  std::vector<double> f_bar(p.size());
  for (std::size_t j = 0; j < p.size(); ++j) {
    const double a = terms[j].alpha;
    const double lbar = lconst / std::pow(a, 2.5);
    const double mbar = std::sqrt(kPi / (2.0 * a));
    const double nbar = nconst / std::pow(a, 1.5);
    e_bar[j] = std::pow(terms[j].beta, 4) / b2x4 * (2.0 * lbar * mbar + 2.0 * nbar * nbar);
    f_bar[j] = mbar * mbar / b2x4;
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    for (std::size_t k = 0; k < p.size(); ++k) {
      const double cc = p[j].coeff * p[k].coeff;
      if (cc == 0.0) continue;
      const auto& tj = terms[j];
      const auto& tk = terms[k];
      const double dist2 = (p[k].tau - p[j].tau).squaredNorm();
      const double weight = cc * tj.kappa * tk.kappa;
      if (cc > 0.0) {
        const double sa = tj.alpha + tk.alpha;
        const double bbar = kPi / (b2x4 * sa) * std::exp(-tj.alpha * tk.alpha * dist2 / sa);
        sum += weight * (16.0 * std::sqrt(e_bar[j] * e_bar[k]) + 4.0 * tj.beta * tk.beta * bbar);
      } else {
        const double sb = tj.beta + tk.beta;
        const auto ax = axis_terms(p[j].tau.x(), p[k].tau.x(), tj.beta, tk.beta, tb, b);
        const auto ay = axis_terms(p[j].tau.y(), p[k].tau.y(), tj.beta, tk.beta, tb, b);
        const double blow = std::exp(-ax.b_frak - ay.b_frak - tj.beta * tk.beta * dist2 / sb);
        sum += weight * (-8.0 * tk.beta * std::sqrt(e_bar[j] * f_bar[k]) - 8.0 * tj.beta * std::sqrt(f_bar[j] * e_bar[k]) +
                         4.0 * tj.alpha * tk.alpha * blow);
      }
    }
  }
  return 4.0 * noise.L * sum;
}

double second_derivative_norm_sq(const Pattern& p, const Vec2& T) {
  const DirectionalProfile prof(p, T);
  double sum = 0.0;
  for (const auto& e : prof.entries()) {
    const double b2 = e.b * e.b;
    sum += e.weight * 0.5 * e.kq * safe_exp(-e.c) * (16.0 * b2 * b2 - 48.0 * e.a * b2 + 12.0 * e.a * e.a);
  }
  return std::max(0.0, sum);
}

double var_h2_constant_sharp(const Pattern& p, const NoiseSpec& noise) {
  noise.validate();
  // Noise-filtered pattern: atom k becomes c_k kappa_k exp(-(x - tau_k)^T Phi_k (x - tau_k)).
  const auto terms = noise_atom_terms(p, noise.epsilon);
  std::vector<Atom> atoms;
  atoms.reserve(p.size());
  const double e2 = noise.epsilon * noise.epsilon;
  for (std::size_t k = 0; k < p.size(); ++k) {
    Atom a = p[k];
    a.coeff *= terms[k].kappa;
    a.sigma = Vec2(std::sqrt(a.sigma.x() * a.sigma.x() + e2), std::sqrt(a.sigma.y() * a.sigma.y() + e2));
    atoms.push_back(a);
  }
  const Pattern filtered(std::move(atoms));
  const double m = maximize_over_directions([&](const Vec2& T) { return second_derivative_norm_sq(filtered, T); });
  return noise.L / (noise.b * noise.b) * m;
}

double mean_deviation(const NoiseSpec& noise) {
  return 0.5 * kPi * noise.L * noise.eta * noise.eta * noise.epsilon * noise.epsilon;
}

double second_derivative_norm_bound(const Pattern& p) {
  if (p.is_zero()) return 0.0;
  const double m = maximize_over_directions([&](const Vec2& T) { return second_derivative_norm_sq(p, T); });
  return 1.05 * std::sqrt(m);
}

double correlation_bound(const Pattern& p, const Pattern& z, double t_max) {
  if (!(t_max >= 0.0)) throw std::invalid_argument("t_max must be nonnegative");
  if (p.is_zero() || z.is_zero()) return 0.0;
  // <p(. + u), z> = <z, p(. - (-u))>.
  const CrossTable table(z, p);
  auto corr = [&](const Vec2& u) { return std::abs(table.correlation(-u)); };
  double min_scale = INFINITY;
  for (const auto& a : p) min_scale = std::min({min_scale, a.sigma.x(), a.sigma.y()});
  for (const auto& a : z) min_scale = std::min({min_scale, a.sigma.x(), a.sigma.y()});
  int n = static_cast<int>(std::ceil(2.0 * t_max / (0.5 * min_scale)));
  n = std::clamp(n, 1, 400);
  const double h = n > 0 ? 2.0 * t_max / n : 0.0;
  struct Cand {
    double v;
    Vec2 u;
  };
  std::vector<Cand> cands;
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      const Vec2 u(-t_max + i * h, -t_max + j * h);
      if (u.norm() > t_max + 1e-12) continue;
      cands.push_back({corr(u), u});
    }
  }
  cands.push_back({corr(Vec2::Zero()), Vec2::Zero()});
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) { return a.v > b.v; });
  double best = cands.front().v;
  const std::size_t n_refine = std::min<std::size_t>(8, cands.size());
  for (std::size_t c = 0; c < n_refine; ++c) {
    Vec2 u = cands[c].u;
    double v = cands[c].v;
    double step = h > 0.0 ? h : 0.1;
    // Compass search restricted to the disc.
    while (step > 1e-9) {
      bool improved = false;
      for (const Vec2& d : {Vec2(1, 0), Vec2(-1, 0), Vec2(0, 1), Vec2(0, -1)}) {
        const Vec2 cand = u + step * d;
        if (cand.norm() > t_max) continue;
        const double cv = corr(cand);
        if (cv > v) {
          v = cv;
          u = cand;
          improved = true;
        }
      }
      if (!improved) step *= 0.5;
    }
    best = std::max(best, v);
  }
  return 1.02 * best;
}

GenericBound generic_bound(double r0, double tbar, double rp, double rp2, double nu, bool two_sided) {
  GenericBound out;
  const double k = two_sided ? 2.0 : 1.0;
  out.nu0 = tbar * tbar * r0 / (k * 8.0 * rp + k * 2.0 * rp2 * tbar * tbar);
  const double den = r0 - k * 2.0 * rp2 * nu;
  if (nu > out.nu0) {
    out.diagnostic = "noise norm nu = " + fmt(nu) + " exceeds the admissible level nu0 = " + fmt(out.nu0);
  } else if (!(den > 0.0)) {
    out.diagnostic = "nonpositive denominator r0 - 2 R_p'' nu";
  } else {
    out.ru0 = std::sqrt(k * 8.0 * rp * nu / den);
  }
  return out;
}

GenericBound generic_bound(const Pattern& p, double nu, bool two_sided) {
  const auto r = second_derivative_constants(p);
  return generic_bound(r.r0, tbar0(r), pattern_norm(p), second_derivative_norm_bound(p), nu, two_sided);
}

UncorrelatedBound uncorrelated_bound(double r0, double tbar, double rp2, double rpz, double nu) {
  const double threshold = tbar * tbar * r0 / 8.0;
  if (!(rpz < threshold)) {
    std::ostringstream msg;
    msg << "correlation bound r_pz = " << rpz << " is not below the threshold tbar0^2 r0 / 8 = " << threshold;
    throw NumericError(msg.str());
  }
  UncorrelatedBound out;
  out.rpz = rpz;
  out.nu0 = (tbar * tbar * r0 - 8.0 * rpz) / (2.0 * rp2 * tbar * tbar);
  const double den = r0 - 2.0 * rp2 * nu;
  if (nu > out.nu0) {
    out.diagnostic = "noise norm nu = " + fmt(nu) + " exceeds the admissible level nu0 = " + fmt(out.nu0);
  } else if (!(den > 0.0)) {
    out.diagnostic = "nonpositive denominator r0 - 2 R_p'' nu";
  } else {
    out.qu0 = std::sqrt(8.0 * rpz / den);
  }
  return out;
}

UncorrelatedBound uncorrelated_bound(const Pattern& p, const Pattern& z, double nu, double t_max) {
  const auto r = second_derivative_constants(p);
  return uncorrelated_bound(r.r0, tbar0(r), second_derivative_norm_bound(p), correlation_bound(p, z, t_max), nu);
}

BoundReport gaussian_bound(const Pattern& p, const NoiseSpec& noise, double s, bool two_sided, bool sharpened) {
  noise.validate();
  if (!(s > std::sqrt(2.0))) throw std::invalid_argument("probability parameter s must exceed sqrt(2)");
  BoundReport rep;
  const auto r = second_derivative_constants(p);
  rep.r0_lb = r.r0;
  rep.r2_lb = r.r2;
  rep.r3_lb = r.r3;
  rep.tbar0 = tbar0(r);
  rep.c_var_dh = var_dh_constant(p, noise, rep.tbar0);
  rep.c_var_h2 = var_h2_constant(p, noise, rep.tbar0);
  rep.c_var_h2_sharp = var_h2_constant_sharp(p, noise);
  rep.s = s;
  rep.eta = noise.eta;
  rep.probability = 1.0 - 2.0 / (s * s);
  rep.two_sided = two_sided;
  rep.sharpened = sharpened;
  double cdh = rep.c_var_dh;
  double ch2 = sharpened ? rep.c_var_h2_sharp : rep.c_var_h2;
  if (cdh < 0.0) {
    rep.diagnostics.push_back("variance constant C_dh is negative; clamped to 0");
    cdh = 0.0;
  }
  if (ch2 < 0.0) {
    rep.diagnostics.push_back("variance constant C_h2 is negative; clamped to 0");
    ch2 = 0.0;
  }
  const double side = two_sided ? std::sqrt(2.0) : 1.0;
  const double c_dh = side * std::sqrt(cdh);
  const double c_h2 = side * std::sqrt(ch2);
  const double t2 = rep.tbar0 * rep.tbar0;
  rep.eta0 = t2 * rep.r0_lb / (2.0 * s * c_dh + t2 * s * c_h2);
  const double r_dh = c_dh * noise.eta;
  const double r_h2 = c_h2 * noise.eta;
  const double den = rep.r0_lb - s * r_h2;
  if (noise.eta > rep.eta0) {
    rep.diagnostics.push_back("noise level eta = " + fmt(noise.eta) + " exceeds the admissible level eta0 = " +
                              fmt(rep.eta0));
  } else if (!(den > 0.0)) {
    rep.diagnostics.push_back("nonpositive denominator r0 - s R_h2");
  } else {
    rep.rt0 = std::sqrt(2.0 * s * r_dh / den);
  }
  return rep;
}

void add_generic_bounds(BoundReport& rep, const Pattern& p, double nu, const Pattern* z, double t_max) {
  rep.rp = pattern_norm(p);
  rep.rp2 = second_derivative_norm_bound(p);
  rep.nu = nu;
  const auto g = generic_bound(rep.r0_lb, rep.tbar0, rep.rp, rep.rp2, nu, rep.two_sided);
  rep.nu0 = g.nu0;
  rep.ru0 = g.ru0;
  if (!g.diagnostic.empty()) rep.diagnostics.push_back(g.diagnostic);
  if (z != nullptr) {
    const double rpz = correlation_bound(p, *z, t_max);
    rep.rpz = rpz;
    try {
      const auto u = uncorrelated_bound(rep.r0_lb, rep.tbar0, rep.rp2, rpz, nu);
      rep.nu0_uncorrelated = u.nu0;
      rep.qu0 = u.qu0;
      if (!u.diagnostic.empty()) rep.diagnostics.push_back(u.diagnostic);
    } catch (const NumericError& e) {
      rep.diagnostics.push_back(e.what());
    }
  }
}

std::string BoundReport::to_text() const {
  std::ostringstream os;
  auto line = [&](const char* key, const std::string& v) { os << key << " = " << v << '\n'; };
  line("r0_lb", fmt(r0_lb));
  line("r2_lb", fmt(r2_lb));
  line("r3_lb", fmt(r3_lb));
  line("tbar0", fmt(tbar0));
  line("c_var_dh", fmt(c_var_dh));
  line("c_var_h2", fmt(c_var_h2));
  line("c_var_h2_sharp", fmt(c_var_h2_sharp));
  line("s", fmt(s));
  line("probability", fmt(probability));
  line("two_sided", two_sided ? "true" : "false");
  line("sharpened", sharpened ? "true" : "false");
  line("eta", fmt(eta));
  line("eta0", fmt(eta0));
  line("rt0", rt0 ? fmt(*rt0) : "undefined");
  line("rp", fmt(rp));
  line("rp2", fmt(rp2));
  line("nu", fmt(nu));
  line("nu0", fmt(nu0));
  line("ru0", ru0 ? fmt(*ru0) : "undefined");
  line("rpz", rpz ? fmt(*rpz) : "undefined");
  line("nu0_uncorrelated", nu0_uncorrelated ? fmt(*nu0_uncorrelated) : "undefined");
  line("qu0", qu0 ? fmt(*qu0) : "undefined");
  for (const auto& d : diagnostics) line("diagnostic", d);
  return os.str();
}

std::string BoundReport::csv_header() {
  return "r0_lb,r2_lb,r3_lb,tbar0,c_var_dh,c_var_h2,c_var_h2_sharp,s,probability,two_sided,sharpened,eta,eta0,rt0,"
         "rp,rp2,nu,nu0,ru0,rpz,nu0_uncorrelated,qu0";
}

std::string BoundReport::csv_row() const {
  std::ostringstream os;
  os << fmt(r0_lb) << ',' << fmt(r2_lb) << ',' << fmt(r3_lb) << ',' << fmt(tbar0) << ',' << fmt(c_var_dh) << ','
     << fmt(c_var_h2) << ',' << fmt(c_var_h2_sharp) << ',' << fmt(s) << ',' << fmt(probability) << ','
     << (two_sided ? 1 : 0) << ',' << (sharpened ? 1 : 0) << ',' << fmt(eta) << ',' << fmt(eta0) << ',' << fmt(rt0)
     << ',' << fmt(rp) << ',' << fmt(rp2) << ',' << fmt(nu) << ',' << fmt(nu0) << ',' << fmt(ru0) << ','
     << fmt(rpz) << ',' << fmt(nu0_uncorrelated) << ',' << fmt(qu0);
  return os.str();
}

}  // namespace atomreg

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "atomreg/experiments.hpp"
#include "atomreg/ingestion.hpp"
#include "atomreg/registration.hpp"

using namespace atomreg;

namespace {

enum Exit { kOk = 0, kConfigError = 1, kNumericError = 2 };

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> threads;
  bool show_config = false;
  std::map<std::string, std::string> keys;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--config", f.config_path, "key = value config file");
  app->add_option("--seed", f.seed, "root seed");
  app->add_option("--out", f.out, "output path (stdout when omitted)");
  app->add_option("--threads", f.threads, "worker threads");
  app->add_flag("--show-config", f.show_config, "print the effective config and exit");
  for (const auto& key : config_keys()) {
    if (key == "seed" || key == "out" || key == "threads") continue;
    app->add_option_function<std::string>(
        "--" + key, [&f, key](const std::string& v) { f.keys[key] = v; }, "config key " + key);
  }
}

SweepConfig resolve(Subcommand cmd, const CommonFlags& f) {
  SweepConfig cfg = default_config(cmd);
  if (!f.config_path.empty()) cfg.apply_file(f.config_path);
  if (f.seed) cfg.seed = *f.seed;
  if (f.out) cfg.out = *f.out;
  if (f.threads) cfg.threads = *f.threads;
  for (const auto& [k, v] : f.keys) cfg.set(k, v);
  cfg.validate();
  return cfg;
}

void emit(const SweepConfig& cfg, const std::string& text) {
  if (cfg.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(cfg.out, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + cfg.out + "'");
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian-atom image registration toolkit"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::map<Subcommand, CLI::App*> subs;
  auto add_sub = [&](Subcommand cmd, const char* help) {
    CLI::App* s = app.add_subcommand(to_string(cmd), help);
    add_common(s, flags);
    subs[cmd] = s;
    return s;
  };
  add_sub(Subcommand::SidenSweep, "estimated vs true SIDEN radius over filter sizes");
  add_sub(Subcommand::ErrorSweep, "alignment error and bounds over filter sizes and noise levels");
  add_sub(Subcommand::GridCount, "grid size over filter sizes");
  add_sub(Subcommand::Bounds, "every bound constant for one pattern and noise model");

  std::string reference_path;
  std::string target_path;
  CLI::App* reg = add_sub(Subcommand::Register, "register two pattern files");
  reg->add_option("--reference", reference_path, "reference pattern CSV")->required();
  reg->add_option("--target", target_path, "target pattern CSV")->required();

  std::string input_path;
  int n_atoms = 20;
  std::optional<double> extent;
  std::string input_format;
  CLI::App* dec = add_sub(Subcommand::Decompose, "matching pursuit decomposition of a raster");
  dec->add_option("--input", input_path, "PGM or CSV raster")->required();
  dec->add_option("--atoms", n_atoms, "number of atoms");
  dec->add_option("--extent", extent, "half-width of the raster support");
  dec->add_option("--format", input_format, "pgm or csv (default: from the extension)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  Subcommand cmd = Subcommand::SidenSweep;
  for (const auto& [c, s] : subs) {
    if (s->parsed()) cmd = c;
  }

  try {
    const SweepConfig cfg = resolve(cmd, flags);
    if (flags.show_config) {
      std::cout << cfg.to_text();
      return kOk;
    }
    switch (cmd) {
      case Subcommand::SidenSweep:
        emit(cfg, run_siden_sweep(cfg));
        break;
      case Subcommand::ErrorSweep:
        emit(cfg, run_error_sweep(cfg));
        break;
      case Subcommand::GridCount:
        emit(cfg, run_grid_count(cfg));
        break;
      case Subcommand::Bounds: {
        const BoundsOutput b = run_bounds_report(cfg);
        if (cfg.out.empty()) {
          std::cout << b.text << b.csv;
        } else {
          std::cout << b.text;
          emit(cfg, b.csv);
        }
        break;
      }
      case Subcommand::Register: {
        Pattern p;
        Pattern q;
        try {
          p = load_pattern_csv(reference_path);
          q = load_pattern_csv(target_path);
        } catch (const FormatError& e) {
          throw ConfigError(e.what());
        }
        TwoStageOptions opts;
        opts.t_range = cfg.effective_t_range();
        opts.n_directions = cfg.n_directions;
        const RegistrationResult r = multiscale_register(p, q, cfg.rho_list, opts);
        std::string text = "stage,rho,est_tx,est_ty\n";
        for (std::size_t i = 0; i < r.stage_trace.size(); ++i) {
          text += std::to_string(i) + ',' + format_number(r.stage_trace[i].first) + ',' +
                  format_number(r.stage_trace[i].second.x()) + ',' + format_number(r.stage_trace[i].second.y()) +
                  '\n';
        }
        text += "# distance = " + format_number(r.distance_value) + ", iterations = " +
                std::to_string(r.iterations) + ", converged = " + (r.converged ? "true" : "false") + '\n';
        emit(cfg, text);
        break;
      }
      case Subcommand::Decompose: {
        RasterImage img;
        try {
          img = input_format.empty() ? load_raster(input_path, extent)
                                     : load_raster(input_path, raster_format_from_string(input_format), extent);
        } catch (const FormatError& e) {
          throw ConfigError(e.what());
        }
        const auto mp = matching_pursuit_detailed(img, default_dictionary(img.extent), n_atoms);
        if (mp.degenerate) std::cerr << "warning: image has no energy; atoms have zero coefficients\n";
        emit(cfg, pattern_to_csv(mp.pattern));
        break;
      }
    }
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kNumericError;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  return kOk;
}

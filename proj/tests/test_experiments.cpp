#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <sstream>

#include "atomreg/experiments.hpp"
#include "atomreg/ingestion.hpp"

using namespace atomreg;
namespace fs = std::filesystem;

namespace {

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

std::string unit_pattern_file() {
  const fs::path path = fs::temp_directory_path() / "atomreg_experiments_unit.csv";
  save_pattern_csv(Pattern({Atom::make(1.0, 0.0, Vec2::Zero(), Vec2(1, 1))}), path.string());
  return path.string();
}

SweepConfig small_siden() {
  SweepConfig c = default_config(Subcommand::SidenSweep);
  c.random.atoms = 10;
  c.trials = 6;
  c.rho_list = {0.0, 1.0, 2.0};
  c.n_directions = 16;
  return c;
}

}  // namespace

TEST(Config, ParsesTextWithComments) {
  SweepConfig c;
  c.apply_text("# comment\n\nseed = 42\nsweep.rho_list = 0, 1.5 ,3\nnoise.kind = generic\nt_range = 2.5\n"
               "bound.two_sided = true\n");
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.rho_list, (std::vector<double>{0.0, 1.5, 3.0}));
  EXPECT_EQ(c.noise.kind, NoiseKind::Generic);
  EXPECT_EQ(c.effective_t_range(), 2.5);
  EXPECT_TRUE(c.two_sided);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  SweepConfig c;
  EXPECT_THROW(c.set("no.such.key", "1"), ConfigError);
  EXPECT_THROW(c.set("seed", "abc"), ConfigError);
  EXPECT_THROW(c.set("sweep.trials", "1.5"), ConfigError);
  EXPECT_THROW(c.set("bound.two_sided", "maybe"), ConfigError);
  EXPECT_THROW(c.apply_text("seed 3\n"), ConfigError);
}

TEST(Config, ValidationFailures) {
  auto bad = [](const std::string& key, const std::string& value) {
    SweepConfig c;
    c.set(key, value);
    EXPECT_THROW(c.validate(), ConfigError) << key;
  };
  bad("threads", "0");
  bad("grid.n_directions", "7");
  bad("bound.s", "1.2");
  bad("noise.L", "0");
  bad("sweep.trials", "0");
  bad("pattern.source", "file");
  SweepConfig ok;
  EXPECT_NO_THROW(ok.validate());
}

TEST(Config, TextRoundTrip) {
  SweepConfig c = default_config(Subcommand::ErrorSweep);
  c.set("sweep.eta_list", "0.1,0.30000000000000004");
  c.set("noise.b", "2.75");
  const std::string text = c.to_text();
  SweepConfig d;
  d.apply_text(text);
  EXPECT_EQ(d.to_text(), text);
  EXPECT_EQ(d.eta_list, c.eta_list);
  for (const auto& key : config_keys()) EXPECT_NE(text.find(key + " = "), std::string::npos) << key;
}

TEST(Config, AutoRangesFollowThePatternSource) {
  SweepConfig c;
  EXPECT_EQ(c.effective_t_range(), 4.0);
  EXPECT_EQ(c.effective_noise().b, 4.0);
  c.set("pattern.source", "face");
  EXPECT_EQ(c.effective_t_range(), 1.0);
  EXPECT_EQ(c.effective_noise().b, 1.0);
  c.set("noise.b", "3");
  EXPECT_EQ(c.effective_noise().b, 3.0);
}

TEST(Config, SubcommandDefaults) {
  EXPECT_EQ(default_config(Subcommand::SidenSweep).random.atoms, 40);
  EXPECT_EQ(default_config(Subcommand::SidenSweep).trials, 300);
  EXPECT_EQ(default_config(Subcommand::ErrorSweep).random.atoms, 20);
  EXPECT_STREQ(to_string(Subcommand::GridCount), "grid-count");
  EXPECT_STREQ(to_string(Subcommand::ErrorSweep), "error-sweep");
}

TEST(RandomPattern, RespectsRanges) {
  RandomPatternSpec s;
  s.atoms = 200;
  const Pattern p = random_pattern(s, 5, 0);
  ASSERT_EQ(p.size(), 200u);
  for (const auto& a : p) {
    EXPECT_GE(a.coeff, -1.0);
    EXPECT_LE(a.coeff, 1.0);
    EXPECT_LE(std::abs(a.tau.x()), 4.0);
    EXPECT_LE(std::abs(a.tau.y()), 4.0);
    EXPECT_GE(std::min(a.sigma.x(), a.sigma.y()), 0.3);
    EXPECT_LE(std::max(a.sigma.x(), a.sigma.y()), 2.0);
    EXPECT_GE(a.psi, 0.0);
    EXPECT_LT(a.psi, std::numbers::pi);
  }
  EXPECT_EQ(pattern_to_csv(random_pattern(s, 5, 0)), pattern_to_csv(p));
  EXPECT_NE(pattern_to_csv(random_pattern(s, 5, 1)), pattern_to_csv(p));
}

TEST(ReferencePattern, Sources) {
  SweepConfig c;
  c.random.atoms = 7;
  EXPECT_EQ(reference_pattern(c, 0).size(), 7u);
  EXPECT_NE(pattern_to_csv(reference_pattern(c, 0)), pattern_to_csv(reference_pattern(c, 1)));
  c.set("pattern.source", "file");
  c.set("pattern.file", unit_pattern_file());
  EXPECT_EQ(reference_pattern(c, 3).size(), 1u);
}

TEST(ParallelFor, CoversEveryIndexAndRethrows) {
  std::vector<std::atomic<int>> hits(100);
  parallel_for(100, 3, [&](int i) { hits[i]++; });
  for (auto& h : hits) EXPECT_EQ(h.load(), 1);
  EXPECT_THROW(parallel_for(10, 2,
                            [](int i) {
                              if (i == 5) throw NumericError("boom");
                            }),
               NumericError);
}

TEST(SidenSweep, DeterministicAndThreadIndependent) {
  SweepConfig c = small_siden();
  const std::string a = run_siden_sweep(c);
  EXPECT_EQ(run_siden_sweep(c), a);
  c.threads = 2;
  EXPECT_EQ(run_siden_sweep(c), a);
  const auto rows = parse_csv(a);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"rho", "mean_delta_hat", "mean_omega_hat", "n_valid"}));
}

TEST(SidenSweep, EstimateNeverExceedsTrueBoundary) {
  const auto trials = siden_sweep_trials(small_siden());
  for (const auto& t : trials) {
    for (std::size_t i = 0; i < t.delta_hat.size(); ++i) {
      if (t.omega_hat[i]) EXPECT_LE(t.delta_hat[i], *t.omega_hat[i]);
    }
  }
}

TEST(SidenSweep, SingleAtomHasNoValidTrials) {
  SweepConfig c = small_siden();
  c.set("pattern.source", "file");
  c.set("pattern.file", unit_pattern_file());
  const auto rows = parse_csv(run_siden_sweep(c));
  ASSERT_EQ(rows.size(), 4u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i][3], "0");
    EXPECT_EQ(rows[i][2], "");
    EXPECT_GT(std::stod(rows[i][1]), 0.0);
  }
}

TEST(ErrorSweep, NoiselessRunsAreExactWithZeroBound) {
  SweepConfig c = default_config(Subcommand::ErrorSweep);
  c.patterns = 2;
  c.trials = 2;
  c.rho_list = {0.0, 1.0};
  c.eta_list = {0.0};
  const auto rows = parse_csv(run_error_sweep(c));
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0][1], "eta");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_LT(std::stod(rows[i][2]), 1e-3);
    EXPECT_EQ(std::stod(rows[i][3]), 0.0);
    EXPECT_EQ(rows[i][5], "4");
  }
}

TEST(ErrorSweep, CommonNoiseDrawAcrossLevels) {
  SweepConfig c = default_config(Subcommand::ErrorSweep);
  c.patterns = 1;
  c.trials = 2;
  c.rho_list = {1.0};
  c.eta_list = {0.0, 0.02};
  const auto recs = error_sweep_records(c);
  ASSERT_EQ(recs.size(), 4u);
  EXPECT_EQ(recs[0].truth, recs[2].truth);
  EXPECT_EQ(recs[1].truth, recs[3].truth);
  EXPECT_EQ(recs[0].level, 0.0);
  EXPECT_EQ(recs[2].level, 0.02);
  c.threads = 2;
  const auto again = error_sweep_records(c);
  for (std::size_t i = 0; i < recs.size(); ++i) EXPECT_EQ(recs[i].estimate, again[i].estimate);
}

TEST(ErrorSweep, GenericNoiseColumns) {
  SweepConfig c = default_config(Subcommand::ErrorSweep);
  c.set("noise.kind", "generic");
  c.patterns = 1;
  c.trials = 2;
  c.rho_list = {1.0};
  c.nu_list = {0.0, 0.01};
  const auto rows = parse_csv(run_error_sweep(c));
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0][1], "nu");
  EXPECT_LT(std::stod(rows[1][2]), 1e-3);
}

TEST(GridCount, PositiveAndNonIncreasing) {
  SweepConfig c = default_config(Subcommand::GridCount);
  c.patterns = 2;
  c.n_directions = 32;
  const auto rows = parse_csv(run_grid_count(c));
  ASSERT_EQ(rows.size(), c.rho_list.size() + 1);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"rho", "grid_points", "product"}));
  double prev = 1e300;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double n = std::stod(rows[i][1]);
    const double rho = std::stod(rows[i][0]);
    EXPECT_GT(n, 0.0);
    EXPECT_LE(n, prev);
    EXPECT_NEAR(std::stod(rows[i][2]), n * (1 + rho * rho), 1e-9 * n * (1 + rho * rho));
    prev = n;
  }
}

TEST(BoundsReport, SingleAtom) {
  SweepConfig c = default_config(Subcommand::Bounds);
  c.set("pattern.source", "file");
  c.set("pattern.file", unit_pattern_file());
  c.rho_list = {0.0};
  const BoundsOutput out = run_bounds_report(c);
  EXPECT_NE(out.text.find("r0_lb = " + format_number(std::numbers::pi)), std::string::npos) << out.text;
  const auto rows = parse_csv(out.csv);
  ASSERT_EQ(rows.size(), 2u);
}

TEST(BoundsReport, TwoSidedShrinksEta0) {
  SweepConfig c = default_config(Subcommand::Bounds);
  c.set("pattern.source", "file");
  c.set("pattern.file", unit_pattern_file());
  c.rho_list = {0.0};
  const BoundReport one = gaussian_bound(reference_pattern(c, 0), c.effective_noise());
  const BoundReport two = gaussian_bound(reference_pattern(c, 0), c.effective_noise(), 2.0, true);
  EXPECT_NEAR(two.eta0, one.eta0 / std::sqrt(2.0), 1e-12 * one.eta0);
  c.two_sided = true;
  EXPECT_NE(run_bounds_report(c).text.find("eta0 = " + format_number(two.eta0)), std::string::npos);
}

TEST(FormatNumber, TwelveSignificantDigits) {
  EXPECT_EQ(format_number(1.0), "1");
  EXPECT_EQ(format_number(std::numbers::pi), "3.14159265359");
  EXPECT_EQ(format_number(1e-20), "1e-20");
}

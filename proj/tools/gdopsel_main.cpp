// gdopsel command-line front end: Monte-Carlo runs, GDOP heat maps and
// trial-file statistics.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gdopsel/gdopsel.hpp"

namespace {

bool log_verbose() {
  const char* v = std::getenv("GDOPSEL_LOG");
  return v != nullptr && std::string(v) == "debug";
}

std::vector<gdopsel::Strategy> parse_strategies(const std::string& csv) {
  std::vector<gdopsel::Strategy> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(gdopsel::parse_strategy(item));
  }
  if (out.empty()) throw std::invalid_argument("no strategies given");
  return out;
}

int cmd_run(const gdopsel::ExperimentConfig& cfg) {
  using namespace gdopsel;
  const auto reports = run_experiment(cfg);
  if (!cfg.out_dir.empty()) write_outputs(cfg, reports);

  std::map<Strategy, int> skipped;
  for (const auto& r : reports)
    if (r.skipped) ++skipped[r.strategy];

  const auto errors = errors_by_strategy(reports);
  std::printf("scenario=%s trials=%d n=%d backend=%s seed=%llu\n", scenario_kind_name(cfg.kind),
              cfg.trials, cfg.n_select, cfg.backend == ToaBackend::abstract_model ? "abstract" : "signal",
              (unsigned long long)cfg.master_seed);
  std::printf("%-10s %8s %8s %12s %12s\n", "strategy", "n", "skipped", "p50_m", "p90_m");
  for (Strategy s : cfg.strategies) {
    auto it = errors.find(s);
    const int n = it == errors.end() ? 0 : int(it->second.size());
    const double p50 = n ? percentile(it->second, 0.5) : 0.0;
    const double p90 = n ? percentile(it->second, 0.9) : 0.0;
    std::printf("%-10s %8d %8d %12.4f %12.4f\n", strategy_name(s), n,
                skipped.count(s) ? skipped[s] : 0, p50, p90);
  }
  if (!cfg.out_dir.empty()) std::printf("wrote %s/trials.csv and cdf_<strategy>.csv\n", cfg.out_dir.c_str());
  return 0;
}

int cmd_gdop_map(const std::string& scenario_file, double grid_step, const std::string& out_csv) {
  using namespace gdopsel;
  const Scenario sc = read_scenario(scenario_file);
  std::ofstream os(out_csv);
  if (!os) throw io_error("gdop-map: cannot open " + out_csv);
  os << "x,y,gdop\n";

  std::vector<Point2> positions;
  for (const auto& b : sc.bss) positions.push_back(b.position);

  char buf[96];
  for (double y = sc.bounds.min_y; y <= sc.bounds.max_y + 1e-12; y += grid_step) {
    for (double x = sc.bounds.min_x; x <= sc.bounds.max_x + 1e-12; x += grid_step) {
      const Point2 p{x, y};
      // Reference rule: nearest station to the evaluation point.
      std::size_t ref = 0;
      for (std::size_t i = 1; i < positions.size(); ++i)
        if (distance(positions[i], p) < distance(positions[ref], p)) ref = i;
      double value;
      try {
        value = gdop(design_matrix(positions, ref, p));
      } catch (const error&) {
        value = kGdopUndefined;
      }
      std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g\n", x, y, value);
      os << buf;
    }
  }
  return 0;
}

int cmd_stats(const std::string& in_csv, double p) {
  using namespace gdopsel;
  const auto errors = read_trials_errors(in_csv);
  std::printf("strategy,n,p%g_m\n", 100.0 * p);
  for (const auto& [name, errs] : errors) {
    if (errs.empty()) continue;
    std::printf("%s,%zu,%.9g\n", name.c_str(), errs.size(), percentile(errs, p));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace gdopsel;

  CLI::App app{"TDOA positioning experiments with GDOP-based base-station selection"};
  app.require_subcommand(1);

  // --- run ---
  auto* run = app.add_subcommand("run", "run a Monte-Carlo selection experiment");
  std::string scenario = "ioo", strategies = "gdop,distance,random", backend = "abstract";
  ExperimentConfig cfg;
  int n_los = -1;
  double nlos_bias = -1.0;
  bool no_line_search = false;
  run->add_option("--scenario", scenario, "deployment: umi or ioo")->check(CLI::IsMember({"umi", "ioo"}));
  run->add_option("--trials", cfg.trials, "number of Monte-Carlo trials");
  run->add_option("--n-bs", cfg.n_select, "stations used per position fix (>= 4)");
  run->add_option("--strategies", strategies, "comma list from gdop,distance,random");
  run->add_option("--backend", backend, "toa backend: abstract or signal")->check(CLI::IsMember({"abstract", "signal"}));
  run->add_option("--seed", cfg.master_seed, "master seed");
  run->add_option("--out", cfg.out_dir, "output directory for trials.csv and CDFs");
  run->add_option("--n-los", n_los, "LOS stations per trial (default 5)");
  std::string los_model = "nearest";
  run->add_option("--los-model", los_model, "LOS assignment: nearest or uniform")
      ->check(CLI::IsMember({"nearest", "uniform"}));
  run->add_option("--n-scatterers", cfg.n_scatterers, "scatterers per trial");
  run->add_option("--sigma-tdoa", cfg.noise.sigma_tdoa_m, "LOS ranging error std, metres");
  run->add_option("--nlos-bias", nlos_bias, "mean NLOS excess range, metres (default: 5 umi, 2 ioo)");
  run->add_option("--stations", cfg.n_bs, "UMi station count");
  run->add_option("--min-spacing", cfg.min_spacing_m, "UMi pairwise Chebyshev spacing, metres");
  run->add_option("--mu", cfg.solver.mu, "descent step scale");
  run->add_option("--max-iters", cfg.solver.max_iters, "descent iteration cap");
  run->add_option("--grad-tol", cfg.solver.grad_tol, "gradient-norm stop tolerance, metres");
  run->add_option("--step-tol", cfg.solver.step_tol, "step-size stop tolerance, metres");
  double snr_db = 0.0;
  auto* snr_opt = run->add_option("--snr-db", snr_db, "signal backend receiver SNR (default noiseless)");
  run->add_flag("--no-line-search", no_line_search, "fixed-step descent (plain mu)");
  run->add_option("--solver-trace", cfg.solver.trace_path, "per-iteration CSV trace file (debug)");
  run->set_config("--config", "", "read options from a config file");

  // --- gdop-map ---
  auto* gmap = app.add_subcommand("gdop-map", "evaluate GDOP over a scenario grid, write x,y,gdop CSV");
  std::string scenario_file, map_out = "gdop_map.csv";
  double grid_step = 1.0;
  gmap->add_option("--scenario-file", scenario_file, "scenario file to map")->required();
  gmap->add_option("--grid-step", grid_step, "grid pitch, metres")->check(CLI::PositiveNumber);
  gmap->add_option("--out", map_out, "output CSV path");

  // --- stats ---
  auto* stats = app.add_subcommand("stats", "percentiles from a trials.csv");
  std::string stats_in;
  double stats_p = 0.9;
  stats->add_option("--in", stats_in, "trials.csv path")->required();
  stats->add_option("--percentile", stats_p, "percentile in (0, 1]")->check(CLI::Range(1e-9, 1.0));

  // --- gen-scenario ---
  auto* gen = app.add_subcommand("gen-scenario", "generate a deployment and write the scenario file");
  std::string gen_kind = "ioo", gen_out = "scenario.txt";
  std::uint64_t gen_seed = 1;
  int gen_n_los = -1, gen_scatterers = 5, gen_stations = 7;
  double gen_spacing = 100.0, gen_width = 600.0, gen_height = 600.0;
  gen->add_option("--kind", gen_kind, "umi or ioo")->check(CLI::IsMember({"umi", "ioo"}));
  gen->add_option("--seed", gen_seed, "generation seed");
  gen->add_option("--n-los", gen_n_los, "LOS station count (default 5)");
  std::string gen_los_model = "nearest";
  gen->add_option("--los-model", gen_los_model, "LOS assignment: nearest or uniform")
      ->check(CLI::IsMember({"nearest", "uniform"}));
  gen->add_option("--n-scatterers", gen_scatterers, "scatterer count");
  gen->add_option("--stations", gen_stations, "UMi station count");
  gen->add_option("--min-spacing", gen_spacing, "UMi spacing, metres");
  gen->add_option("--width", gen_width, "UMi bounds width, metres");
  gen->add_option("--height", gen_height, "UMi bounds height, metres");
  gen->add_option("--out", gen_out, "output scenario file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const ScenarioKind kind = parse_scenario_kind(scenario);
      ExperimentConfig defaults = ExperimentConfig::defaults_for(kind);
      cfg.kind = kind;
      cfg.strategies = parse_strategies(strategies);
      cfg.backend = backend == "signal" ? ToaBackend::signal : ToaBackend::abstract_model;
      cfg.solver.line_search = !no_line_search;
      if (*snr_opt) cfg.sweep.snr_db = snr_db;
      cfg.n_los = n_los > 0 ? n_los : defaults.n_los;
      cfg.los_model = los_model == "uniform" ? LosModel::uniform : LosModel::nearest;
      cfg.noise.nlos_bias_mean_m = nlos_bias >= 0.0 ? nlos_bias : defaults.noise.nlos_bias_mean_m;
      cfg.validate();
      if (log_verbose())
        std::fprintf(stderr, "[gdopsel] run: %s trials=%d n_los=%d\n", scenario.c_str(), cfg.trials,
                     cfg.n_los);
      return cmd_run(cfg);
    }
    if (*gmap) return cmd_gdop_map(scenario_file, grid_step, map_out);
    if (*stats) return cmd_stats(stats_in, stats_p);
    if (*gen) {
      const ScenarioKind kind = parse_scenario_kind(gen_kind);
      if (gen_n_los <= 0) gen_n_los = 5;
      const LosModel lm = gen_los_model == "uniform" ? LosModel::uniform : LosModel::nearest;
      const Scenario sc =
          kind == ScenarioKind::umi
              ? gen_umi(gen_seed, gen_stations, gen_spacing, Rect{0, 0, gen_width, gen_height},
                        gen_scatterers, gen_n_los, lm)
              : gen_ioo(gen_seed, gen_scatterers, gen_n_los, lm);
      write_scenario(sc, gen_out);
      std::printf("wrote %s (%zu stations, ue %.2f,%.2f)\n", gen_out.c_str(), sc.bss.size(),
                  sc.ue.x, sc.ue.y);
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

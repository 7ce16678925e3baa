#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "gdopsel/errors.hpp"
#include "gdopsel/measurement.hpp"
#include "gdopsel/rng.hpp"
#include "gdopsel/scenario.hpp"
#include "gdopsel/selection.hpp"
#include "gdopsel/solver.hpp"
#include "gdopsel/toa_signal.hpp"

namespace gdopsel {

enum class ScenarioKind { umi, ioo };

inline const char* scenario_kind_name(ScenarioKind k) {
  return k == ScenarioKind::umi ? "umi" : "ioo";
}

inline ScenarioKind parse_scenario_kind(const std::string& name) {
  if (name == "umi") return ScenarioKind::umi;
  if (name == "ioo") return ScenarioKind::ioo;
  throw std::invalid_argument("unknown scenario kind '" + name + "'");
}

struct ExperimentConfig {
  ScenarioKind kind = ScenarioKind::ioo;
  int trials = 500;
  int n_select = 4;
  std::vector<Strategy> strategies{Strategy::gdop, Strategy::distance, Strategy::random};
  ToaBackend backend = ToaBackend::abstract_model;
  NoiseModel noise{};
  SolverConfig solver{};
  std::uint64_t master_seed = 1;
  std::string out_dir;  ///< empty: in-memory only

  // Scenario generation.
  int n_bs = 7;                  ///< UMi station count
  double min_spacing_m = 100.0;  ///< UMi pairwise spacing
  Rect umi_bounds = kUmiBounds;
  int n_scatterers = 5;
  int n_los = 5;
  LosModel los_model = LosModel::nearest;

  // Signal backend.
  PrsConfig prs{};
  SweepConfig sweep{};

  /// Per-kind defaults: 5 LOS stations in both deployments; the NLOS excess
  /// range averages 5 m outdoors and 2 m indoors.
  static ExperimentConfig defaults_for(ScenarioKind k) {
    ExperimentConfig c;
    c.kind = k;
    c.noise.nlos_bias_mean_m = k == ScenarioKind::umi ? 5.0 : 2.0;
    return c;
  }

  void validate() const {
    if (trials < 1) throw std::invalid_argument("experiment: trials must be >= 1");
    if (n_select < 4) throw std::invalid_argument("experiment: n_select must be >= 4");
    if (strategies.empty()) throw std::invalid_argument("experiment: no strategies");
  }
};

struct TrialReport {
  int trial = 0;
  Strategy strategy = Strategy::gdop;
  std::vector<int> selected_ids;
  int reference_id = 0;
  Point2 estimate;
  double error_m = 0.0;
  bool converged = false;
  bool skipped = false;
  std::string skip_reason;
  int solver_retries = 0;
  std::uint64_t meas_hash = 0;  ///< hash of the ToaSet all strategies shared this trial
};

namespace detail {

inline std::optional<PositionEstimate> try_solve(const TdoaVector& tdoa,
                                                 const PositionTable& table, Point2 init,
                                                 const SolverConfig& cfg) {
  try {
    return solve(tdoa, table, init, cfg);
  } catch (const divergence_error&) {
    return std::nullopt;
  } catch (const singularity_error&) {
    return std::nullopt;  // a retry init can land exactly on a station
  }
}

/// Solve with the centroid init; on non-convergence retry from the four
/// quarter-bounds perturbations and keep the lowest-cost result.
inline std::pair<PositionEstimate, int> solve_with_retries(const TdoaVector& tdoa,
                                                           const PositionTable& table,
                                                           Point2 init, Rect bounds,
                                                           const SolverConfig& cfg) {
  std::optional<PositionEstimate> best = try_solve(tdoa, table, init, cfg);
  int retries = 0;
  if (!best || !best->converged) {
    const double dx = bounds.width() / 4.0;
    const double dy = bounds.height() / 4.0;
    const Point2 offsets[4] = {{dx, 0.0}, {-dx, 0.0}, {0.0, dy}, {0.0, -dy}};
    for (const Point2& o : offsets) {
      ++retries;
      auto est = try_solve(tdoa, table, init + o, cfg);
      if (est && (!best || est->final_cost < best->final_cost)) best = est;
    }
  }
  if (!best) throw divergence_error("solve_with_retries: every start diverged");
  return {*best, retries};
}

}  // namespace detail

/// Monte-Carlo experiment: per trial, draw a scenario and one measurement
/// set, then run every strategy against that identical set (paired
/// comparison). Strategy failures become skipped rows; they never abort the
/// run.
inline std::vector<TrialReport> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<TrialReport> reports;
  reports.reserve(std::size_t(cfg.trials) * cfg.strategies.size());

  for (int t = 0; t < cfg.trials; ++t) {
    const std::uint64_t trial_seed = derive_seed(cfg.master_seed, std::uint64_t(t));
    const Scenario scenario =
        cfg.kind == ScenarioKind::umi
            ? gen_umi(derive_seed(trial_seed, 1), cfg.n_bs, cfg.min_spacing_m, cfg.umi_bounds,
                      cfg.n_scatterers, cfg.n_los, cfg.los_model)
            : gen_ioo(derive_seed(trial_seed, 1), cfg.n_scatterers, cfg.n_los, cfg.los_model);

    const ToaSet toas = cfg.backend == ToaBackend::abstract_model
                            ? simulate_toa_abstract(scenario, cfg.noise, derive_seed(trial_seed, 2))
                            : simulate_toa_signal(scenario, cfg.prs, cfg.sweep,
                                                  derive_seed(trial_seed, 2));

    // Stations the backend failed to detect are excluded outright.
    Scenario usable = scenario;
    if (toas.entries.size() < scenario.bss.size()) {
      std::vector<int> present;
      for (const auto& e : toas.entries) present.push_back(e.bs_id);
      usable = scenario.subset(present);
    }
    const std::uint64_t meas_hash = toas.hash();

    for (Strategy s : cfg.strategies) {
      TrialReport r;
      r.trial = t;
      r.strategy = s;
      r.meas_hash = meas_hash;
      try {
        SelectionResult sel;
        switch (s) {
          case Strategy::gdop: sel = select_gdop(usable, toas, cfg.n_select, cfg.solver); break;
          case Strategy::distance: sel = select_distance(usable, cfg.n_select); break;
          case Strategy::random:
            sel = select_random(usable, cfg.n_select, derive_seed(trial_seed, 3));
            break;
        }
        const TdoaVector tdoa = tdoa_from_toa(toas, sel.reference_id, sel.ordered_ids);
        const PositionTable table = PositionTable::from_scenario(usable);
        std::vector<Point2> sel_pos;
        for (int id : sel.ordered_ids) sel_pos.push_back(usable.bs(id).position);
        const auto [est, retries] = detail::solve_with_retries(tdoa, table, centroid_init(sel_pos),
                                                               scenario.bounds, cfg.solver);
        r.selected_ids = sel.ordered_ids;
        r.reference_id = sel.reference_id;
        r.estimate = est.x_hat;
        r.error_m = distance(est.x_hat, scenario.ue);
        r.converged = est.converged;
        r.solver_retries = retries;
      } catch (const std::invalid_argument& e) {
        r.skipped = true;
        r.skip_reason = e.what();
      } catch (const error& e) {
        r.skipped = true;
        r.skip_reason = e.what();
      }
      reports.push_back(std::move(r));
    }
  }
  return reports;
}

/// Empirical CDF: sorted errors with cumulative probability k/n.
struct CdfSeries {
  std::vector<std::pair<double, double>> points;
};

inline CdfSeries cdf(std::vector<double> errors) {
  if (errors.empty()) throw std::invalid_argument("cdf: empty input");
  std::sort(errors.begin(), errors.end());
  CdfSeries out;
  out.points.reserve(errors.size());
  const double n = double(errors.size());
  for (std::size_t k = 0; k < errors.size(); ++k)
    out.points.push_back({errors[k], double(k + 1) / n});
  return out;
}

/// Nearest-rank percentile: the ceil(p*n)-th smallest value, 0 < p <= 1.
inline double percentile(std::vector<double> errors, double p) {
  if (errors.empty()) throw std::invalid_argument("percentile: empty input");
  if (!(p > 0.0) || p > 1.0) throw std::invalid_argument("percentile: p must be in (0, 1]");
  std::sort(errors.begin(), errors.end());
  const auto rank = std::size_t(std::max(1.0, std::ceil(p * double(errors.size()) - 1e-9)));
  return errors[std::min(rank, errors.size()) - 1];
}

/// Recorded errors per strategy; skipped rows are excluded.
inline std::map<Strategy, std::vector<double>> errors_by_strategy(
    const std::vector<TrialReport>& reports) {
  std::map<Strategy, std::vector<double>> out;
  for (const auto& r : reports)
    if (!r.skipped) out[r.strategy].push_back(r.error_m);
  return out;
}

// --- CSV export ------------------------------------------------------------
//
// trials.csv          header trial,strategy,ref_id,ids,err_m,converged;
//                     ids are '|'-joined; skipped rows carry ref_id 0, empty
//                     ids and err_m nan.
// cdf_<strategy>.csv  header err_m,prob.

inline void write_trials_csv(const std::vector<TrialReport>& reports, std::ostream& os) {
  os << "trial,strategy,ref_id,ids,err_m,converged\n";
  char buf[64];
  for (const auto& r : reports) {
    os << r.trial << ',' << strategy_name(r.strategy) << ',' << r.reference_id << ',';
    for (std::size_t i = 0; i < r.selected_ids.size(); ++i) {
      if (i) os << '|';
      os << r.selected_ids[i];
    }
    if (r.skipped) {
      os << ",nan,0\n";
      continue;
    }
    std::snprintf(buf, sizeof buf, ",%.9g,%d\n", r.error_m, r.converged ? 1 : 0);
    os << buf;
  }
}

inline void write_cdf_csv(const CdfSeries& series, std::ostream& os) {
  os << "err_m,prob\n";
  char buf[64];
  for (const auto& [err, prob] : series.points) {
    std::snprintf(buf, sizeof buf, "%.9g,%.9g\n", err, prob);
    os << buf;
  }
}

/// Write trials.csv plus one cdf_<strategy>.csv per configured strategy into
/// cfg.out_dir (created if missing).
inline void write_outputs(const ExperimentConfig& cfg, const std::vector<TrialReport>& reports) {
  if (cfg.out_dir.empty()) throw std::invalid_argument("write_outputs: no output directory set");
  std::filesystem::create_directories(cfg.out_dir);
  const auto dir = std::filesystem::path(cfg.out_dir);

  {
    std::ofstream os(dir / "trials.csv");
    if (!os) throw io_error("write_outputs: cannot open trials.csv");
    write_trials_csv(reports, os);
  }

  const auto errors = errors_by_strategy(reports);
  for (Strategy s : cfg.strategies) {
    std::ofstream os(dir / (std::string("cdf_") + strategy_name(s) + ".csv"));
    if (!os) throw io_error("write_outputs: cannot open cdf file");
    auto it = errors.find(s);
    if (it == errors.end() || it->second.empty())
      os << "err_m,prob\n";
    else
      write_cdf_csv(cdf(it->second), os);
  }
}

/// Parse a trials.csv back into per-strategy error lists (skipped rows and
/// non-finite errors dropped).
inline std::map<std::string, std::vector<double>> read_trials_errors(std::istream& is) {
  std::map<std::string, std::vector<double>> out;
  std::string line;
  if (!std::getline(is, line) || line.rfind("trial,strategy,", 0) != 0)
    throw io_error("read_trials_errors: missing trials.csv header");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (fields.size() != 6) throw io_error("read_trials_errors: bad row: " + line);
    const double err = std::strtod(fields[4].c_str(), nullptr);
    if (std::isfinite(err)) out[fields[1]].push_back(err);
  }
  return out;
}

inline std::map<std::string, std::vector<double>> read_trials_errors(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw io_error("read_trials_errors: cannot open " + path);
  return read_trials_errors(is);
}

}  // namespace gdopsel

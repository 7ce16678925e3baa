#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "gdopsel/errors.hpp"
#include "gdopsel/gdop.hpp"
#include "gdopsel/measurement.hpp"
#include "gdopsel/rng.hpp"
#include "gdopsel/scenario.hpp"
#include "gdopsel/solver.hpp"

namespace gdopsel {

enum class Strategy { gdop, distance, random };

inline const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::gdop: return "gdop";
    case Strategy::distance: return "distance";
    case Strategy::random: return "random";
  }
  return "?";
}

inline Strategy parse_strategy(std::string_view name) {
  if (name == "gdop") return Strategy::gdop;
  if (name == "distance") return Strategy::distance;
  if (name == "random") return Strategy::random;
  throw std::invalid_argument("unknown strategy '" + std::string(name) + "'");
}

/// Outcome of a base-station selection: the chosen ids in priority order,
/// the designated reference (first element for the gdop and distance
/// strategies) and, for the gdop strategy, the per-id scores the order came
/// from.
struct SelectionResult {
  std::vector<int> ordered_ids;
  int reference_id = 0;
  Strategy strategy = Strategy::gdop;
  std::vector<GdopScore> scores;  ///< aligned with ordered_ids; empty unless gdop strategy

  /// One log line: trial,strategy,ids,reference,scores (ids and scores
  /// joined with '|').
  std::string csv_row(int trial) const {
    std::string out = std::to_string(trial);
    out += ',';
    out += strategy_name(strategy);
    out += ',';
    for (std::size_t i = 0; i < ordered_ids.size(); ++i) {
      if (i) out += '|';
      out += std::to_string(ordered_ids[i]);
    }
    out += ',';
    out += std::to_string(reference_id);
    out += ',';
    char buf[32];
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (i) out += '|';
      std::snprintf(buf, sizeof buf, "%.6g", scores[i].value);
      out += buf;
    }
    return out;
  }
};

namespace detail {

inline std::vector<int> ids_by_distance(const Scenario& sc, std::vector<int> ids) {
  std::sort(ids.begin(), ids.end(), [&](int a, int b) {
    const double da = distance(sc.bs(a).position, sc.ue);
    const double db = distance(sc.bs(b).position, sc.ue);
    if (da != db) return da < db;
    return a < b;
  });
  return ids;
}

inline int nearest_id(const Scenario& sc, const std::vector<int>& ids) {
  return ids_by_distance(sc, ids).front();
}

/// Ascending (score, distance to UE, id); +inf scores land last in their
/// partition, ordered by distance.
inline std::vector<GdopScore> sort_scores(const Scenario& sc, std::vector<GdopScore> scores) {
  std::sort(scores.begin(), scores.end(), [&](const GdopScore& a, const GdopScore& b) {
    if (a.value != b.value) return a.value < b.value;
    const double da = distance(sc.bs(a.bs_id).position, sc.ue);
    const double db = distance(sc.bs(b.bs_id).position, sc.ue);
    if (da != db) return da < db;
    return a.bs_id < b.bs_id;
  });
  return scores;
}

}  // namespace detail

/// GDOP-driven selection:
///   1. rough position fix from the LOS set (padded with the nearest NLOS
///      stations when fewer than 4 LOS exist, so the fix is determined);
///   2. per-reference GDOP of the LOS set at that fix, sorted ascending;
///   3. the same within the NLOS set;
///   4. take LOS-sorted then NLOS-sorted ids until n;
///   5. the first id (lowest-GDOP LOS station) becomes the reference.
inline SelectionResult select_gdop(const Scenario& sc, const ToaSet& toas, int n,
                                   const SolverConfig& solver_cfg = {}) {
  if (n < 4) throw std::invalid_argument("select_gdop: n must be >= 4");
  const std::vector<int> los = sc.los_ids();
  if (los.empty()) throw no_los_error("select_gdop: no LOS stations in scenario");
  const std::vector<int> nlos = sc.nlos_ids();

  // Initial fix.
  std::vector<int> fix_ids = los;
  if (fix_ids.size() < 4) {
    for (int id : detail::ids_by_distance(sc, nlos)) {
      if (fix_ids.size() >= 4) break;
      fix_ids.push_back(id);
    }
  }
  const int ref0 = detail::nearest_id(sc, los);
  const TdoaVector tdoa0 = tdoa_from_toa(toas, ref0, fix_ids);
  const PositionTable table = PositionTable::from_scenario(sc);
  std::vector<Point2> fix_pos;
  for (int id : fix_ids) fix_pos.push_back(sc.bs(id).position);
  const PositionEstimate initial = solve(tdoa0, table, centroid_init(fix_pos), solver_cfg);
  const Point2 x0 = initial.x_hat;

  const auto los_sorted = detail::sort_scores(sc, per_reference_scores(los, sc, x0));
  const auto nlos_sorted = detail::sort_scores(sc, per_reference_scores(nlos, sc, x0));

  SelectionResult r;
  r.strategy = Strategy::gdop;
  const std::size_t want = std::min<std::size_t>(n, sc.bss.size());
  for (const auto& s : los_sorted) {
    if (r.ordered_ids.size() >= want) break;
    r.ordered_ids.push_back(s.bs_id);
    r.scores.push_back(s);
  }
  for (const auto& s : nlos_sorted) {
    if (r.ordered_ids.size() >= want) break;
    r.ordered_ids.push_back(s.bs_id);
    r.scores.push_back(s);
  }
  r.reference_id = r.ordered_ids.front();
  return r;
}

/// Distance-based baseline: nearest LOS stations first, then nearest NLOS;
/// the nearest LOS station is the reference.
inline SelectionResult select_distance(const Scenario& sc, int n) {
  if (n < 4) throw std::invalid_argument("select_distance: n must be >= 4");
  const std::vector<int> los = sc.los_ids();
  if (los.empty()) throw no_los_error("select_distance: no LOS stations in scenario");

  SelectionResult r;
  r.strategy = Strategy::distance;
  const std::size_t want = std::min<std::size_t>(n, sc.bss.size());
  for (int id : detail::ids_by_distance(sc, los)) {
    if (r.ordered_ids.size() >= want) break;
    r.ordered_ids.push_back(id);
  }
  for (int id : detail::ids_by_distance(sc, sc.nlos_ids())) {
    if (r.ordered_ids.size() >= want) break;
    r.ordered_ids.push_back(id);
  }
  r.reference_id = r.ordered_ids.front();
  return r;
}

/// Random baseline: n stations drawn uniformly without replacement; the
/// member closest to the UE is the reference and is listed first.
inline SelectionResult select_random(const Scenario& sc, int n, std::uint64_t seed) {
  const int m = int(sc.bss.size());
  if (n < 1) throw std::invalid_argument("select_random: n must be >= 1");
  if (n > m) throw std::invalid_argument("select_random: n exceeds the station count");

  Rng rng(seed);
  std::vector<int> picked;
  for (int idx : sample_indices(rng, m, n)) picked.push_back(sc.bss[std::size_t(idx)].id);

  SelectionResult r;
  r.strategy = Strategy::random;
  r.reference_id = detail::nearest_id(sc, picked);
  r.ordered_ids.push_back(r.reference_id);
  for (int id : picked)
    if (id != r.reference_id) r.ordered_ids.push_back(id);
  return r;
}

}  // namespace gdopsel
